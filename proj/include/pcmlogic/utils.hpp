/*!
  \file utils.hpp
  \brief Seed derivation and a small deterministic parallel-for
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <thread>
#include <vector>

namespace pcmlogic
{

/*! \brief splitmix64 finalizer */
constexpr std::uint64_t mix64( std::uint64_t x ) noexcept
{
  x += 0x9e3779b97f4a7c15ull;
  x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebull;
  return x ^ ( x >> 31 );
}

/*! \brief Derives a child seed from a parent seed and a path of indices.
 *
 * Used so that the random stream of, e.g., iteration 17 / combination 2 / cell 1
 * does not depend on the order in which work items are scheduled.
 */
inline std::uint64_t derive_seed( std::uint64_t seed, std::initializer_list<std::uint64_t> path ) noexcept
{
  std::uint64_t s = mix64( seed );
  for ( auto p : path )
  {
    s = mix64( s ^ mix64( p + 0x632be59bd9b4e019ull ) );
  }
  return s;
}

/*! \brief Runs `fn(i)` for i in [0, n) on up to `threads` workers.
 *
 * Results must be written to per-index slots by `fn`. If several items throw,
 * the exception of the lowest index is rethrown so failures are reproducible.
 */
template<typename Fn>
void parallel_for( std::size_t n, Fn&& fn, unsigned threads = 0 )
{
  if ( threads == 0 )
  {
    threads = std::max( 1u, std::thread::hardware_concurrency() );
  }
  threads = static_cast<unsigned>( std::min<std::size_t>( threads, n ) );
  if ( threads <= 1 )
  {
    for ( std::size_t i = 0; i < n; ++i )
    {
      fn( i );
    }
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::vector<std::exception_ptr> errors( n );
  std::vector<std::thread> pool;
  pool.reserve( threads );
  for ( unsigned w = 0; w < threads; ++w )
  {
    pool.emplace_back( [&]() {
      for ( auto i = next.fetch_add( 1 ); i < n; i = next.fetch_add( 1 ) )
      {
        try
        {
          fn( i );
        }
        catch ( ... )
        {
          errors[i] = std::current_exception();
        }
      }
    } );
  }
  for ( auto& t : pool )
  {
    t.join();
  }
  for ( auto const& e : errors )
  {
    if ( e )
    {
      std::rethrow_exception( e );
    }
  }
}

} // namespace pcmlogic
