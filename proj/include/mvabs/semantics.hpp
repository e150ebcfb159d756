#pragma once

/*!
  \file semantics.hpp
  \brief Synchronous update semantics: successors, canonical traces,
         trace semantics, attractors and reachability.
*/

#include "model.hpp"

#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mvabs
{

/// One synchronous step: every entity reads the current state of its inputs.
inline GlobalState successor( const Mvn& m, const GlobalState& s )
{
  std::vector<State> next( m.size() );
  std::vector<State> in;
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    const auto& e = m[i];
    in.clear();
    for ( auto src : e.inputs )
    {
      in.push_back( s[src] );
    }
    next[i] = e.table[row_index( m, i, in )];
  }
  return GlobalState{ std::move( next ) };
}

/// Iterates successor until the first repeated state.
inline Trace trace_from( const Mvn& m, const GlobalState& s0 )
{
  if ( !is_valid_state( m, s0 ) )
  {
    throw Error( "initial state does not fit model " + m.name );
  }
  Trace t;
  std::set<GlobalState> seen;
  auto s = s0;
  while ( seen.insert( s ).second )
  {
    t.states.push_back( s );
    s = successor( m, s );
  }
  t.states.push_back( std::move( s ) );
  return t;
}

/*! \brief Dense successor function over encoded global states.

  Built once per model, read-only afterwards. Orbits are produced on demand
  so a language can be walked without materializing every trace.
*/
class SuccessorArray
{
public:
  using Index = std::uint32_t;

  explicit SuccessorArray( const Mvn& m, const Limits& limits = {} ) : model_( &m )
  {
    check_state_space( m, limits );
    const auto n = state_space_size( m );
    next_.resize( n );

    // odometer over global states, g1 most significant
    std::vector<State> cur( m.size(), 0 );
    std::vector<State> in;
    for ( std::uint64_t idx = 0; idx < n; ++idx )
    {
      std::uint64_t code = 0;
      for ( std::size_t i = 0; i < m.size(); ++i )
      {
        const auto& e = m[i];
        in.clear();
        for ( auto src : e.inputs )
        {
          in.push_back( cur[src] );
        }
        code = code * e.range_size() + static_cast<std::uint64_t>( e.table[row_index( m, i, in )] );
      }
      next_[idx] = static_cast<Index>( code );

      for ( std::size_t i = m.size(); i-- > 0; )
      {
        if ( ++cur[i] <= m[i].max_state )
        {
          break;
        }
        cur[i] = 0;
      }
    }
  }

  std::size_t size() const noexcept { return next_.size(); }
  Index operator[]( Index s ) const { return next_[s]; }
  const std::vector<Index>& data() const noexcept { return next_; }
  const Mvn& model() const noexcept { return *model_; }

  /// Encoded canonical trace from `start`; `scratch` must hold size() zeros and is left zeroed.
  void orbit( Index start, std::vector<Index>& out, std::vector<std::uint8_t>& scratch ) const
  {
    out.clear();
    Index s = start;
    while ( !scratch[s] )
    {
      scratch[s] = 1;
      out.push_back( s );
      s = next_[s];
    }
    out.push_back( s );
    for ( std::size_t i = 0; i + 1 < out.size(); ++i )
    {
      scratch[out[i]] = 0;
    }
  }

  std::vector<Index> orbit( Index start ) const
  {
    std::vector<Index> out;
    std::vector<std::uint8_t> scratch( size(), 0 );
    orbit( start, out, scratch );
    return out;
  }

  Trace trace( Index start ) const
  {
    Trace t;
    for ( auto s : orbit( start ) )
    {
      t.states.push_back( decode_state( *model_, s ) );
    }
    return t;
  }

  /// Calls fn(start, encoded_trace) for every initial state in encoding order.
  template<typename Fn>
  void for_each_orbit( Fn&& fn ) const
  {
    std::vector<Index> out;
    std::vector<std::uint8_t> scratch( size(), 0 );
    for ( Index s = 0; s < size(); ++s )
    {
      orbit( s, out, scratch );
      fn( s, static_cast<const std::vector<Index>&>( out ) );
    }
  }

private:
  const Mvn* model_;
  std::vector<Index> next_;
};

/// L(MV): one canonical trace per global state.
inline TraceSet language( const Mvn& m, const Limits& limits = {} )
{
  const SuccessorArray succ( m, limits );
  TraceSet out;
  succ.for_each_orbit( [&]( auto, const auto& orbit ) {
    Trace t;
    t.states.reserve( orbit.size() );
    for ( auto s : orbit )
    {
      t.states.push_back( decode_state( m, s ) );
    }
    out.insert( std::move( t ) );
  } );
  return out;
}

inline std::set<Attractor> attractors( const Mvn& m, const Limits& limits = {} )
{
  std::set<Attractor> out;
  for ( const auto& t : language( m, limits ) )
  {
    out.insert( attractor_of( t ) );
  }
  return out;
}

/// s2 lies on the forward orbit of s1.
inline bool reachable( const Mvn& m, const GlobalState& s1, const GlobalState& s2 )
{
  if ( !is_valid_state( m, s2 ) )
  {
    throw Error( "target state does not fit model " + m.name );
  }
  const auto t = trace_from( m, s1 );
  return std::find( t.states.begin(), t.states.end(), s2 ) != t.states.end();
}

/// State transition graph in Graphviz format; attractor states are doubled circles.
inline std::string to_dot( const Mvn& m, const Limits& limits = {} )
{
  const SuccessorArray succ( m, limits );
  std::set<SuccessorArray::Index> on_cycle;
  for ( const auto& a : attractors( m, limits ) )
  {
    for ( const auto& s : a.cycle )
    {
      on_cycle.insert( static_cast<SuccessorArray::Index>( encode_state( m, s ) ) );
    }
  }

  std::ostringstream os;
  os << "digraph \"" << m.name << "\" {\n";
  for ( SuccessorArray::Index s = 0; s < succ.size(); ++s )
  {
    os << "  s" << s << " [label=\"" << format_state( m, decode_state( m, s ) ) << "\"";
    if ( on_cycle.contains( s ) )
    {
      os << ", shape=doublecircle";
    }
    os << "];\n";
  }
  for ( SuccessorArray::Index s = 0; s < succ.size(); ++s )
  {
    os << "  s" << s << " -> s" << succ[s] << ";\n";
  }
  os << "}\n";
  return os.str();
}

} // namespace mvabs
