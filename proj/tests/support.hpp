#pragma once

// Shared fixtures for the test suites: bundled model loading, random model
// generators and oracles that do not go through the library's own paths.

#include <mvabs/mvabs.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef MVABS_MODEL_DIR
#error "MVABS_MODEL_DIR must point at the bundled models"
#endif

namespace mvabs::test
{

inline std::string read_text( const std::string& name )
{
  std::ifstream in( std::string( MVABS_MODEL_DIR ) + "/" + name );
  if ( !in )
  {
    throw Error( "missing fixture " + name );
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Mvn load( const std::string& name )
{
  return parse_model( read_text( name ) );
}

inline AbstractionMapping load_map( const std::string& name, const Mvn& m )
{
  return parse_mapping( read_text( name ), m );
}

/// Trace from digit strings, e.g. trace_of(m, {"00", "11", "10", "10"}).
inline Trace trace_of( const Mvn& m, std::initializer_list<const char*> states )
{
  Trace t;
  for ( const auto* s : states )
  {
    t.states.push_back( parse_state( m, s ) );
  }
  return t;
}

inline std::vector<std::string> digits( const Mvn& m, const Trace& t )
{
  std::vector<std::string> out;
  for ( const auto& s : t.states )
  {
    out.push_back( format_state( m, s ) );
  }
  return out;
}

inline std::set<std::vector<std::string>> digit_set( const Mvn& m, const TraceSet& ts )
{
  std::set<std::vector<std::string>> out;
  for ( const auto& t : ts )
  {
    out.insert( digits( m, t ) );
  }
  return out;
}

inline std::vector<State> image_of( const StateMapping& f )
{
  const auto img = f.image();
  return { img.begin(), img.end() };
}

/* oracles */

/// All global states in lexicographic order by nested enumeration.
inline std::vector<GlobalState> lexicographic_states( const Mvn& m )
{
  std::vector<GlobalState> out{ GlobalState{} };
  for ( const auto& e : m.entities )
  {
    std::vector<GlobalState> next;
    for ( const auto& prefix : out )
    {
      for ( State v = 0; v <= e.max_state; ++v )
      {
        auto s = prefix;
        s.values.push_back( v );
        next.push_back( std::move( s ) );
      }
    }
    out = std::move( next );
  }
  return out;
}

/// Surjections by filtering every function {0..m-1} -> {0..n-1}.
inline std::set<std::vector<State>> surjections_by_filter( std::size_t m, std::size_t n )
{
  std::set<std::vector<State>> out;
  std::size_t total = 1;
  for ( std::size_t i = 0; i < m; ++i )
  {
    total *= n;
  }
  for ( std::size_t code = 0; code < total; ++code )
  {
    std::vector<State> f( m );
    auto c = code;
    for ( std::size_t i = 0; i < m; ++i )
    {
      f[i] = static_cast<State>( c % n );
      c /= n;
    }
    std::set<State> image( f.begin(), f.end() );
    if ( image.size() == n )
    {
      out.insert( f );
    }
  }
  return out;
}

/// Cycles of the successor functional graph by three-colour walks, each
/// reported as its set of states (rotation-free).
inline std::set<std::set<GlobalState>> functional_graph_cycles( const Mvn& m )
{
  const auto states = lexicographic_states( m );
  std::map<GlobalState, GlobalState> next;
  for ( const auto& s : states )
  {
    next[s] = successor( m, s );
  }
  std::map<GlobalState, int> colour; // 0 new, 1 on current walk, 2 done
  std::set<std::set<GlobalState>> out;
  for ( const auto& s0 : states )
  {
    if ( colour[s0] != 0 )
    {
      continue;
    }
    std::vector<GlobalState> walk;
    auto s = s0;
    while ( colour[s] == 0 )
    {
      colour[s] = 1;
      walk.push_back( s );
      s = next[s];
    }
    if ( colour[s] == 1 )
    {
      const auto at = std::find( walk.begin(), walk.end(), s );
      out.insert( std::set<GlobalState>( at, walk.end() ) );
    }
    for ( const auto& w : walk )
    {
      colour[w] = 2;
    }
  }
  return out;
}

/// PL4 update functions written out as conditions, independent of the
/// tabular form in pl4.mvn.
inline GlobalState pl4_step( const GlobalState& s )
{
  const State ci = s[0], cro = s[1], n = s[3];
  const State ci_next = cro == 0 ? ( ci == 0 ? 1 : 2 ) : ( ci == 2 ? 1 : 0 );
  State cro_next;
  if ( cro == 3 )
  {
    cro_next = 2;
  }
  else if ( ci < 2 )
  {
    cro_next = cro + 1;
  }
  else
  {
    cro_next = cro == 2 ? 1 : 0;
  }
  const State cii_next = ( n == 1 && ci < 2 && cro < 3 ) ? 1 : 0;
  const State n_next = ( ci == 0 && cro <= 1 ) ? 1 : 0;
  return GlobalState{ ci_next, cro_next, cii_next, n_next };
}

/* random instances */

/// k entities (1..max_entities) with 2..max_states+1 states, random
/// neighbourhoods and random total tables.
inline Mvn random_model( std::mt19937& rng, std::size_t max_entities = 3, State max_state = 3,
                         bool need_non_boolean = true )
{
  std::uniform_int_distribution<std::size_t> k_dist( 1, max_entities );
  std::uniform_int_distribution<State> range_dist( 1, max_state );
  Mvn m;
  m.name = "R";
  const auto k = k_dist( rng );
  for ( std::size_t i = 0; i < k; ++i )
  {
    Entity e;
    e.id = "x" + std::to_string( i + 1 );
    e.max_state = range_dist( rng );
    m.entities.push_back( std::move( e ) );
  }
  if ( need_non_boolean && std::all_of( m.entities.begin(), m.entities.end(), []( auto& e ) { return e.max_state < 2; } ) )
  {
    m[std::uniform_int_distribution<std::size_t>( 0, k - 1 )( rng )].max_state = std::max<State>( 2, max_state );
  }
  for ( std::size_t i = 0; i < k; ++i )
  {
    std::vector<std::size_t> pool( k );
    for ( std::size_t j = 0; j < k; ++j )
    {
      pool[j] = j;
    }
    std::shuffle( pool.begin(), pool.end(), rng );
    pool.resize( std::uniform_int_distribution<std::size_t>( 1, k )( rng ) );
    std::sort( pool.begin(), pool.end() );
    m[i].inputs = pool;
  }
  for ( std::size_t i = 0; i < k; ++i )
  {
    std::uniform_int_distribution<State> out( 0, m[i].max_state );
    m[i].table.resize( row_count( m, i ) );
    for ( auto& v : m[i].table )
    {
      v = out( rng );
    }
  }
  return m;
}

/// A random legal abstraction mapping: identity or a random surjection per
/// entity with at least three states, at least one surjection overall.
inline AbstractionMapping random_mapping( std::mt19937& rng, const Mvn& m )
{
  std::vector<std::size_t> candidates;
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    if ( m[i].range_size() >= 3 )
    {
      candidates.push_back( i );
    }
  }
  if ( candidates.empty() )
  {
    throw Error( "model has no entity that can be abstracted" );
  }
  const auto forced = candidates[std::uniform_int_distribution<std::size_t>( 0, candidates.size() - 1 )( rng )];
  std::vector<AbstractionMapping::Entry> entries( m.size() );
  for ( auto i : candidates )
  {
    if ( i != forced && std::bernoulli_distribution( 0.5 )( rng ) )
    {
      continue;
    }
    const auto n = std::uniform_int_distribution<std::size_t>( 2, m[i].range_size() - 1 )( rng );
    const auto all = enumerate_state_mappings( m[i].range_size(), n );
    entries[i] = all[std::uniform_int_distribution<std::size_t>( 0, all.size() - 1 )( rng )];
  }
  return AbstractionMapping( m, std::move( entries ), "phi_r" );
}

} // namespace mvabs::test
