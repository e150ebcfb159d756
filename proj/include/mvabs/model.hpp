#pragma once

/*!
  \file model.hpp
  \brief Multi-valued network data model: entities, global states, traces
         and attractors, plus structural validation.

  Entities are kept in declaration order. That order fixes tuple positions,
  the digit positions of the `s1...sk` shorthand and the significance of the
  mixed-radix state encoding (the first entity is the most significant digit).
*/

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvabs
{

using State = std::int32_t;

/// Marks a table entry that has no row.
inline constexpr State kNoRow = -1;

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a size guard refuses work; distinct from "nothing found".
class GuardExceeded : public Error
{
public:
  GuardExceeded( std::string guard, std::uint64_t count, std::uint64_t limit )
      : Error( guard + " guard exceeded: " + std::to_string( count ) + " > " + std::to_string( limit ) ),
        guard_( std::move( guard ) ), count_( count ), limit_( limit )
  {
  }

  const std::string& guard() const noexcept { return guard_; }
  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t limit() const noexcept { return limit_; }

private:
  std::string guard_;
  std::uint64_t count_;
  std::uint64_t limit_;
};

/// Size guards. Counts that overflow 64 bits saturate and always trip a guard.
struct Limits
{
  std::uint64_t max_state_space = std::uint64_t{ 1 } << 24;
  std::uint64_t max_candidates = std::uint64_t{ 1 } << 20;
  std::uint64_t max_brute_force = std::uint64_t{ 1 } << 16;
};

namespace detail
{

inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t saturating_mul( std::uint64_t a, std::uint64_t b ) noexcept
{
  if ( a != 0 && b > kSaturated / a )
  {
    return kSaturated;
  }
  return a * b;
}

inline std::uint64_t saturating_pow( std::uint64_t base, std::uint64_t exp ) noexcept
{
  std::uint64_t r = 1;
  for ( std::uint64_t i = 0; i < exp && r != kSaturated; ++i )
  {
    r = saturating_mul( r, base );
  }
  return r;
}

inline void check_guard( const char* guard, std::uint64_t count, std::uint64_t limit )
{
  if ( count > limit )
  {
    throw GuardExceeded( guard, count, limit );
  }
}

} // namespace detail

struct Entity
{
  std::string id;
  State max_state = 1;             // states are 0..max_state
  std::vector<std::size_t> inputs; // indices into Mvn::entities, in table column order
  std::vector<State> table;        // dense, indexed by the mixed-radix code of the input tuple

  std::size_t range_size() const noexcept { return static_cast<std::size_t>( max_state ) + 1; }

  friend bool operator==( const Entity&, const Entity& ) = default;
};

struct Mvn
{
  std::string name;
  std::vector<Entity> entities;

  std::size_t size() const noexcept { return entities.size(); }
  const Entity& operator[]( std::size_t i ) const { return entities[i]; }
  Entity& operator[]( std::size_t i ) { return entities[i]; }

  std::optional<std::size_t> find( std::string_view id ) const
  {
    for ( std::size_t i = 0; i < entities.size(); ++i )
    {
      if ( entities[i].id == id )
      {
        return i;
      }
    }
    return std::nullopt;
  }

  friend bool operator==( const Mvn&, const Mvn& ) = default;
};

/// Equality of everything but the model name.
inline bool same_network( const Mvn& a, const Mvn& b )
{
  return a.entities == b.entities;
}

/// Entities, ranges and neighbourhoods agree; tables may differ.
inline bool same_structure( const Mvn& a, const Mvn& b )
{
  if ( a.size() != b.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    if ( a[i].id != b[i].id || a[i].inputs != b[i].inputs )
    {
      return false;
    }
  }
  return true;
}

/* rows */

inline std::uint64_t row_count( const Mvn& m, std::size_t entity )
{
  std::uint64_t n = 1;
  for ( auto in : m[entity].inputs )
  {
    n = detail::saturating_mul( n, m[in].range_size() );
  }
  return n;
}

/// Row index of an input tuple; the first input is the most significant digit.
inline std::size_t row_index( const Mvn& m, std::size_t entity, std::span<const State> inputs )
{
  std::size_t idx = 0;
  const auto& e = m[entity];
  for ( std::size_t c = 0; c < e.inputs.size(); ++c )
  {
    idx = idx * m[e.inputs[c]].range_size() + static_cast<std::size_t>( inputs[c] );
  }
  return idx;
}

inline std::vector<State> row_inputs( const Mvn& m, std::size_t entity, std::size_t row )
{
  const auto& e = m[entity];
  std::vector<State> values( e.inputs.size() );
  for ( std::size_t c = e.inputs.size(); c-- > 0; )
  {
    const auto radix = m[e.inputs[c]].range_size();
    values[c] = static_cast<State>( row % radix );
    row /= radix;
  }
  return values;
}

/* global states */

struct GlobalState
{
  std::vector<State> values;

  GlobalState() = default;
  explicit GlobalState( std::vector<State> v ) : values( std::move( v ) ) {}
  GlobalState( std::initializer_list<State> v ) : values( v ) {}

  std::size_t size() const noexcept { return values.size(); }
  State operator[]( std::size_t i ) const { return values[i]; }
  State& operator[]( std::size_t i ) { return values[i]; }

  friend auto operator<=>( const GlobalState&, const GlobalState& ) = default;
  friend bool operator==( const GlobalState&, const GlobalState& ) = default;
};

/// |D(MV)|, saturating.
inline std::uint64_t state_space_size( const Mvn& m )
{
  std::uint64_t n = 1;
  for ( const auto& e : m.entities )
  {
    n = detail::saturating_mul( n, e.range_size() );
  }
  return n;
}

inline void check_state_space( const Mvn& m, const Limits& limits )
{
  detail::check_guard( "state space", state_space_size( m ), limits.max_state_space );
}

inline bool is_valid_state( const Mvn& m, const GlobalState& s )
{
  if ( s.size() != m.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    if ( s[i] < 0 || s[i] > m[i].max_state )
    {
      return false;
    }
  }
  return true;
}

inline std::uint64_t encode_state( const Mvn& m, const GlobalState& s )
{
  if ( !is_valid_state( m, s ) )
  {
    throw Error( "global state does not fit model " + m.name );
  }
  std::uint64_t idx = 0;
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    idx = idx * m[i].range_size() + static_cast<std::uint64_t>( s[i] );
  }
  return idx;
}

inline GlobalState decode_state( const Mvn& m, std::uint64_t index )
{
  if ( index >= state_space_size( m ) )
  {
    throw Error( "state index " + std::to_string( index ) + " out of range for model " + m.name );
  }
  std::vector<State> v( m.size() );
  for ( std::size_t i = m.size(); i-- > 0; )
  {
    v[i] = static_cast<State>( index % m[i].range_size() );
    index /= m[i].range_size();
  }
  return GlobalState{ std::move( v ) };
}

/// Digit-string notation is used when every entity has at most ten states.
inline bool uses_digit_strings( const Mvn& m )
{
  return std::all_of( m.entities.begin(), m.entities.end(), []( const Entity& e ) { return e.range_size() <= 10; } );
}

inline std::string format_state( const Mvn& m, const GlobalState& s )
{
  std::string out;
  const bool digits = uses_digit_strings( m );
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    if ( !digits && i > 0 )
    {
      out += ',';
    }
    out += std::to_string( s[i] );
  }
  return out;
}

/// Accepts `s1...sk` digit strings (when permitted) or comma-separated values.
inline GlobalState parse_state( const Mvn& m, std::string_view text )
{
  std::vector<State> v;
  if ( text.find( ',' ) == std::string_view::npos && text.size() == m.size() && uses_digit_strings( m ) )
  {
    for ( char c : text )
    {
      if ( c < '0' || c > '9' )
      {
        throw Error( "malformed state '" + std::string( text ) + "'" );
      }
      v.push_back( c - '0' );
    }
  }
  else
  {
    std::size_t pos = 0;
    while ( pos <= text.size() )
    {
      auto end = text.find( ',', pos );
      if ( end == std::string_view::npos )
      {
        end = text.size();
      }
      auto part = text.substr( pos, end - pos );
      if ( part.empty() || part.size() > 9 ||
           !std::all_of( part.begin(), part.end(), []( char c ) { return c >= '0' && c <= '9'; } ) )
      {
        throw Error( "malformed state '" + std::string( text ) + "'" );
      }
      v.push_back( std::stoi( std::string( part ) ) );
      pos = end + 1;
    }
  }
  GlobalState s{ std::move( v ) };
  if ( !is_valid_state( m, s ) )
  {
    throw Error( "state '" + std::string( text ) + "' is out of range for model " + m.name );
  }
  return s;
}

/* traces and attractors */

/// Canonical trace: S0..S(n-1) pairwise distinct and Sn equal to an earlier state.
struct Trace
{
  std::vector<GlobalState> states;

  /// Index i with states[i] == states.back().
  std::size_t loop_start() const
  {
    for ( std::size_t i = 0; i + 1 < states.size(); ++i )
    {
      if ( states[i] == states.back() )
      {
        return i;
      }
    }
    return states.size() - 1;
  }

  friend auto operator<=>( const Trace&, const Trace& ) = default;
  friend bool operator==( const Trace&, const Trace& ) = default;
};

using TraceSet = std::set<Trace>;

/// Shape check only; the step relation needs the model.
inline bool is_canonical( const Trace& t )
{
  if ( t.states.size() < 2 )
  {
    return false;
  }
  const std::set<GlobalState> prefix( t.states.begin(), t.states.end() - 1 );
  return prefix.size() + 1 == t.states.size() && prefix.contains( t.states.back() );
}

/// A cycle in minimal period and canonical rotation (smallest state first).
struct Attractor
{
  std::vector<GlobalState> cycle;

  std::size_t period() const noexcept { return cycle.size(); }

  friend auto operator<=>( const Attractor&, const Attractor& ) = default;
  friend bool operator==( const Attractor&, const Attractor& ) = default;
};

inline Attractor make_attractor( std::vector<GlobalState> cycle )
{
  if ( cycle.empty() )
  {
    throw Error( "empty attractor cycle" );
  }
  // smallest p dividing the length such that the cycle repeats with period p
  const auto n = cycle.size();
  for ( std::size_t p = 1; p <= n; ++p )
  {
    if ( n % p != 0 )
    {
      continue;
    }
    bool periodic = true;
    for ( std::size_t i = p; i < n && periodic; ++i )
    {
      periodic = cycle[i] == cycle[i - p];
    }
    if ( periodic )
    {
      cycle.resize( p );
      break;
    }
  }
  const auto first = std::min_element( cycle.begin(), cycle.end() );
  std::rotate( cycle.begin(), first, cycle.end() );
  return Attractor{ std::move( cycle ) };
}

/// The cycle a canonical trace ends in.
inline Attractor attractor_of( const Trace& t )
{
  if ( !is_canonical( t ) )
  {
    throw Error( "attractor_of requires a canonical trace" );
  }
  const auto k = t.loop_start();
  return make_attractor( { t.states.begin() + static_cast<std::ptrdiff_t>( k ), t.states.end() - 1 } );
}

/* validation */

struct Violation
{
  enum class Kind
  {
    no_entities,
    duplicate_entity,
    bad_range,
    unknown_input,
    duplicate_input,
    table_size,
    missing_row,
    output_out_of_range
  };

  Kind kind;
  std::optional<std::size_t> entity;
  std::optional<std::size_t> row;
  std::string message;
};

inline std::string_view to_string( Violation::Kind k )
{
  switch ( k )
  {
  case Violation::Kind::no_entities: return "no entities";
  case Violation::Kind::duplicate_entity: return "duplicate entity";
  case Violation::Kind::bad_range: return "bad state range";
  case Violation::Kind::unknown_input: return "unknown input";
  case Violation::Kind::duplicate_input: return "duplicate input";
  case Violation::Kind::table_size: return "table size";
  case Violation::Kind::missing_row: return "missing row";
  case Violation::Kind::output_out_of_range: return "output out of range";
  }
  return "?";
}

/// "(g1=1, g2=2)"
inline std::string describe_row( const Mvn& m, std::size_t entity, std::size_t row )
{
  const auto values = row_inputs( m, entity, row );
  std::string out = "(";
  for ( std::size_t c = 0; c < values.size(); ++c )
  {
    if ( c > 0 )
    {
      out += ", ";
    }
    out += m[m[entity].inputs[c]].id + "=" + std::to_string( values[c] );
  }
  return out + ")";
}

/// Every violated model invariant; empty iff the model is well formed.
inline std::vector<Violation> validate_model( const Mvn& m )
{
  using Kind = Violation::Kind;
  std::vector<Violation> out;

  if ( m.entities.empty() )
  {
    out.push_back( { Kind::no_entities, std::nullopt, std::nullopt, "model has no entities" } );
    return out;
  }

  bool structure_ok = true;
  std::set<std::string_view> seen;
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    const auto& e = m[i];
    if ( !seen.insert( e.id ).second )
    {
      out.push_back( { Kind::duplicate_entity, i, std::nullopt, "entity " + e.id + " declared twice" } );
    }
    if ( e.max_state < 1 )
    {
      out.push_back( { Kind::bad_range, i, std::nullopt, "entity " + e.id + " needs at least two states" } );
      structure_ok = false;
    }
    std::set<std::size_t> inputs;
    for ( auto in : e.inputs )
    {
      if ( in >= m.size() )
      {
        out.push_back( { Kind::unknown_input, i, std::nullopt, "entity " + e.id + " reads an undeclared entity" } );
        structure_ok = false;
      }
      else if ( !inputs.insert( in ).second )
      {
        out.push_back( { Kind::duplicate_input, i, std::nullopt, "entity " + e.id + " lists input " + m[in].id + " twice" } );
      }
    }
  }
  if ( !structure_ok )
  {
    return out;
  }

  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    const auto& e = m[i];
    const auto rows = row_count( m, i );
    if ( e.table.size() != rows )
    {
      out.push_back( { Kind::table_size, i, std::nullopt,
                       "table " + e.id + " has " + std::to_string( e.table.size() ) + " entries, expected " +
                           std::to_string( rows ) } );
      continue;
    }
    for ( std::size_t r = 0; r < e.table.size(); ++r )
    {
      if ( e.table[r] == kNoRow )
      {
        out.push_back( { Kind::missing_row, i, r, "missing row " + describe_row( m, i, r ) + " in table " + e.id } );
      }
      else if ( e.table[r] < 0 || e.table[r] > e.max_state )
      {
        out.push_back( { Kind::output_out_of_range, i, r,
                         "output " + std::to_string( e.table[r] ) + " out of range 0.." + std::to_string( e.max_state ) +
                             " at row " + describe_row( m, i, r ) + " in table " + e.id } );
      }
    }
  }
  return out;
}

} // namespace mvabs
