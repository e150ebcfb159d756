#pragma once

/*!
  \file abstraction.hpp
  \brief State mappings, abstraction mappings and the abstraction relation.

  A state mapping merges the states of one entity onto a strictly smaller
  contiguous range. An abstraction mapping assigns each entity either a state
  mapping or the identity, with at least one true state mapping. Mappings
  lift pointwise to global states and traces; a lifted trace is valid when no
  abstract state is followed by two different abstract states.
*/

#include "model.hpp"
#include "semantics.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mvabs
{

/// Surjection {0..m} -> {0..n} with 0 < n < m.
class StateMapping
{
public:
  explicit StateMapping( std::vector<State> image ) : image_( std::move( image ) )
  {
    if ( image_.size() < 3 )
    {
      throw Error( "state mappings need a source entity with at least three states" );
    }
    if ( std::any_of( image_.begin(), image_.end(), []( State v ) { return v < 0; } ) )
    {
      throw Error( "state mapping has a negative target" );
    }
    const auto top = *std::max_element( image_.begin(), image_.end() );
    if ( top < 1 )
    {
      throw Error( "state mapping collapses the entity to a single state" );
    }
    if ( static_cast<std::size_t>( top ) >= image_.size() )
    {
      throw Error( "state mapping is not surjective onto 0.." + std::to_string( top ) );
    }
    std::vector<bool> hit( static_cast<std::size_t>( top ) + 1, false );
    for ( auto v : image_ )
    {
      hit[static_cast<std::size_t>( v )] = true;
    }
    for ( State v = 0; v <= top; ++v )
    {
      if ( !hit[static_cast<std::size_t>( v )] )
      {
        throw Error( "state mapping is not surjective onto 0.." + std::to_string( top ) + " (misses " +
                     std::to_string( v ) + ")" );
      }
    }
    if ( static_cast<std::size_t>( top ) + 1 == image_.size() )
    {
      throw Error( "state mapping does not merge any states" );
    }
    target_max_ = top;
  }

  State operator()( State s ) const { return image_[static_cast<std::size_t>( s )]; }

  State source_max() const noexcept { return static_cast<State>( image_.size() ) - 1; }
  State target_max() const noexcept { return target_max_; }
  std::span<const State> image() const noexcept { return image_; }

  friend auto operator<=>( const StateMapping& a, const StateMapping& b ) { return a.image_ <=> b.image_; }
  friend bool operator==( const StateMapping& a, const StateMapping& b ) { return a.image_ == b.image_; }

private:
  std::vector<State> image_;
  State target_max_ = 0;
};

/// "{0 -> 0, 1 -> 0, 2 -> 1}"
inline std::string to_string( const StateMapping& sm )
{
  std::string out = "{";
  for ( std::size_t s = 0; s < sm.image().size(); ++s )
  {
    if ( s > 0 )
    {
      out += ", ";
    }
    out += std::to_string( s ) + " -> " + std::to_string( sm.image()[s] );
  }
  return out + "}";
}

/*! \brief All surjections from `source_states` states onto `target_states` states.

  Both arguments count states, so Φ(3,2) maps {0,1,2} onto {0,1}. Results are
  in lexicographic order of their value tables; there are
  target_states! * S(source_states, target_states) of them.
*/
inline std::vector<StateMapping> enumerate_state_mappings( std::size_t source_states, std::size_t target_states )
{
  if ( source_states < 3 || target_states < 2 || target_states >= source_states )
  {
    throw Error( "no state mappings from " + std::to_string( source_states ) + " onto " +
                 std::to_string( target_states ) + " states (need 2 <= n < m and m >= 3)" );
  }
  if ( detail::saturating_pow( target_states, source_states ) > ( std::uint64_t{ 1 } << 24 ) )
  {
    throw GuardExceeded( "state mapping enumeration", detail::saturating_pow( target_states, source_states ),
                         std::uint64_t{ 1 } << 24 );
  }

  std::vector<StateMapping> out;
  std::vector<State> image( source_states, 0 );
  std::vector<std::size_t> hits( target_states, 0 );
  hits[0] = source_states;
  const auto top = static_cast<State>( target_states - 1 );
  for ( ;; )
  {
    if ( std::all_of( hits.begin(), hits.end(), []( auto h ) { return h > 0; } ) )
    {
      out.emplace_back( image );
    }
    std::size_t i = source_states;
    while ( i-- > 0 )
    {
      --hits[static_cast<std::size_t>( image[i] )];
      if ( image[i] < top )
      {
        ++image[i];
        ++hits[static_cast<std::size_t>( image[i] )];
        break;
      }
      image[i] = 0;
      ++hits[0];
    }
    if ( i == static_cast<std::size_t>( -1 ) )
    {
      break;
    }
  }
  return out;
}

/// Per-entity state mapping or identity, aligned with the model's entities.
class AbstractionMapping
{
public:
  using Entry = std::optional<StateMapping>; // nullopt = identity

  AbstractionMapping( const Mvn& model, std::vector<Entry> entries, std::string name = "phi" )
      : name_( std::move( name ) ), model_name_( model.name ), entries_( std::move( entries ) )
  {
    if ( entries_.size() != model.size() )
    {
      throw Error( "abstraction mapping has " + std::to_string( entries_.size() ) + " entries, model " +
                   model.name + " has " + std::to_string( model.size() ) + " entities" );
    }
    bool any = false;
    for ( std::size_t i = 0; i < entries_.size(); ++i )
    {
      source_max_.push_back( model[i].max_state );
      if ( entries_[i] )
      {
        any = true;
        if ( entries_[i]->source_max() != model[i].max_state )
        {
          throw Error( "state mapping for " + model[i].id + " covers 0.." + std::to_string( entries_[i]->source_max() ) +
                       " but the entity has states 0.." + std::to_string( model[i].max_state ) );
        }
      }
    }
    if ( !any )
    {
      throw Error( "abstraction mapping must contain at least one state mapping" );
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& model_name() const noexcept { return model_name_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& entry( std::size_t i ) const { return entries_[i]; }
  bool is_identity( std::size_t i ) const { return !entries_[i].has_value(); }

  State apply( std::size_t entity, State s ) const { return entries_[entity] ? ( *entries_[entity] )( s ) : s; }
  State source_max( std::size_t entity ) const { return source_max_[entity]; }
  State target_max( std::size_t entity ) const
  {
    return entries_[entity] ? entries_[entity]->target_max() : source_max_[entity];
  }

  /// Matches the ranges of `m` entity for entity.
  bool fits( const Mvn& m ) const
  {
    if ( m.size() != size() )
    {
      return false;
    }
    for ( std::size_t i = 0; i < size(); ++i )
    {
      if ( m[i].max_state != source_max_[i] )
      {
        return false;
      }
    }
    return true;
  }

  friend bool operator==( const AbstractionMapping& a, const AbstractionMapping& b )
  {
    return a.entries_ == b.entries_ && a.source_max_ == b.source_max_;
  }

private:
  std::string name_;
  std::string model_name_;
  std::vector<Entry> entries_;
  std::vector<State> source_max_;
};

/// "<phi_CI, phi_Cro, I_CII, I_N>"
inline std::string describe( const AbstractionMapping& phi, const Mvn& m )
{
  std::string out = "<";
  for ( std::size_t i = 0; i < phi.size(); ++i )
  {
    if ( i > 0 )
    {
      out += ", ";
    }
    out += phi.is_identity( i ) ? "I_" + m[i].id : m[i].id + " " + to_string( *phi.entry( i ) );
  }
  return out + ">";
}

/// Structure of the abstract models: same entities and inputs, ranges from φ's codomains, empty tables.
inline Mvn abstract_skeleton( const Mvn& m, const AbstractionMapping& phi )
{
  Mvn out;
  out.name = m.name;
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    Entity e;
    e.id = m[i].id;
    e.max_state = phi.target_max( i );
    e.inputs = m[i].inputs;
    out.entities.push_back( std::move( e ) );
  }
  for ( std::size_t i = 0; i < out.size(); ++i )
  {
    out[i].table.assign( row_count( out, i ), kNoRow );
  }
  return out;
}

inline GlobalState apply_to_state( const AbstractionMapping& phi, const GlobalState& s )
{
  if ( s.size() != phi.size() )
  {
    throw Error( "global state does not fit the abstraction mapping" );
  }
  GlobalState out = s;
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    if ( s[i] < 0 || s[i] > phi.source_max( i ) )
    {
      throw Error( "global state does not fit the abstraction mapping" );
    }
    out[i] = phi.apply( i, s[i] );
  }
  return out;
}

/// S^A corresponds to S iff S^A = φ(S).
inline bool corresponding_states( const GlobalState& abstract_state, const GlobalState& concrete_state,
                                  const AbstractionMapping& phi )
{
  return apply_to_state( phi, concrete_state ) == abstract_state;
}

/// Indices i < j of mapped states that agree but step to different states.
struct ContradictoryStep
{
  std::size_t first;
  std::size_t second;
  GlobalState state;

  friend bool operator==( const ContradictoryStep&, const ContradictoryStep& ) = default;
};

class AbstractedTraceResult
{
public:
  explicit AbstractedTraceResult( Trace t ) : value_( std::move( t ) ) {}
  explicit AbstractedTraceResult( ContradictoryStep w ) : value_( std::move( w ) ) {}

  bool valid() const noexcept { return std::holds_alternative<Trace>( value_ ); }
  const Trace& trace() const { return std::get<Trace>( value_ ); }
  const ContradictoryStep& witness() const { return std::get<ContradictoryStep>( value_ ); }

private:
  std::variant<Trace, ContradictoryStep> value_;
};

/*! \brief Lifts φ to a canonical trace.

  Invalid if two equal mapped states among S0..S(n-1) have different mapped
  successors; the first such pair (i, j) in lexicographic order is the
  witness. Otherwise the mapped trace is cut at the first repeated state.
*/
inline AbstractedTraceResult abstract_trace( const AbstractionMapping& phi, const Trace& t )
{
  if ( !is_canonical( t ) )
  {
    throw Error( "abstract_trace requires a canonical trace" );
  }
  std::vector<GlobalState> mapped;
  mapped.reserve( t.states.size() );
  for ( const auto& s : t.states )
  {
    mapped.push_back( apply_to_state( phi, s ) );
  }

  const auto n = mapped.size() - 1;
  for ( std::size_t i = 0; i < n; ++i )
  {
    for ( std::size_t j = i + 1; j < n; ++j )
    {
      if ( mapped[i] == mapped[j] && mapped[i + 1] != mapped[j + 1] )
      {
        return AbstractedTraceResult( ContradictoryStep{ i, j, mapped[i] } );
      }
    }
  }

  std::set<GlobalState> seen;
  Trace out;
  for ( auto& s : mapped )
  {
    const bool repeat = !seen.insert( s ).second;
    out.states.push_back( std::move( s ) );
    if ( repeat )
    {
      break;
    }
  }
  return AbstractedTraceResult( std::move( out ) );
}

/// φ(L): the valid abstracted traces, deduplicated.
inline TraceSet abstract_language( const AbstractionMapping& phi, const TraceSet& traces )
{
  TraceSet out;
  for ( const auto& t : traces )
  {
    auto r = abstract_trace( phi, t );
    if ( r.valid() )
    {
      out.insert( r.trace() );
    }
  }
  return out;
}

/* the abstraction relation */

struct AbstractionCheck
{
  enum class Outcome
  {
    holds,
    structure_mismatch,
    not_included
  };

  Outcome outcome = Outcome::holds;
  std::string reason;
  std::optional<Trace> witness; // first trace of the abstract model missing from φ(L(m))

  bool holds() const noexcept { return outcome == Outcome::holds; }
};

/// Same entities, same neighbourhoods, abstract ranges equal φ's codomains, φ built for `m`.
inline std::optional<std::string> structure_mismatch( const Mvn& a, const Mvn& m, const AbstractionMapping& phi )
{
  if ( !phi.fits( m ) )
  {
    return "abstraction mapping does not fit the ranges of " + m.name;
  }
  if ( a.size() != m.size() )
  {
    return "entity counts differ (" + std::to_string( a.size() ) + " vs " + std::to_string( m.size() ) + ")";
  }
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    if ( a[i].id != m[i].id )
    {
      return "entity " + std::to_string( i + 1 ) + " is " + a[i].id + " in " + a.name + " but " + m[i].id + " in " +
             m.name;
    }
    if ( a[i].inputs != m[i].inputs )
    {
      return "neighbourhood of " + a[i].id + " differs";
    }
    if ( a[i].max_state != phi.target_max( i ) )
    {
      return "entity " + a[i].id + " has states 0.." + std::to_string( a[i].max_state ) + " but the mapping yields 0.." +
             std::to_string( phi.target_max( i ) );
    }
  }
  for ( const auto* model : { &m, &a } )
  {
    if ( const auto v = validate_model( *model ); !v.empty() )
    {
      return model->name + " is not well formed: " + v.front().message;
    }
  }
  return std::nullopt;
}

/// Checks L(a) ⊆ φ(L(m)) against a precomputed φ(L(m)).
inline AbstractionCheck check_abstraction( const Mvn& a, const Mvn& m, const AbstractionMapping& phi,
                                           const TraceSet& abstracted, const Limits& limits = {} )
{
  using Outcome = AbstractionCheck::Outcome;
  if ( auto why = structure_mismatch( a, m, phi ) )
  {
    return { Outcome::structure_mismatch, *why, std::nullopt };
  }
  for ( const auto& t : language( a, limits ) )
  {
    if ( !abstracted.contains( t ) )
    {
      return { Outcome::not_included, "trace of " + a.name + " not produced by abstracting " + m.name, t };
    }
  }
  return {};
}

inline AbstractionCheck check_abstraction( const Mvn& a, const Mvn& m, const AbstractionMapping& phi,
                                           const Limits& limits = {} )
{
  if ( auto why = structure_mismatch( a, m, phi ) )
  {
    return { AbstractionCheck::Outcome::structure_mismatch, *why, std::nullopt };
  }
  return check_abstraction( a, m, phi, abstract_language( phi, language( m, limits ) ), limits );
}

struct ExactCheck
{
  AbstractionCheck abstraction;
  bool all_valid = false;        // every abstracted trace of m is valid
  std::optional<Trace> invalid;  // a concrete trace whose abstraction is invalid
  std::optional<Trace> uncovered; // a trace of φ(L(m)) missing from L(a)

  bool exact() const noexcept { return abstraction.holds() && all_valid && !uncovered; }
};

/// L(a) = φ(L(m)) and every abstracted trace of m is valid.
inline ExactCheck check_exact( const Mvn& a, const Mvn& m, const AbstractionMapping& phi, const Limits& limits = {} )
{
  ExactCheck out;
  if ( auto why = structure_mismatch( a, m, phi ) )
  {
    out.abstraction = { AbstractionCheck::Outcome::structure_mismatch, *why, std::nullopt };
    return out;
  }
  TraceSet abstracted;
  out.all_valid = true;
  for ( const auto& t : language( m, limits ) )
  {
    auto r = abstract_trace( phi, t );
    if ( r.valid() )
    {
      abstracted.insert( r.trace() );
    }
    else if ( out.all_valid )
    {
      out.all_valid = false;
      out.invalid = t;
    }
  }
  out.abstraction = check_abstraction( a, m, phi, abstracted, limits );
  if ( out.abstraction.holds() )
  {
    const auto own = language( a, limits );
    for ( const auto& t : abstracted )
    {
      if ( !own.contains( t ) )
      {
        out.uncovered = t;
        break;
      }
    }
  }
  return out;
}

/*! \brief Concrete evidence for abstract reachability.

  For a verified abstraction `a` of `m`, returns concrete states S1 ->* S2
  with φ(S1) = s1 and φ(S2) = s2, or nothing when s2 is not reachable from s1
  in `a`. Non-reachability in `a` says nothing about `m`, so there is no
  negative counterpart.
*/
inline std::optional<std::pair<GlobalState, GlobalState>> transfer_reachability( const Mvn& a, const Mvn& m,
                                                                                 const AbstractionMapping& phi,
                                                                                 const GlobalState& s1,
                                                                                 const GlobalState& s2,
                                                                                 const Limits& limits = {} )
{
  const auto abstract_trace_of_s1 = trace_from( a, s1 );
  if ( std::find( abstract_trace_of_s1.states.begin(), abstract_trace_of_s1.states.end(), s2 ) ==
       abstract_trace_of_s1.states.end() )
  {
    return std::nullopt;
  }
  for ( const auto& t : language( m, limits ) )
  {
    auto r = abstract_trace( phi, t );
    if ( !r.valid() || r.trace() != abstract_trace_of_s1 )
    {
      continue;
    }
    for ( const auto& s : t.states )
    {
      if ( apply_to_state( phi, s ) == s2 )
      {
        return std::pair{ t.states.front(), s };
      }
    }
  }
  throw Error( a.name + " is not an abstraction of " + m.name + " under " + phi.name() );
}

} // namespace mvabs
