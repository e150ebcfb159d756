#pragma once

/*!
  \file search.hpp
  \brief Abstraction identification.

  Applying an abstraction mapping to every row of a model's tables gives
  non-deterministic abstract tables. Every abstraction of the model under
  that mapping is one of their deterministic restrictions, so the search only
  visits those candidates. The abstracted language of the concrete model is
  computed once and shared by all candidate checks.

  `brute_force_abstractions` ignores the tables and tries every deterministic
  model over the abstract structure. It is a test oracle for small inputs.
*/

#include "abstraction.hpp"
#include "model.hpp"
#include "semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

namespace mvabs
{

/// Abstract table of one entity: every row holds the sorted set of possible outputs.
struct CandidateTable
{
  std::vector<std::vector<State>> outputs;
  std::uint64_t choices = 1;
};

struct CandidateTableSet
{
  Mvn skeleton; // abstract structure; tables hold the smallest choice of every row
  std::vector<CandidateTable> tables;
  std::uint64_t count = 1; // saturating

  bool deterministic() const noexcept { return count == 1; }
};

inline CandidateTableSet abstract_tables( const Mvn& m, const AbstractionMapping& phi )
{
  if ( !phi.fits( m ) )
  {
    throw Error( "abstraction mapping does not fit model " + m.name );
  }
  CandidateTableSet c;
  c.skeleton = abstract_skeleton( m, phi );

  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    const auto& e = m[i];
    CandidateTable t;
    t.outputs.resize( c.skeleton[i].table.size() );

    std::vector<State> in;
    for ( std::size_t r = 0; r < e.table.size(); ++r )
    {
      in = row_inputs( m, i, r );
      for ( std::size_t col = 0; col < in.size(); ++col )
      {
        in[col] = phi.apply( e.inputs[col], in[col] );
      }
      auto& set = t.outputs[row_index( c.skeleton, i, in )];
      const auto out = phi.apply( i, e.table[r] );
      if ( std::find( set.begin(), set.end(), out ) == set.end() )
      {
        set.insert( std::upper_bound( set.begin(), set.end(), out ), out );
      }
    }
    for ( std::size_t r = 0; r < t.outputs.size(); ++r )
    {
      t.choices = detail::saturating_mul( t.choices, t.outputs[r].size() );
      c.skeleton[i].table[r] = t.outputs[r].front();
    }
    c.count = detail::saturating_mul( c.count, t.choices );
    c.tables.push_back( std::move( t ) );
  }
  return c;
}

/*! \brief Random-access view of the deterministic restrictions of a candidate set.

  Candidate `k` is the k-th model in lexicographic order over
  (entity, row, output value): the first row with a choice is the most
  significant digit.
*/
class CandidateEnumerator
{
public:
  explicit CandidateEnumerator( const CandidateTableSet& c ) : set_( &c )
  {
    for ( std::size_t i = 0; i < c.tables.size(); ++i )
    {
      for ( std::size_t r = 0; r < c.tables[i].outputs.size(); ++r )
      {
        if ( c.tables[i].outputs[r].size() > 1 )
        {
          points_.push_back( { i, r } );
        }
      }
    }
  }

  std::uint64_t size() const noexcept { return set_->count; }

  Mvn operator[]( std::uint64_t index ) const
  {
    Mvn out = set_->skeleton;
    out.name = set_->skeleton.name + "_A" + std::to_string( index + 1 );
    for ( std::size_t p = points_.size(); p-- > 0; )
    {
      const auto [entity, row] = points_[p];
      const auto& options = set_->tables[entity].outputs[row];
      out[entity].table[row] = options[index % options.size()];
      index /= options.size();
    }
    return out;
  }

  class iterator
  {
  public:
    using value_type = Mvn;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator( const CandidateEnumerator* e, std::uint64_t i ) : e_( e ), i_( i ) {}

    Mvn operator*() const { return ( *e_ )[i_]; }
    iterator& operator++()
    {
      ++i_;
      return *this;
    }
    iterator operator++( int )
    {
      auto tmp = *this;
      ++i_;
      return tmp;
    }
    bool operator==( const iterator& o ) const { return i_ == o.i_; }
    std::uint64_t index() const noexcept { return i_; }

  private:
    const CandidateEnumerator* e_ = nullptr;
    std::uint64_t i_ = 0;
  };

  iterator begin() const { return { this, 0 }; }
  iterator end() const { return { this, size() }; }

private:
  struct ChoicePoint
  {
    std::size_t entity;
    std::size_t row;
  };

  const CandidateTableSet* set_;
  std::vector<ChoicePoint> points_;
};

/// Refuses candidate sets larger than the guard.
inline CandidateEnumerator enumerate_candidates( const CandidateTableSet& c, const Limits& limits = {} )
{
  detail::check_guard( "candidate", c.count, limits.max_candidates );
  return CandidateEnumerator( c );
}

/// A row-wise subset of the candidate tables with the same structure.
inline bool is_candidate( const Mvn& a, const CandidateTableSet& c )
{
  if ( !same_structure( a, c.skeleton ) )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    if ( a[i].max_state != c.skeleton[i].max_state || a[i].table.size() != c.tables[i].outputs.size() )
    {
      return false;
    }
    for ( std::size_t r = 0; r < a[i].table.size(); ++r )
    {
      const auto& set = c.tables[i].outputs[r];
      if ( !std::binary_search( set.begin(), set.end(), a[i].table[r] ) )
      {
        return false;
      }
    }
  }
  return true;
}

namespace detail
{

struct EncodedTraceHash
{
  std::size_t operator()( const std::vector<std::uint32_t>& v ) const noexcept
  {
    std::uint64_t h = 1469598103934665603ull;
    for ( auto x : v )
    {
      h = ( h ^ x ) * 1099511628211ull;
    }
    return static_cast<std::size_t>( h );
  }
};

using EncodedTraceSet = std::unordered_set<std::vector<std::uint32_t>, EncodedTraceHash>;

/// φ(L(m)) with states encoded over the abstract skeleton.
inline EncodedTraceSet encoded_abstract_language( const Mvn& m, const AbstractionMapping& phi, const Mvn& skeleton,
                                                  const Limits& limits )
{
  EncodedTraceSet out;
  for ( const auto& t : abstract_language( phi, language( m, limits ) ) )
  {
    std::vector<std::uint32_t> enc;
    enc.reserve( t.states.size() );
    for ( const auto& s : t.states )
    {
      enc.push_back( static_cast<std::uint32_t>( encode_state( skeleton, s ) ) );
    }
    out.insert( std::move( enc ) );
  }
  return out;
}

/// First initial state of `a` whose trace is not in `abstracted`.
inline std::optional<std::uint32_t> first_uncovered( const Mvn& a, const EncodedTraceSet& abstracted,
                                                     const Limits& limits )
{
  const SuccessorArray succ( a, limits );
  std::vector<std::uint32_t> orbit;
  std::vector<std::uint8_t> scratch( succ.size(), 0 );
  for ( std::uint32_t s = 0; s < succ.size(); ++s )
  {
    succ.orbit( s, orbit, scratch );
    if ( !abstracted.contains( orbit ) )
    {
      return s;
    }
  }
  return std::nullopt;
}

} // namespace detail

struct CandidateVerdict
{
  std::uint64_t index;
  bool holds;
  std::optional<Trace> witness;
};

struct SearchOptions
{
  Limits limits;
  unsigned workers = 1;
  bool record_verdicts = false;
};

struct SearchReport
{
  std::uint64_t candidate_count = 0;
  std::vector<Mvn> abstractions;           // in candidate order
  std::vector<std::uint64_t> indices;      // candidate index of each abstraction
  std::vector<CandidateVerdict> verdicts;  // every candidate, when recorded
};

/// A(m, φ): the candidates whose language is included in φ(L(m)).
inline SearchReport find_abstractions( const Mvn& m, const AbstractionMapping& phi, const SearchOptions& options = {} )
{
  const auto c = abstract_tables( m, phi );
  const auto candidates = enumerate_candidates( c, options.limits );
  const auto abstracted = detail::encoded_abstract_language( m, phi, c.skeleton, options.limits );

  const auto n = candidates.size();
  std::vector<std::int64_t> uncovered( n, -1 );
  auto check_range = [&]( std::uint64_t lo, std::uint64_t hi ) {
    for ( auto k = lo; k < hi; ++k )
    {
      if ( auto s = detail::first_uncovered( candidates[k], abstracted, options.limits ) )
      {
        uncovered[k] = *s;
      }
    }
  };

  const auto workers = std::max<std::uint64_t>( 1, std::min<std::uint64_t>( options.workers, n ) );
  if ( workers == 1 )
  {
    check_range( 0, n );
  }
  else
  {
    std::vector<std::jthread> pool;
    const auto chunk = ( n + workers - 1 ) / workers;
    for ( std::uint64_t w = 0; w < workers; ++w )
    {
      pool.emplace_back( check_range, std::min( n, w * chunk ), std::min( n, ( w + 1 ) * chunk ) );
    }
  }

  SearchReport report;
  report.candidate_count = n;
  for ( std::uint64_t k = 0; k < n; ++k )
  {
    const bool holds = uncovered[k] < 0;
    if ( holds )
    {
      report.abstractions.push_back( candidates[k] );
      report.indices.push_back( k );
    }
    if ( options.record_verdicts )
    {
      CandidateVerdict v{ k, holds, std::nullopt };
      if ( !holds )
      {
        const auto a = candidates[k];
        v.witness = trace_from( a, decode_state( a, static_cast<std::uint64_t>( uncovered[k] ) ) );
      }
      report.verdicts.push_back( std::move( v ) );
    }
  }
  return report;
}

/// The unique candidate if there is exactly one; it is then an exact abstraction.
inline std::optional<Mvn> find_exact( const Mvn& m, const AbstractionMapping& phi )
{
  const auto c = abstract_tables( m, phi );
  if ( !c.deterministic() )
  {
    return std::nullopt;
  }
  auto out = c.skeleton;
  out.name = m.name + "_A1";
  return out;
}

/// Every abstraction mapping of `m`: per non-Boolean entity the identity or any
/// surjection onto 2..m_i states, excluding the all-identity family. Order is
/// lexicographic with identity first.
inline std::vector<AbstractionMapping> enumerate_abstraction_mappings( const Mvn& m, const Limits& limits = {} )
{
  std::vector<std::vector<AbstractionMapping::Entry>> options( m.size() );
  std::uint64_t total = 1;
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    options[i].push_back( std::nullopt );
    for ( std::size_t n = 2; n < m[i].range_size(); ++n )
    {
      for ( auto& sm : enumerate_state_mappings( m[i].range_size(), n ) )
      {
        options[i].push_back( std::move( sm ) );
      }
    }
    total = detail::saturating_mul( total, options[i].size() );
  }
  if ( total <= 1 )
  {
    throw Error( "model " + m.name + " has no entity with more than two states; no abstraction mapping exists" );
  }
  detail::check_guard( "mapping family", total - 1, limits.max_candidates );

  std::vector<AbstractionMapping> out;
  std::vector<std::size_t> pick( m.size(), 0 );
  for ( std::uint64_t k = 0; k < total; ++k )
  {
    if ( k > 0 )
    {
      std::vector<AbstractionMapping::Entry> entries;
      for ( std::size_t i = 0; i < m.size(); ++i )
      {
        entries.push_back( options[i][pick[i]] );
      }
      out.emplace_back( m, std::move( entries ), "phi" + std::to_string( k ) );
    }
    for ( std::size_t i = m.size(); i-- > 0; )
    {
      if ( ++pick[i] < options[i].size() )
      {
        break;
      }
      pick[i] = 0;
    }
  }
  return out;
}

struct MappingFamilyResult
{
  AbstractionMapping mapping;
  std::uint64_t candidate_count = 0;
  bool guard_exceeded = false;
  std::vector<Mvn> abstractions;
};

struct AllMappingsReport
{
  std::vector<MappingFamilyResult> families;

  bool any_guard_exceeded() const
  {
    return std::any_of( families.begin(), families.end(), []( const auto& f ) { return f.guard_exceeded; } );
  }
  /// No abstraction under any mapping, with every family fully searched.
  bool none_found() const
  {
    return !any_guard_exceeded() &&
           std::all_of( families.begin(), families.end(), []( const auto& f ) { return f.abstractions.empty(); } );
  }
};

inline AllMappingsReport find_abstractions_all_mappings( const Mvn& m, const SearchOptions& options = {} )
{
  AllMappingsReport report;
  for ( auto& phi : enumerate_abstraction_mappings( m, options.limits ) )
  {
    MappingFamilyResult r{ phi, 0, false, {} };
    r.candidate_count = abstract_tables( m, phi ).count;
    if ( r.candidate_count > options.limits.max_candidates )
    {
      r.guard_exceeded = true;
    }
    else
    {
      auto found = find_abstractions( m, phi, options );
      r.abstractions = std::move( found.abstractions );
    }
    report.families.push_back( std::move( r ) );
  }
  return report;
}

/// Number of deterministic models over the abstract structure of (m, φ).
inline std::uint64_t brute_force_space( const Mvn& m, const AbstractionMapping& phi )
{
  const auto skeleton = abstract_skeleton( m, phi );
  std::uint64_t total = 1;
  for ( std::size_t i = 0; i < skeleton.size(); ++i )
  {
    total = detail::saturating_mul(
        total, detail::saturating_pow( skeleton[i].range_size(), skeleton[i].table.size() ) );
  }
  return total;
}

/// Unpruned oracle: checks every deterministic model with the abstract structure.
inline std::vector<Mvn> brute_force_abstractions( const Mvn& m, const AbstractionMapping& phi,
                                                  const Limits& limits = {} )
{
  const auto total = brute_force_space( m, phi );
  detail::check_guard( "brute force", total, limits.max_brute_force );

  auto model = abstract_skeleton( m, phi );
  for ( auto& e : model.entities )
  {
    std::fill( e.table.begin(), e.table.end(), 0 );
  }
  const auto abstracted = abstract_language( phi, language( m, limits ) );

  std::vector<Mvn> out;
  for ( std::uint64_t k = 0; k < total; ++k )
  {
    if ( check_abstraction( model, m, phi, abstracted, limits ).holds() )
    {
      out.push_back( model );
      out.back().name = m.name + "_B" + std::to_string( k + 1 );
    }
    // odometer over all table entries, last entity's last row fastest
    for ( std::size_t i = model.size(); i-- > 0; )
    {
      auto& e = model[i];
      std::size_t r = e.table.size();
      bool carried = true;
      while ( carried && r-- > 0 )
      {
        carried = ++e.table[r] > e.max_state;
        if ( carried )
        {
          e.table[r] = 0;
        }
      }
      if ( !carried )
      {
        break;
      }
    }
  }
  return out;
}

} // namespace mvabs
