#pragma once

// JSON forms of library results, as emitted by `mvabs --json`.
//
//   model     {name, entities[{id, max_state, inputs[]}], tables{id: [{inputs[], output}]}}
//   trace     {states[]}
//   attractor {cycle[]}
//   verdict   {holds, witness?}
//   search    {candidate_count, abstractions[], guard_exceeded}
//
// States are written in the model's state notation (digit strings when every
// entity has at most ten states, comma-separated otherwise).

#include <mvabs/mvabs.hpp>

#include <json.hpp>

#include <string>

namespace mvabs::report
{

using json = nlohmann::ordered_json;

inline json model_to_json( const Mvn& m )
{
  json entities = json::array();
  json tables = json::object();
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    const auto& e = m[i];
    json inputs = json::array();
    for ( auto in : e.inputs )
    {
      inputs.push_back( m[in].id );
    }
    entities.push_back( { { "id", e.id }, { "max_state", e.max_state }, { "inputs", inputs } } );

    json rows = json::array();
    for ( std::size_t r = 0; r < e.table.size(); ++r )
    {
      rows.push_back( { { "inputs", row_inputs( m, i, r ) }, { "output", e.table[r] } } );
    }
    tables[e.id] = rows;
  }
  return { { "name", m.name }, { "entities", entities }, { "tables", tables } };
}

inline Mvn model_from_json( const json& j )
{
  Mvn m;
  m.name = j.at( "name" ).get<std::string>();
  for ( const auto& je : j.at( "entities" ) )
  {
    Entity e;
    e.id = je.at( "id" ).get<std::string>();
    e.max_state = je.at( "max_state" ).get<State>();
    m.entities.push_back( std::move( e ) );
  }
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    for ( const auto& id : j.at( "entities" )[i].at( "inputs" ) )
    {
      const auto idx = m.find( id.get<std::string>() );
      if ( !idx )
      {
        throw Error( "unknown input '" + id.get<std::string>() + "'" );
      }
      m[i].inputs.push_back( *idx );
    }
  }
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    m[i].table.assign( row_count( m, i ), kNoRow );
    for ( const auto& row : j.at( "tables" ).at( m[i].id ) )
    {
      const auto in = row.at( "inputs" ).get<std::vector<State>>();
      if ( in.size() != m[i].inputs.size() )
      {
        throw Error( "row arity mismatch in table " + m[i].id );
      }
      m[i].table[row_index( m, i, in )] = row.at( "output" ).get<State>();
    }
  }
  if ( const auto v = validate_model( m ); !v.empty() )
  {
    throw Error( v.front().message );
  }
  return m;
}

inline json trace_to_json( const Mvn& m, const Trace& t )
{
  json states = json::array();
  for ( const auto& s : t.states )
  {
    states.push_back( format_state( m, s ) );
  }
  return { { "states", states } };
}

inline json attractor_to_json( const Mvn& m, const Attractor& a )
{
  json cycle = json::array();
  for ( const auto& s : a.cycle )
  {
    cycle.push_back( format_state( m, s ) );
  }
  return { { "cycle", cycle } };
}

inline json mapping_to_json( const AbstractionMapping& phi, const Mvn& m )
{
  json entries = json::object();
  for ( std::size_t i = 0; i < phi.size(); ++i )
  {
    if ( phi.is_identity( i ) )
    {
      entries[m[i].id] = "identity";
    }
    else
    {
      const auto image = phi.entry( i )->image();
      entries[m[i].id] = std::vector<State>( image.begin(), image.end() );
    }
  }
  return { { "name", phi.name() }, { "model", m.name }, { "entities", entries } };
}

inline json verdict_to_json( const Mvn& a, const AbstractionCheck& c )
{
  json j = { { "holds", c.holds() } };
  if ( c.outcome == AbstractionCheck::Outcome::structure_mismatch )
  {
    j["structure_mismatch"] = c.reason;
  }
  if ( c.witness )
  {
    j["witness"] = trace_to_json( a, *c.witness );
  }
  return j;
}

inline json search_to_json( const SearchReport& r, const CandidateTableSet& c )
{
  json abstractions = json::array();
  for ( const auto& a : r.abstractions )
  {
    abstractions.push_back( model_to_json( a ) );
  }
  json j = { { "candidate_count", r.candidate_count }, { "abstractions", abstractions }, { "guard_exceeded", false } };
  if ( !r.verdicts.empty() )
  {
    json verdicts = json::array();
    for ( const auto& v : r.verdicts )
    {
      json jv = { { "index", v.index }, { "holds", v.holds } };
      if ( v.witness )
      {
        jv["witness"] = trace_to_json( c.skeleton, *v.witness );
      }
      verdicts.push_back( jv );
    }
    j["verdicts"] = verdicts;
  }
  return j;
}

inline json guard_to_json( const GuardExceeded& g )
{
  return { { "candidate_count", g.count() },
           { "abstractions", json::array() },
           { "guard_exceeded", true },
           { "guard", g.guard() },
           { "limit", g.limit() } };
}

} // namespace mvabs::report
