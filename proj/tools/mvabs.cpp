// mvabs: command-line front end for multi-valued network abstraction.
//
// Exit status: 0 success / holds, 1 check failed / nothing found,
//              2 usage or parse error, 3 guard exceeded.

#include "report.hpp"

#include <mvabs/mvabs.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace
{

using namespace mvabs;
using report::json;

enum Exit : int
{
  ok = 0,
  failed = 1,
  usage = 2,
  guard = 3
};

struct Options
{
  bool json = false;
  std::string dot;
  Limits limits;
  unsigned workers = 1;
};

std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
  {
    throw Error( "cannot open " + path );
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parse errors are prefixed with the file name.
class FileError : public Error
{
public:
  using Error::Error;
};

ModelDocument load_model( const std::string& path )
{
  try
  {
    return parse_model_document( read_file( path ) );
  }
  catch ( const ParseError& e )
  {
    throw FileError( path + ":" + std::to_string( e.line() ) + ":" + std::to_string( e.column() ) + ": " +
                     e.message() );
  }
}

AbstractionMapping load_mapping( const std::string& path, const Mvn& m )
{
  try
  {
    return parse_mapping( read_file( path ), m );
  }
  catch ( const ParseError& e )
  {
    throw FileError( path + ":" + std::to_string( e.line() ) + ":" + std::to_string( e.column() ) + ": " +
                     e.message() );
  }
}

void write_dot( const Options& o, const Mvn& m )
{
  if ( o.dot.empty() )
  {
    return;
  }
  std::ofstream out( o.dot );
  if ( !out )
  {
    throw Error( "cannot write " + o.dot );
  }
  out << to_dot( m, o.limits );
}

void print_json( const json& j )
{
  std::cout << j.dump( 2 ) << "\n";
}

std::string join_states( const Mvn& m, const std::vector<GlobalState>& states, const char* sep )
{
  std::string out;
  for ( std::size_t i = 0; i < states.size(); ++i )
  {
    if ( i > 0 )
    {
      out += sep;
    }
    out += format_state( m, states[i] );
  }
  return out;
}

/* commands */

int cmd_validate( const Options& o, const std::string& path )
{
  const auto doc = load_model( path );
  write_dot( o, doc.model );
  if ( o.json )
  {
    print_json( { { "valid", true }, { "model", report::model_to_json( doc.model ) } } );
  }
  else
  {
    std::cout << path << ": ok (" << doc.model.name << ", " << doc.model.size() << " entities, "
              << state_space_size( doc.model ) << " global states)\n";
  }
  return ok;
}

int cmd_trace( const Options& o, const std::string& path, const std::string& from )
{
  const auto m = load_model( path ).model;
  const auto t = trace_from( m, parse_state( m, from ) );
  write_dot( o, m );
  if ( o.json )
  {
    print_json( report::trace_to_json( m, t ) );
  }
  else
  {
    std::cout << join_states( m, t.states, " " ) << "\n";
  }
  return ok;
}

int cmd_attractors( const Options& o, const std::string& path )
{
  const auto m = load_model( path ).model;
  const auto all = attractors( m, o.limits );
  write_dot( o, m );
  if ( o.json )
  {
    json arr = json::array();
    for ( const auto& a : all )
    {
      arr.push_back( report::attractor_to_json( m, a ) );
    }
    print_json( { { "model", m.name }, { "attractors", arr } } );
    return ok;
  }
  for ( const auto& a : all )
  {
    std::cout << join_states( m, a.cycle, " -> " ) << " -> " << format_state( m, a.cycle.front() ) << "\n";
  }
  return ok;
}

int cmd_reach( const Options& o, const std::string& path, const std::string& from, const std::string& to,
               const std::vector<std::string>& via )
{
  const auto m = load_model( path ).model;
  if ( via.empty() )
  {
    const auto s1 = parse_state( m, from );
    const auto s2 = parse_state( m, to );
    const bool holds = reachable( m, s1, s2 );
    if ( o.json )
    {
      print_json( { { "holds", holds } } );
    }
    else
    {
      std::cout << ( holds ? "HOLDS" : "NOT-REACHABLE" ) << "\n";
    }
    return holds ? ok : failed;
  }

  const auto a = load_model( via[0] ).model;
  const auto phi = load_mapping( via[1], m );
  const auto check = check_abstraction( a, m, phi, o.limits );
  if ( !check.holds() )
  {
    std::cerr << "error: " << a.name << " is not an abstraction of " << m.name << " under " << phi.name() << ": "
              << check.reason << "\n";
    return failed;
  }
  const auto s1 = parse_state( a, from );
  const auto s2 = parse_state( a, to );
  const auto evidence = transfer_reachability( a, m, phi, s1, s2, o.limits );
  if ( o.json )
  {
    json j = { { "holds", evidence.has_value() }, { "abstraction", a.name } };
    if ( evidence )
    {
      j["witness"] = { { "from", format_state( m, evidence->first ) }, { "to", format_state( m, evidence->second ) } };
    }
    else
    {
      j["note"] = "inconclusive for the concrete model";
    }
    print_json( j );
  }
  else if ( evidence )
  {
    std::cout << "HOLDS (transferred from abstraction " << a.name << ")\n"
              << "concrete witness: " << format_state( m, evidence->first ) << " ->* "
              << format_state( m, evidence->second ) << " in " << m.name << "\n";
  }
  else
  {
    std::cout << "NOT-REACHABLE in abstraction " << a.name << "; inconclusive for the concrete model\n";
  }
  return evidence ? ok : failed;
}

int cmd_apply( const Options& o, const std::string& model_path, const std::string& map_path )
{
  const auto m = load_model( model_path ).model;
  const auto phi = load_mapping( map_path, m );
  const auto c = abstract_tables( m, phi );

  if ( o.json )
  {
    json tables = json::object();
    json choices = json::object();
    for ( std::size_t i = 0; i < c.skeleton.size(); ++i )
    {
      json rows = json::array();
      for ( std::size_t r = 0; r < c.tables[i].outputs.size(); ++r )
      {
        rows.push_back( { { "inputs", row_inputs( c.skeleton, i, r ) }, { "outputs", c.tables[i].outputs[r] } } );
      }
      tables[c.skeleton[i].id] = rows;
      choices[c.skeleton[i].id] = c.tables[i].choices;
    }
    print_json( { { "mapping", report::mapping_to_json( phi, m ) },
                  { "tables", tables },
                  { "choices", choices },
                  { "candidate_count", c.count } } );
    return ok;
  }

  std::cout << "mapping " << phi.name() << " for " << m.name << ": " << describe( phi, m ) << "\n";
  for ( std::size_t i = 0; i < c.skeleton.size(); ++i )
  {
    const auto& e = c.skeleton[i];
    std::cout << "\ntable " << e.id << " (" << c.tables[i].choices << ( c.tables[i].choices == 1 ? " choice" : " choices" )
              << ")\n";
    for ( std::size_t r = 0; r < c.tables[i].outputs.size(); ++r )
    {
      for ( auto v : row_inputs( c.skeleton, i, r ) )
      {
        std::cout << v << ' ';
      }
      const auto& outs = c.tables[i].outputs[r];
      std::cout << "-> ";
      if ( outs.size() == 1 )
      {
        std::cout << outs.front() << "\n";
        continue;
      }
      std::cout << "{";
      for ( std::size_t k = 0; k < outs.size(); ++k )
      {
        std::cout << ( k > 0 ? "," : "" ) << outs[k];
      }
      std::cout << "}  *\n";
    }
  }
  std::cout << "\ncandidates: " << c.count << "\n";
  return ok;
}

int cmd_check( const Options& o, const std::string& abstract_path, const std::string& model_path,
               const std::string& map_path )
{
  const auto a = load_model( abstract_path ).model;
  const auto m = load_model( model_path ).model;
  const auto phi = load_mapping( map_path, m );
  const auto exact = check_exact( a, m, phi, o.limits );
  const auto& c = exact.abstraction;
  write_dot( o, a );

  if ( o.json )
  {
    auto j = report::verdict_to_json( a, c );
    j["exact"] = exact.exact();
    print_json( j );
    return c.holds() ? ok : failed;
  }

  using Outcome = AbstractionCheck::Outcome;
  switch ( c.outcome )
  {
  case Outcome::holds:
    std::cout << "HOLDS: " << a.name << " abstracts " << m.name << " under " << phi.name() << "\n";
    if ( exact.exact() )
    {
      std::cout << "exact: yes\n";
    }
    else if ( !exact.all_valid )
    {
      std::cout << "exact: no (invalid abstracted trace from " << join_states( m, exact.invalid->states, " " ) << ")\n";
    }
    else
    {
      std::cout << "exact: no (" << join_states( a, exact.uncovered->states, " " ) << " missing from " << a.name
                << ")\n";
    }
    return ok;
  case Outcome::structure_mismatch:
    std::cout << "STRUCTURE-MISMATCH: " << c.reason << "\n";
    return failed;
  case Outcome::not_included:
    std::cout << "FAILS: " << a.name << " does not abstract " << m.name << " under " << phi.name() << "\n"
              << "witness: " << join_states( a, c.witness->states, " " ) << "\n";
    return failed;
  }
  return failed;
}

int cmd_find( const Options& o, const std::string& model_path, const std::string& map_path, bool oracle )
{
  const auto m = load_model( model_path ).model;
  const auto phi = load_mapping( map_path, m );
  const auto c = abstract_tables( m, phi );

  SearchReport r;
  try
  {
    r = find_abstractions( m, phi, { o.limits, o.workers, o.json } );
  }
  catch ( const GuardExceeded& g )
  {
    if ( o.json )
    {
      print_json( report::guard_to_json( g ) );
    }
    std::cerr << "error: " << g.what() << "\n";
    return guard;
  }

  json oracle_json;
  bool agree = true;
  std::string oracle_line;
  if ( oracle )
  {
    try
    {
      const auto brute = brute_force_abstractions( m, phi, o.limits );
      agree = brute.size() == r.abstractions.size() &&
              std::equal( brute.begin(), brute.end(), r.abstractions.begin(), same_network );
      oracle_json = { { "ran", true }, { "models", brute_force_space( m, phi ) }, { "agrees", agree } };
      oracle_line = "oracle: brute force over " + std::to_string( brute_force_space( m, phi ) ) + " models " +
                    ( agree ? "agrees" : "DISAGREES" );
    }
    catch ( const GuardExceeded& g )
    {
      oracle_json = { { "ran", false }, { "reason", g.what() } };
      oracle_line = std::string( "oracle: skipped (" ) + g.what() + ")";
    }
  }

  if ( o.json )
  {
    auto j = report::search_to_json( r, c );
    if ( oracle )
    {
      j["oracle"] = oracle_json;
    }
    print_json( j );
  }
  else
  {
    std::cout << "candidates: " << r.candidate_count << "\n"
              << "abstractions: " << r.abstractions.size() << "\n";
    if ( oracle )
    {
      std::cout << oracle_line << "\n";
    }
    for ( const auto& a : r.abstractions )
    {
      std::cout << "\n" << serialize_model( a );
    }
  }
  if ( !agree )
  {
    return failed;
  }
  return r.abstractions.empty() ? failed : ok;
}

int cmd_find_exact( const Options& o, const std::string& model_path, const std::string& map_path )
{
  const auto m = load_model( model_path ).model;
  const auto phi = load_mapping( map_path, m );
  const auto c = abstract_tables( m, phi );
  const auto exact = find_exact( m, phi );
  if ( o.json )
  {
    json j = { { "candidate_count", c.count }, { "exact", exact.has_value() } };
    if ( exact )
    {
      j["abstraction"] = report::model_to_json( *exact );
    }
    print_json( j );
  }
  else if ( exact )
  {
    std::cout << "exact abstraction (unique candidate)\n\n" << serialize_model( *exact );
  }
  else
  {
    std::cout << "no exact abstraction: " << c.count << " candidates\n";
  }
  return exact ? ok : failed;
}

int cmd_find_all( const Options& o, const std::string& model_path )
{
  const auto m = load_model( model_path ).model;
  const auto rep = find_abstractions_all_mappings( m, { o.limits, o.workers, false } );

  std::size_t with = 0;
  for ( const auto& f : rep.families )
  {
    with += f.abstractions.empty() ? 0 : 1;
  }

  if ( o.json )
  {
    json families = json::array();
    for ( const auto& f : rep.families )
    {
      json abstractions = json::array();
      for ( const auto& a : f.abstractions )
      {
        abstractions.push_back( report::model_to_json( a ) );
      }
      families.push_back( { { "mapping", report::mapping_to_json( f.mapping, m ) },
                            { "candidate_count", f.candidate_count },
                            { "abstractions", abstractions },
                            { "guard_exceeded", f.guard_exceeded } } );
    }
    print_json( { { "model", m.name }, { "families", families }, { "no_abstraction", rep.none_found() } } );
  }
  else
  {
    for ( const auto& f : rep.families )
    {
      std::cout << describe( f.mapping, m ) << ": candidates " << f.candidate_count;
      if ( f.guard_exceeded )
      {
        std::cout << ", guard exceeded\n";
        continue;
      }
      std::cout << ", abstractions " << f.abstractions.size() << "\n";
    }
    if ( rep.none_found() )
    {
      std::cout << "no abstraction exists under any mapping\n";
    }
    else
    {
      std::cout << "abstractions found under " << with << " of " << rep.families.size() << " mappings\n";
    }
  }
  if ( with > 0 )
  {
    return ok;
  }
  return rep.any_guard_exceeded() ? guard : failed;
}

int cmd_mappings( const Options& o, std::size_t source, std::size_t target )
{
  const auto all = enumerate_state_mappings( source, target );
  if ( o.json )
  {
    json arr = json::array();
    for ( const auto& sm : all )
    {
      arr.push_back( std::vector<State>( sm.image().begin(), sm.image().end() ) );
    }
    print_json( { { "m", source }, { "n", target }, { "count", all.size() }, { "mappings", arr } } );
    return ok;
  }
  for ( std::size_t k = 0; k < all.size(); ++k )
  {
    std::cout << "(" << k + 1 << ") " << to_string( all[k] ) << "\n";
  }
  return ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Abstraction analysis for multi-valued networks" };
  app.require_subcommand( 1 );

  Options o;
  app.add_flag( "--json", o.json, "Machine-readable output" );
  app.add_option( "--max-states", o.limits.max_state_space, "State space guard" );
  app.add_option( "--max-candidates", o.limits.max_candidates, "Candidate model guard" );
  app.add_option( "--max-brute-force", o.limits.max_brute_force, "Brute-force oracle guard" );
  app.add_option( "--workers", o.workers, "Parallel candidate checks" )->check( CLI::PositiveNumber );

  std::string model, abstract_model, mapping, from, to;
  std::vector<std::string> via;
  bool oracle = false;
  std::size_t source_states = 0, target_states = 0;

  auto* validate = app.add_subcommand( "validate", "Parse and validate a model" );
  validate->add_option( "model", model )->required();
  validate->add_option( "--dot", o.dot, "Write the state transition graph" );

  auto* trace = app.add_subcommand( "trace", "Canonical trace from a state" );
  trace->add_option( "model", model )->required();
  trace->add_option( "--from", from, "Initial state" )->required();
  trace->add_option( "--dot", o.dot, "Write the state transition graph" );

  auto* attr = app.add_subcommand( "attractors", "List attractor cycles" );
  attr->add_option( "model", model )->required();
  attr->add_option( "--dot", o.dot, "Write the state transition graph" );

  auto* reach = app.add_subcommand( "reach", "Reachability between two states" );
  reach->add_option( "model", model )->required();
  reach->add_option( "--from", from )->required();
  reach->add_option( "--to", to )->required();
  reach->add_option( "--via-abstraction", via, "Decide in an abstraction: ABSTRACT.mvn MAPPING.map" )
      ->expected( 2 );

  auto* abs = app.add_subcommand( "abstract", "Abstraction commands" );
  abs->require_subcommand( 1 );

  auto* apply = abs->add_subcommand( "apply", "Non-deterministic abstract tables and candidate count" );
  apply->add_option( "model", model )->required();
  apply->add_option( "mapping", mapping )->required();

  auto* check = abs->add_subcommand( "check", "Check ABSTRACT against MODEL under MAPPING" );
  check->add_option( "abstract", abstract_model )->required();
  check->add_option( "model", model )->required();
  check->add_option( "mapping", mapping )->required();
  check->add_option( "--dot", o.dot, "Write the abstract state transition graph" );

  auto* find = abs->add_subcommand( "find", "All abstractions under a mapping" );
  find->add_option( "model", model )->required();
  find->add_option( "mapping", mapping )->required();
  find->add_flag( "--oracle", oracle, "Cross-check with brute force when the guard permits" );

  auto* find_exact_cmd = abs->add_subcommand( "find-exact", "Exact abstraction, if one exists" );
  find_exact_cmd->add_option( "model", model )->required();
  find_exact_cmd->add_option( "mapping", mapping )->required();

  auto* find_all = abs->add_subcommand( "find-all", "Search under every abstraction mapping" );
  find_all->add_option( "model", model )->required();

  auto* mappings = abs->add_subcommand( "mappings", "List all surjections from M states onto N states" );
  mappings->add_option( "--m", source_states, "Source state count" )->required();
  mappings->add_option( "--n", target_states, "Target state count" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::CallForHelp& e )
  {
    return app.exit( e );
  }
  catch ( const CLI::ParseError& e )
  {
    app.exit( e );
    return usage;
  }

  try
  {
    if ( *validate )
    {
      try
      {
        return cmd_validate( o, model );
      }
      catch ( const FileError& e )
      {
        std::cerr << e.what() << "\n";
        return failed;
      }
    }
    if ( *trace ) return cmd_trace( o, model, from );
    if ( *attr ) return cmd_attractors( o, model );
    if ( *reach ) return cmd_reach( o, model, from, to, via );
    if ( *apply ) return cmd_apply( o, model, mapping );
    if ( *check ) return cmd_check( o, abstract_model, model, mapping );
    if ( *find ) return cmd_find( o, model, mapping, oracle );
    if ( *find_exact_cmd ) return cmd_find_exact( o, model, mapping );
    if ( *find_all ) return cmd_find_all( o, model );
    if ( *mappings ) return cmd_mappings( o, source_states, target_states );
  }
  catch ( const GuardExceeded& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return guard;
  }
  catch ( const FileError& e )
  {
    std::cerr << e.what() << "\n";
    return usage;
  }
  catch ( const Error& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
