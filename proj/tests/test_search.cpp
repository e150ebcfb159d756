#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mvabs;
using namespace mvabs::test;

namespace
{

bool contains_network( const std::vector<Mvn>& v, const Mvn& m )
{
  return std::any_of( v.begin(), v.end(), [&]( const Mvn& x ) { return same_network( x, m ); } );
}

bool same_networks( const std::vector<Mvn>& a, const std::vector<Mvn>& b )
{
  return a.size() == b.size() && std::equal( a.begin(), a.end(), b.begin(), []( const Mvn& x, const Mvn& y ) {
           return same_network( x, y );
         } );
}

// rows of the abstract table computed directly from the concrete table
std::vector<std::set<State>> row_outputs( const Mvn& m, const AbstractionMapping& phi, std::size_t i )
{
  const auto skel = abstract_skeleton( m, phi );
  std::vector<std::set<State>> out( skel[i].table.size() );
  for ( std::size_t r = 0; r < m[i].table.size(); ++r )
  {
    auto in = row_inputs( m, i, r );
    for ( std::size_t c = 0; c < in.size(); ++c )
    {
      in[c] = phi.apply( m[i].inputs[c], in[c] );
    }
    out[row_index( skel, i, in )].insert( phi.apply( i, m[i].table[r] ) );
  }
  return out;
}

} // namespace

TEST_CASE( "abstract tables of Ex1" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto c = abstract_tables( ex1, load_map( "phi_g2.map", ex1 ) );
  CHECK( c.count == 2 );
  CHECK_FALSE( c.deterministic() );
  CHECK( c.tables[0].outputs == std::vector<std::vector<State>>{ { 1 }, { 0 } } );
  CHECK( c.tables[1].outputs == std::vector<std::vector<State>>{ { 0, 1 }, { 1 }, { 0 }, { 0 } } );
  CHECK( c.tables[0].choices == 1 );
  CHECK( c.tables[1].choices == 2 );
}

TEST_CASE( "abstract tables agree with a direct computation" )
{
  std::mt19937 rng( 41 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    const auto m = random_model( rng );
    const auto phi = random_mapping( rng, m );
    const auto c = abstract_tables( m, phi );
    std::uint64_t count = 1;
    for ( std::size_t i = 0; i < m.size(); ++i )
    {
      const auto expect = row_outputs( m, phi, i );
      REQUIRE( c.tables[i].outputs.size() == expect.size() );
      std::uint64_t choices = 1;
      for ( std::size_t r = 0; r < expect.size(); ++r )
      {
        REQUIRE( std::vector<State>( expect[r].begin(), expect[r].end() ) == c.tables[i].outputs[r] );
        choices *= expect[r].size();
      }
      REQUIRE( c.tables[i].choices == choices );
      count *= choices;
    }
    REQUIRE( c.count == count );
  }
}

TEST_CASE( "candidate enumeration order" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto c = abstract_tables( ex1, load_map( "phi_g2.map", ex1 ) );
  const auto e = enumerate_candidates( c );
  REQUIRE( e.size() == 2 );
  CHECK( same_network( e[0], load( "ab1.mvn" ) ) );
  CHECK( same_network( e[1], load( "ex2.mvn" ) ) );
  CHECK( e[0].name == "Ex1_A1" );
  CHECK( e[1].name == "Ex1_A2" );

  std::vector<Mvn> via_iter( e.begin(), e.end() );
  REQUIRE( via_iter.size() == 2 );
  CHECK( via_iter[1] == e[1] );
}

TEST_CASE( "every enumerated candidate is a distinct member of phi(m)" )
{
  std::mt19937 rng( 43 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    const auto m = random_model( rng );
    const auto phi = random_mapping( rng, m );
    const auto c = abstract_tables( m, phi );
    if ( c.count > 512 )
    {
      continue;
    }
    std::set<std::vector<std::vector<State>>> seen;
    for ( const auto& a : enumerate_candidates( c ) )
    {
      REQUIRE( validate_model( a ).empty() );
      REQUIRE( is_candidate( a, c ) );
      std::vector<std::vector<State>> tables;
      for ( const auto& e : a.entities )
      {
        tables.push_back( e.table );
      }
      seen.insert( tables );
    }
    REQUIRE( seen.size() == c.count );
  }
}

TEST_CASE( "is_candidate rejects models outside phi(m)" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto c = abstract_tables( ex1, load_map( "phi_g2.map", ex1 ) );
  CHECK( is_candidate( load( "ex2.mvn" ), c ) );
  auto off = load( "ex2.mvn" );
  off[0].table[0] = 0;
  CHECK_FALSE( is_candidate( off, c ) );
  CHECK_FALSE( is_candidate( ex1, c ) );
}

TEST_CASE( "PL4 candidate count factorizes per entity" )
{
  const auto pl4 = load( "pl4.mvn" );
  const auto c = abstract_tables( pl4, load_map( "phi_pl4.map", pl4 ) );
  CHECK( c.count == 256 );
  CHECK( c.tables[0].choices == 4 );
  CHECK( c.tables[1].choices == 4 );
  CHECK( c.tables[2].choices == 8 );
  CHECK( c.tables[3].choices == 2 );
}

TEST_CASE( "candidate guard" )
{
  const auto pl4 = load( "pl4.mvn" );
  const auto phi = load_map( "phi_pl4.map", pl4 );
  const auto c = abstract_tables( pl4, phi );
  Limits tight;
  tight.max_candidates = 255;
  CHECK_THROWS_AS( enumerate_candidates( c, tight ), GuardExceeded );

  SearchOptions opts;
  opts.limits = tight;
  try
  {
    find_abstractions( pl4, phi, opts );
    FAIL( "expected GuardExceeded" );
  }
  catch ( const GuardExceeded& g )
  {
    CHECK( g.count() == 256 );
    CHECK( g.limit() == 255 );
  }
}

TEST_CASE( "abstractions of the bundled models" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto r1 = find_abstractions( ex1, load_map( "phi_g2.map", ex1 ) );
  CHECK( r1.candidate_count == 2 );
  REQUIRE( r1.abstractions.size() == 1 );
  CHECK( same_network( r1.abstractions[0], load( "ex2.mvn" ) ) );
  CHECK( r1.indices == std::vector<std::uint64_t>{ 1 } );

  const auto pl2 = load( "pl2.mvn" );
  const auto r2 = find_abstractions( pl2, load_map( "phi_cro.map", pl2 ) );
  CHECK( r2.candidate_count == 2 );
  REQUIRE( r2.abstractions.size() == 1 );
  CHECK( same_network( r2.abstractions[0], load( "apl2.mvn" ) ) );

  const auto pl4 = load( "pl4.mvn" );
  const auto r4 = find_abstractions( pl4, load_map( "phi_pl4.map", pl4 ) );
  CHECK( r4.candidate_count == 256 );
  REQUIRE( r4.abstractions.size() == 2 );
  CHECK( contains_network( r4.abstractions, load( "apl4_1.mvn" ) ) );
  CHECK( contains_network( r4.abstractions, load( "apl4_2.mvn" ) ) );

  // the two differ only in CII at (CI, Cro, N) = (0, 1, 1)
  const auto& a = r4.abstractions[0];
  const auto& b = r4.abstractions[1];
  const std::vector<State> row{ 0, 1, 1 };
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    for ( std::size_t r = 0; r < a[i].table.size(); ++r )
    {
      const bool differs = a[i].table[r] != b[i].table[r];
      CHECK( differs == ( i == 2 && r == row_index( a, 2, row ) ) );
    }
  }
}

TEST_CASE( "recorded verdicts carry witnesses" )
{
  const auto ex1 = load( "ex1.mvn" );
  SearchOptions opts;
  opts.record_verdicts = true;
  const auto r = find_abstractions( ex1, load_map( "phi_g2.map", ex1 ), opts );
  REQUIRE( r.verdicts.size() == 2 );
  CHECK_FALSE( r.verdicts[0].holds );
  REQUIRE( r.verdicts[0].witness );
  CHECK( digits( ex1, *r.verdicts[0].witness ) == std::vector<std::string>{ "11", "00", "10", "10" } );
  CHECK( r.verdicts[1].holds );
  CHECK_FALSE( r.verdicts[1].witness );
}

TEST_CASE( "worker count does not change the result" )
{
  const auto pl4 = load( "pl4.mvn" );
  const auto phi = load_map( "phi_pl4.map", pl4 );
  const auto one = find_abstractions( pl4, phi );
  for ( unsigned w : { 2u, 3u, 4u, 16u, 1000u } )
  {
    SearchOptions opts;
    opts.workers = w;
    opts.record_verdicts = true;
    const auto many = find_abstractions( pl4, phi, opts );
    CHECK( many.indices == one.indices );
    CHECK( many.abstractions == one.abstractions );
    CHECK( many.verdicts.size() == 256 );
  }
}

TEST_CASE( "search results agree with the trace-set check" )
{
  std::mt19937 rng( 47 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    const auto m = random_model( rng );
    const auto phi = random_mapping( rng, m );
    const auto c = abstract_tables( m, phi );
    if ( c.count > 256 )
    {
      continue;
    }
    const auto found = find_abstractions( m, phi );
    std::vector<Mvn> expect;
    for ( const auto& a : enumerate_candidates( c ) )
    {
      if ( check_abstraction( a, m, phi ).holds() )
      {
        expect.push_back( a );
      }
    }
    REQUIRE( found.abstractions == expect );
  }
}

TEST_CASE( "exact abstractions" )
{
  const auto ex1 = load( "ex1.mvn" );
  CHECK_FALSE( find_exact( ex1, load_map( "phi_g2.map", ex1 ) ) );

  const auto tri = parse_model( "mvn Tri\nentity x states 0..2 inputs x\ntable x\n0 -> 1\n1 -> 2\n2 -> 1\n" );
  const AbstractionMapping merge( tri, { StateMapping( { 0, 1, 1 } ) } );
  const auto e = find_exact( tri, merge );
  REQUIRE( e );
  CHECK( e->name == "Tri_A1" );
  CHECK( e->entities[0].table == std::vector<State>{ 1, 1 } );
  CHECK( check_exact( *e, tri, merge ).exact() );
}

TEST_CASE( "all mappings" )
{
  const auto ex3 = load( "ex3.mvn" );
  const auto r3 = find_abstractions_all_mappings( ex3 );
  CHECK( r3.families.size() == 6 );
  CHECK( r3.none_found() );

  const auto ex1 = load( "ex1.mvn" );
  const auto r1 = find_abstractions_all_mappings( ex1 );
  CHECK( r1.families.size() == 6 );
  CHECK_FALSE( r1.none_found() );
  const auto phi = load_map( "phi_g2.map", ex1 );
  bool seen = false;
  for ( const auto& f : r1.families )
  {
    if ( f.mapping.entry( 1 ) == phi.entry( 1 ) )
    {
      seen = true;
      CHECK( contains_network( f.abstractions, load( "ex2.mvn" ) ) );
    }
  }
  CHECK( seen );

  const auto mappings = enumerate_abstraction_mappings( load( "pl4.mvn" ) );
  CHECK( mappings.size() == ( 1 + 6 ) * ( 1 + 14 + 36 ) - 1 );
  CHECK( mappings.front().name() == "phi1" );

  const auto boolean = parse_model( "mvn B\nentity x states 0..1 inputs x\ntable x\n0 -> 1\n1 -> 0\n" );
  CHECK_THROWS_AS( enumerate_abstraction_mappings( boolean ), Error );
}

TEST_CASE( "brute force agrees on the bundled examples" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto phi = load_map( "phi_g2.map", ex1 );
  CHECK( brute_force_space( ex1, phi ) == 64 );
  CHECK( same_networks( brute_force_abstractions( ex1, phi ), find_abstractions( ex1, phi ).abstractions ) );

  const auto pl2 = load( "pl2.mvn" );
  const auto phi2 = load_map( "phi_cro.map", pl2 );
  CHECK( same_networks( brute_force_abstractions( pl2, phi2 ), find_abstractions( pl2, phi2 ).abstractions ) );

  const auto pl4 = load( "pl4.mvn" );
  CHECK_THROWS_AS( brute_force_abstractions( pl4, load_map( "phi_pl4.map", pl4 ) ), GuardExceeded );
}

TEST_CASE( "brute force guard on three Boolean targets" )
{
  std::string text = "mvn T\n";
  for ( const auto* id : { "a", "b", "c" } )
  {
    text += std::string( "entity " ) + id + " states 0..2 inputs a b c\n";
  }
  for ( const auto* id : { "a", "b", "c" } )
  {
    text += std::string( "table " ) + id + "\n0,1,2 0,1,2 0,1,2 -> 0\n";
  }
  const auto m = parse_model( text );
  const StateMapping f( { 0, 0, 1 } );
  const AbstractionMapping phi( m, { f, f, f } );
  CHECK( brute_force_space( m, phi ) == 16777216 );
  try
  {
    brute_force_abstractions( m, phi );
    FAIL( "expected GuardExceeded" );
  }
  catch ( const GuardExceeded& g )
  {
    CHECK( g.count() == 16777216 );
    CHECK( g.limit() == 65536 );
  }
}
