#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mvabs;
using namespace mvabs::test;

TEST_CASE( "validate_model accepts the bundled models" )
{
  for ( const auto* name : { "ex1.mvn", "ex2.mvn", "ex3.mvn", "ab1.mvn", "pl2.mvn", "apl2.mvn", "pl4.mvn",
                             "apl4_1.mvn", "apl4_2.mvn" } )
  {
    INFO( name );
    CHECK( validate_model( load( name ) ).empty() );
  }
}

TEST_CASE( "validate_model reports a missing row" )
{
  auto m = load( "ex1.mvn" );
  const auto g2 = *m.find( "g2" );
  const std::vector<State> in{ 1, 2 };
  m[g2].table[row_index( m, g2, in )] = kNoRow;

  const auto v = validate_model( m );
  REQUIRE( v.size() == 1 );
  CHECK( v[0].kind == Violation::Kind::missing_row );
  CHECK( v[0].entity == g2 );
  CHECK( v[0].row == 5u );
  CHECK( v[0].message == "missing row (g1=1, g2=2) in table g2" );
}

TEST_CASE( "validate_model reports an output out of range" )
{
  auto m = load( "ex1.mvn" );
  m[1].table[2] = 3;
  const auto v = validate_model( m );
  REQUIRE( v.size() == 1 );
  CHECK( v[0].kind == Violation::Kind::output_out_of_range );
  CHECK( v[0].row == 2u );
}

TEST_CASE( "validate_model structural violations" )
{
  CHECK( validate_model( Mvn{} ).front().kind == Violation::Kind::no_entities );

  auto dup = load( "ex1.mvn" );
  dup[1].id = "g1";
  CHECK( validate_model( dup ).front().kind == Violation::Kind::duplicate_entity );

  auto unknown = load( "ex1.mvn" );
  unknown[0].inputs = { 7 };
  CHECK( validate_model( unknown ).front().kind == Violation::Kind::unknown_input );

  auto narrow = load( "ex1.mvn" );
  narrow[0].max_state = 0;
  CHECK( validate_model( narrow ).front().kind == Violation::Kind::bad_range );

  auto short_table = load( "ex1.mvn" );
  short_table[1].table.pop_back();
  CHECK( validate_model( short_table ).front().kind == Violation::Kind::table_size );
}

TEST_CASE( "state_space_size" )
{
  CHECK( state_space_size( load( "ex1.mvn" ) ) == 6 );
  CHECK( state_space_size( load( "pl4.mvn" ) ) == 48 );

  Mvn boolean{ "B", { Entity{ "x", 1, { 0 }, { 1, 0 } } } };
  CHECK( state_space_size( boolean ) == 2 );
}

TEST_CASE( "encode_state matches lexicographic enumeration" )
{
  const auto ex1 = load( "ex1.mvn" );
  const auto pl4 = load( "pl4.mvn" );

  // frozen from lexicographic_states: Ex1 "12" is the 6th state, PL4 "2000" the 33rd
  const auto ex1_states = lexicographic_states( ex1 );
  const auto pl4_states = lexicographic_states( pl4 );
  REQUIRE( ex1_states.size() == 6 );
  REQUIRE( pl4_states.size() == 48 );
  CHECK( std::find( ex1_states.begin(), ex1_states.end(), parse_state( ex1, "12" ) ) - ex1_states.begin() == 5 );
  CHECK( std::find( pl4_states.begin(), pl4_states.end(), parse_state( pl4, "2000" ) ) - pl4_states.begin() == 32 );

  CHECK( encode_state( ex1, parse_state( ex1, "00" ) ) == 0 );
  CHECK( encode_state( ex1, parse_state( ex1, "12" ) ) == 5 );
  CHECK( encode_state( pl4, parse_state( pl4, "2000" ) ) == 32 );

  for ( std::size_t i = 0; i < pl4_states.size(); ++i )
  {
    CHECK( encode_state( pl4, pl4_states[i] ) == i );
  }
}

TEST_CASE( "encode_state rejects out of range components" )
{
  const auto ex1 = load( "ex1.mvn" );
  CHECK_THROWS_AS( encode_state( ex1, GlobalState{ 0, 3 } ), Error );
  CHECK_THROWS_AS( encode_state( ex1, GlobalState{ 0 } ), Error );
  CHECK_THROWS_AS( decode_state( ex1, 6 ), Error );
}

TEST_CASE( "encode/decode round-trip on random models" )
{
  std::mt19937 rng( 7 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    const auto m = random_model( rng, 4, 4, false );
    const auto n = state_space_size( m );
    for ( std::uint64_t i = 0; i < n; ++i )
    {
      const auto s = decode_state( m, i );
      REQUIRE( is_valid_state( m, s ) );
      REQUIRE( encode_state( m, s ) == i );
    }
  }
}

TEST_CASE( "state notation" )
{
  const auto ex1 = load( "ex1.mvn" );
  CHECK( format_state( ex1, GlobalState{ 1, 2 } ) == "12" );
  CHECK( parse_state( ex1, "1,2" ) == GlobalState{ 1, 2 } );
  CHECK_THROWS_AS( parse_state( ex1, "99" ), Error );
  CHECK_THROWS_AS( parse_state( ex1, "1a" ), Error );
  CHECK_THROWS_AS( parse_state( ex1, "012" ), Error );

  // eleven states: digit strings are not accepted
  Mvn wide{ "W", { Entity{ "a", 10, {}, { 0 } }, Entity{ "b", 1, {}, { 0 } } } };
  CHECK_FALSE( uses_digit_strings( wide ) );
  CHECK( format_state( wide, GlobalState{ 10, 1 } ) == "10,1" );
  CHECK( parse_state( wide, "10,1" ) == GlobalState{ 10, 1 } );
  CHECK_THROWS_AS( parse_state( wide, "01" ), Error );
}

TEST_CASE( "trace canonical form is checkable in isolation" )
{
  const auto ex1 = load( "ex1.mvn" );
  CHECK( is_canonical( trace_of( ex1, { "00", "11", "10", "10" } ) ) );
  CHECK( is_canonical( trace_of( ex1, { "02", "02" } ) ) );
  CHECK_FALSE( is_canonical( trace_of( ex1, { "00", "11" } ) ) );             // no closing repeat
  CHECK_FALSE( is_canonical( trace_of( ex1, { "00", "00", "11", "00" } ) ) ); // prefix repeats
  CHECK_FALSE( is_canonical( trace_of( ex1, { "00" } ) ) );
  CHECK( trace_of( ex1, { "00", "11", "10", "10" } ).loop_start() == 2 );
}

TEST_CASE( "make_attractor reduces period and rotates" )
{
  const GlobalState a{ 1, 2 }, b{ 0, 1 }, c{ 1, 0 };
  CHECK( make_attractor( { a, b } ).cycle == std::vector{ b, a } );
  CHECK( make_attractor( { a, b, a, b } ).cycle == std::vector{ b, a } );
  CHECK( make_attractor( { c } ).period() == 1 );
  CHECK( make_attractor( { c, a, b } ).cycle == std::vector{ b, c, a } );
  CHECK_THROWS_AS( make_attractor( {} ), Error );
}

TEST_CASE( "same_network ignores the name" )
{
  auto a = load( "ex2.mvn" );
  auto b = a;
  b.name = "Other";
  CHECK( same_network( a, b ) );
  CHECK_FALSE( a == b );
  b[1].table[0] = 0;
  CHECK_FALSE( same_network( a, b ) );
  CHECK( same_structure( a, b ) );
}
