#pragma once

/*!
  \file parser.hpp
  \brief Reader and writer for `.mvn` model files and `.map` mapping files.

  Model files are line oriented; `#` starts a comment.

      mvn Ex1
      entity g1 states 0..1 inputs g2
      entity g2 states 0..2 inputs g1 g2
      table g1
      0 -> 1
      1,2 -> 0      # shorthand: any of the listed states
      table g2
      ...

  Table rows carry one column per declared input, in declaration order.
  Shorthand columns are expanded by Cartesian product. Repeating a row with
  the same output is allowed; a different output is an error.

  Mapping files name the model they apply to and list one state mapping per
  abstracted entity; omitted entities map by identity.

      abstraction phi_g2 for Ex1
      map g2: 0->0, 1->0, 2->1
*/

#include "abstraction.hpp"
#include "model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mvabs
{

class ParseError : public Error
{
public:
  ParseError( std::size_t line, std::size_t column, const std::string& message )
      : Error( "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " + message ),
        line_( line ), column_( column ), message_( message )
  {
  }

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

struct ModelDocument
{
  std::string text;
  Mvn model;
  std::vector<std::size_t> entity_lines;         // declaration line per entity
  std::vector<std::size_t> table_lines;          // `table` header line per entity (0 if absent)
  std::vector<std::vector<std::size_t>> row_lines; // source line of every expanded row (0 if missing)
};

namespace detail
{

struct Token
{
  std::string_view text;
  std::size_t column; // 1-based
};

inline std::string_view strip_comment( std::string_view line )
{
  const auto hash = line.find( '#' );
  return hash == std::string_view::npos ? line : line.substr( 0, hash );
}

inline std::vector<Token> split_ws( std::string_view line, std::size_t offset = 0 )
{
  std::vector<Token> out;
  std::size_t i = 0;
  while ( i < line.size() )
  {
    while ( i < line.size() && std::isspace( static_cast<unsigned char>( line[i] ) ) )
    {
      ++i;
    }
    const auto start = i;
    while ( i < line.size() && !std::isspace( static_cast<unsigned char>( line[i] ) ) )
    {
      ++i;
    }
    if ( i > start )
    {
      out.push_back( { line.substr( start, i - start ), offset + start + 1 } );
    }
  }
  return out;
}

inline bool is_identifier( std::string_view s )
{
  if ( s.empty() || !( std::isalpha( static_cast<unsigned char>( s[0] ) ) || s[0] == '_' ) )
  {
    return false;
  }
  return std::all_of( s.begin(), s.end(),
                      []( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_'; } );
}

inline std::optional<State> to_state( std::string_view s )
{
  State v = 0;
  const auto [p, ec] = std::from_chars( s.data(), s.data() + s.size(), v );
  if ( ec != std::errc{} || p != s.data() + s.size() || v < 0 )
  {
    return std::nullopt;
  }
  return v;
}

/// Line cursor for the row grammar `v[,v...] ... -> out`.
class RowScanner
{
public:
  RowScanner( std::string_view text, std::size_t line ) : text_( text ), line_( line ) {}

  void skip_ws()
  {
    while ( pos_ < text_.size() && std::isspace( static_cast<unsigned char>( text_[pos_] ) ) )
    {
      ++pos_;
    }
  }
  bool at_end()
  {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool at_arrow()
  {
    skip_ws();
    return text_.substr( pos_, 2 ) == "->";
  }
  void expect_arrow()
  {
    if ( !at_arrow() )
    {
      fail( "expected '->'" );
    }
    pos_ += 2;
  }
  bool peek( char c )
  {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void advance() { ++pos_; }
  std::size_t column()
  {
    skip_ws();
    return pos_ + 1;
  }

  State number()
  {
    skip_ws();
    const auto start = pos_;
    while ( pos_ < text_.size() && std::isdigit( static_cast<unsigned char>( text_[pos_] ) ) )
    {
      ++pos_;
    }
    if ( start == pos_ )
    {
      fail( "expected a state value" );
    }
    const auto v = to_state( text_.substr( start, pos_ - start ) );
    if ( !v )
    {
      pos_ = start;
      fail( "state value out of range" );
    }
    return *v;
  }

  [[noreturn]] void fail( const std::string& msg ) const { throw ParseError( line_, pos_ + 1, msg ); }

private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses and resolves a model; any violation is reported with its line.
inline ModelDocument parse_model_document( std::string text )
{
  ModelDocument doc;
  doc.text = std::move( text );
  auto& m = doc.model;

  struct PendingInput
  {
    std::string id;
    std::size_t column;
  };
  struct PendingEntity
  {
    std::vector<PendingInput> inputs; // resolved once all entities are known
    std::size_t line;
  };
  std::vector<PendingEntity> pending;
  bool header = false;
  bool resolved = false;
  std::optional<std::size_t> current_table;

  auto resolve = [&]( std::size_t line ) {
    if ( m.entities.empty() )
    {
      throw ParseError( line, 1, "no entities declared" );
    }
    for ( std::size_t i = 0; i < m.size(); ++i )
    {
      for ( const auto& tok : pending[i].inputs )
      {
        const auto idx = m.find( tok.id );
        if ( !idx )
        {
          throw ParseError( pending[i].line, tok.column, "unknown entity '" + tok.id + "' in neighbourhood of " + m[i].id );
        }
        if ( std::find( m[i].inputs.begin(), m[i].inputs.end(), *idx ) != m[i].inputs.end() )
        {
          throw ParseError( pending[i].line, tok.column, "entity '" + tok.id + "' listed twice in neighbourhood of " + m[i].id );
        }
        m[i].inputs.push_back( *idx );
      }
    }
    doc.table_lines.assign( m.size(), 0 );
    doc.row_lines.resize( m.size() );
    for ( std::size_t i = 0; i < m.size(); ++i )
    {
      const auto rows = row_count( m, i );
      if ( rows > ( std::uint64_t{ 1 } << 24 ) )
      {
        throw ParseError( pending[i].line, 1, "table of " + m[i].id + " has too many rows" );
      }
      m[i].table.assign( rows, kNoRow );
      doc.row_lines[i].assign( rows, 0 );
    }
    resolved = true;
  };

  std::istringstream in( doc.text );
  std::string raw;
  std::size_t lineno = 0;
  while ( std::getline( in, raw ) )
  {
    ++lineno;
    const auto line = detail::strip_comment( raw );
    const auto toks = detail::split_ws( line );
    if ( toks.empty() )
    {
      continue;
    }
    const auto kw = toks[0].text;

    if ( kw == "mvn" )
    {
      if ( header )
      {
        throw ParseError( lineno, toks[0].column, "duplicate 'mvn' header" );
      }
      if ( toks.size() != 2 || !detail::is_identifier( toks[1].text ) )
      {
        throw ParseError( lineno, toks[0].column, "expected 'mvn <name>'" );
      }
      m.name = std::string( toks[1].text );
      header = true;
      continue;
    }
    if ( !header )
    {
      throw ParseError( lineno, toks[0].column, "expected 'mvn <name>' before anything else" );
    }

    if ( kw == "entity" )
    {
      if ( resolved )
      {
        throw ParseError( lineno, toks[0].column, "entities must be declared before the first table" );
      }
      if ( toks.size() < 4 || toks[2].text != "states" )
      {
        throw ParseError( lineno, toks[0].column, "expected 'entity <id> states 0..<m> inputs <id>...'" );
      }
      if ( !detail::is_identifier( toks[1].text ) )
      {
        throw ParseError( lineno, toks[1].column, "invalid entity identifier '" + std::string( toks[1].text ) + "'" );
      }
      if ( m.find( toks[1].text ) )
      {
        throw ParseError( lineno, toks[1].column, "entity '" + std::string( toks[1].text ) + "' declared twice" );
      }
      const auto range = toks[3].text;
      const auto dots = range.find( ".." );
      if ( dots == std::string_view::npos )
      {
        throw ParseError( lineno, toks[3].column, "expected a state range '0..<m>'" );
      }
      const auto lo = detail::to_state( range.substr( 0, dots ) );
      const auto hi = detail::to_state( range.substr( dots + 2 ) );
      if ( !lo || !hi )
      {
        throw ParseError( lineno, toks[3].column, "expected a state range '0..<m>'" );
      }
      if ( *lo != 0 )
      {
        throw ParseError( lineno, toks[3].column, "state ranges must start at 0" );
      }
      if ( *hi < 1 )
      {
        throw ParseError( lineno, toks[3].column, "an entity needs at least two states" );
      }
      PendingEntity p{ {}, lineno };
      if ( toks.size() > 4 )
      {
        if ( toks[4].text != "inputs" )
        {
          throw ParseError( lineno, toks[4].column, "expected 'inputs'" );
        }
        for ( auto t = toks.begin() + 5; t != toks.end(); ++t )
        {
          p.inputs.push_back( { std::string( t->text ), t->column } );
        }
      }
      Entity e;
      e.id = std::string( toks[1].text );
      e.max_state = *hi;
      m.entities.push_back( std::move( e ) );
      pending.push_back( std::move( p ) );
      doc.entity_lines.push_back( lineno );
      continue;
    }

    if ( kw == "table" )
    {
      if ( !resolved )
      {
        resolve( lineno );
      }
      if ( toks.size() != 2 )
      {
        throw ParseError( lineno, toks[0].column, "expected 'table <id>'" );
      }
      const auto idx = m.find( toks[1].text );
      if ( !idx )
      {
        throw ParseError( lineno, toks[1].column, "table for unknown entity '" + std::string( toks[1].text ) + "'" );
      }
      if ( doc.table_lines[*idx] != 0 )
      {
        throw ParseError( lineno, toks[1].column, "second table for entity '" + m[*idx].id + "' (first on line " +
                                                       std::to_string( doc.table_lines[*idx] ) + ")" );
      }
      doc.table_lines[*idx] = lineno;
      current_table = *idx;
      continue;
    }

    // table row
    if ( !current_table )
    {
      throw ParseError( lineno, toks[0].column, "unexpected '" + std::string( toks[0].text ) + "'" );
    }
    const auto ei = *current_table;
    const auto& e = m[ei];
    detail::RowScanner scan( line, lineno );
    std::vector<std::vector<State>> columns;
    while ( !scan.at_arrow() )
    {
      if ( scan.at_end() )
      {
        scan.fail( "expected '->'" );
      }
      const auto col = columns.size();
      if ( col >= e.inputs.size() )
      {
        scan.fail( "too many columns for table " + e.id + " (expected " + std::to_string( e.inputs.size() ) + ")" );
      }
      const auto& src = m[e.inputs[col]];
      std::vector<State> alts;
      for ( ;; )
      {
        const auto column = scan.column();
        const auto v = scan.number();
        if ( v > src.max_state )
        {
          throw ParseError( lineno, column, "state " + std::to_string( v ) + " out of range 0.." +
                                                std::to_string( src.max_state ) + " for input " + src.id );
        }
        alts.push_back( v );
        if ( !scan.peek( ',' ) )
        {
          break;
        }
        scan.advance();
      }
      columns.push_back( std::move( alts ) );
    }
    if ( columns.size() != e.inputs.size() )
    {
      scan.fail( "row has " + std::to_string( columns.size() ) + " columns, table " + e.id + " expects " +
                 std::to_string( e.inputs.size() ) );
    }
    scan.expect_arrow();
    const auto out_column = scan.column();
    const auto out = scan.number();
    if ( !scan.at_end() )
    {
      scan.fail( "trailing input after row output" );
    }
    if ( out > e.max_state )
    {
      throw ParseError( lineno, out_column, "output " + std::to_string( out ) + " out of range 0.." +
                                                    std::to_string( e.max_state ) + " for entity " + e.id );
    }

    // Cartesian expansion of the shorthand columns
    std::vector<std::size_t> pick( columns.size(), 0 );
    std::vector<State> tuple( columns.size() );
    for ( ;; )
    {
      for ( std::size_t c = 0; c < columns.size(); ++c )
      {
        tuple[c] = columns[c][pick[c]];
      }
      const auto r = row_index( m, ei, tuple );
      auto& slot = m[ei].table[r];
      if ( slot != kNoRow && slot != out )
      {
        throw ParseError( lineno, 1, "conflicting row " + describe_row( m, ei, r ) + " in table " + e.id + ": output " +
                                         std::to_string( out ) + " here, " + std::to_string( slot ) + " on line " +
                                         std::to_string( doc.row_lines[ei][r] ) );
      }
      if ( slot == kNoRow )
      {
        slot = out;
        doc.row_lines[ei][r] = lineno;
      }
      std::size_t c = columns.size();
      while ( c-- > 0 )
      {
        if ( ++pick[c] < columns[c].size() )
        {
          break;
        }
        pick[c] = 0;
      }
      if ( c == static_cast<std::size_t>( -1 ) )
      {
        break;
      }
    }
  }

  if ( !header )
  {
    throw ParseError( lineno + 1, 1, "empty model file" );
  }
  if ( !resolved )
  {
    resolve( lineno + 1 );
  }
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    if ( doc.table_lines[i] == 0 )
    {
      throw ParseError( doc.entity_lines[i], 1, "no table for entity " + m[i].id );
    }
  }
  if ( const auto v = validate_model( m ); !v.empty() )
  {
    const auto& first = v.front();
    const auto line = first.entity ? doc.table_lines[*first.entity] : 1;
    throw ParseError( line, 1, first.message );
  }
  return doc;
}

inline Mvn parse_model( std::string text )
{
  return parse_model_document( std::move( text ) ).model;
}

/// Canonical text: explicit rows in lexicographic input order, no shorthand.
inline std::string serialize_model( const Mvn& m )
{
  std::ostringstream os;
  os << "mvn " << m.name << "\n";
  for ( const auto& e : m.entities )
  {
    os << "entity " << e.id << " states 0.." << e.max_state;
    if ( !e.inputs.empty() )
    {
      os << " inputs";
      for ( auto in : e.inputs )
      {
        os << ' ' << m[in].id;
      }
    }
    os << "\n";
  }
  for ( std::size_t i = 0; i < m.size(); ++i )
  {
    os << "\ntable " << m[i].id << "\n";
    for ( std::size_t r = 0; r < m[i].table.size(); ++r )
    {
      for ( auto v : row_inputs( m, i, r ) )
      {
        os << v << ' ';
      }
      os << "-> " << m[i].table[r] << "\n";
    }
  }
  return os.str();
}

/// Resolves a `.map` file against the model it names.
inline AbstractionMapping parse_mapping( std::string_view text, const Mvn& m )
{
  std::string name;
  bool header = false;
  std::vector<AbstractionMapping::Entry> entries( m.size() );
  std::vector<std::size_t> entry_lines( m.size(), 0 );

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    auto end = text.find( '\n', pos );
    if ( end == std::string_view::npos )
    {
      end = text.size();
    }
    const auto line = detail::strip_comment( text.substr( pos, end - pos ) );
    pos = end + 1;
    ++lineno;

    const auto toks = detail::split_ws( line );
    if ( toks.empty() )
    {
      continue;
    }
    if ( toks[0].text == "abstraction" )
    {
      if ( header )
      {
        throw ParseError( lineno, toks[0].column, "duplicate 'abstraction' header" );
      }
      if ( toks.size() != 4 || toks[2].text != "for" || !detail::is_identifier( toks[1].text ) )
      {
        throw ParseError( lineno, toks[0].column, "expected 'abstraction <name> for <model>'" );
      }
      if ( toks[3].text != m.name )
      {
        throw ParseError( lineno, toks[3].column, "mapping is for model '" + std::string( toks[3].text ) +
                                                      "', not '" + m.name + "'" );
      }
      name = std::string( toks[1].text );
      header = true;
      continue;
    }
    if ( !header )
    {
      throw ParseError( lineno, toks[0].column, "expected 'abstraction <name> for <model>' first" );
    }
    if ( toks[0].text != "map" )
    {
      throw ParseError( lineno, toks[0].column, "expected 'map <entity>: a->b, ...'" );
    }

    const auto body_start = toks[0].column - 1 + 3;
    const auto body = line.substr( body_start );
    const auto colon = body.find( ':' );
    if ( colon == std::string_view::npos )
    {
      throw ParseError( lineno, body_start + 1, "expected ':' after the entity name" );
    }
    const auto id_toks = detail::split_ws( body.substr( 0, colon ), body_start );
    if ( id_toks.size() != 1 )
    {
      throw ParseError( lineno, body_start + 1, "expected one entity name before ':'" );
    }
    const auto idx = m.find( id_toks[0].text );
    if ( !idx )
    {
      throw ParseError( lineno, id_toks[0].column, "unknown entity '" + std::string( id_toks[0].text ) + "'" );
    }
    const auto& e = m[*idx];
    if ( entry_lines[*idx] != 0 )
    {
      throw ParseError( lineno, id_toks[0].column, "second mapping for entity " + e.id );
    }
    if ( e.max_state < 2 )
    {
      throw ParseError( lineno, id_toks[0].column, "entity " + e.id + " is Boolean; state mappings need more than two states" );
    }

    std::vector<State> image( e.range_size(), kNoRow );
    const auto list_start = body_start + colon + 1;
    const auto list = body.substr( colon + 1 );
    std::size_t p = 0;
    while ( p <= list.size() )
    {
      auto comma = list.find( ',', p );
      if ( comma == std::string_view::npos )
      {
        comma = list.size();
      }
      const auto item = list.substr( p, comma - p );
      const auto col = list_start + p + 1;
      p = comma + 1;

      const auto arrow = item.find( "->" );
      if ( arrow == std::string_view::npos )
      {
        throw ParseError( lineno, col, "expected 'a->b'" );
      }
      const auto lhs = detail::split_ws( item.substr( 0, arrow ) );
      const auto rhs = detail::split_ws( item.substr( arrow + 2 ) );
      const auto from_v = lhs.size() == 1 ? detail::to_state( lhs[0].text ) : std::nullopt;
      const auto to_v = rhs.size() == 1 ? detail::to_state( rhs[0].text ) : std::nullopt;
      if ( !from_v || !to_v )
      {
        throw ParseError( lineno, col, "expected 'a->b' with state values" );
      }
      const State from = from_v.value();
      const State to = to_v.value();
      if ( from > e.max_state )
      {
        throw ParseError( lineno, col, "state " + std::to_string( from ) + " out of range 0.." +
                                           std::to_string( e.max_state ) + " for entity " + e.id );
      }
      auto& slot = image[static_cast<std::size_t>( from )];
      if ( slot != kNoRow && slot != to )
      {
        throw ParseError( lineno, col, "state " + std::to_string( from ) + " of " + e.id + " mapped twice" );
      }
      slot = to;
    }
    for ( std::size_t s = 0; s < image.size(); ++s )
    {
      if ( image[s] == kNoRow )
      {
        throw ParseError( lineno, list_start + 1, "mapping for " + e.id + " leaves state " + std::to_string( s ) + " unmapped" );
      }
    }
    try
    {
      entries[*idx] = StateMapping( std::move( image ) );
    }
    catch ( const Error& err )
    {
      throw ParseError( lineno, id_toks[0].column, std::string( err.what() ) + " (entity " + e.id + ")" );
    }
    entry_lines[*idx] = lineno;
  }

  if ( !header )
  {
    throw ParseError( lineno, 1, "empty mapping file" );
  }
  if ( std::all_of( entries.begin(), entries.end(), []( const auto& x ) { return !x.has_value(); } ) )
  {
    throw ParseError( lineno, 1, "abstraction mapping has no state mapping (all entities identity)" );
  }
  return AbstractionMapping( m, std::move( entries ), name );
}

inline std::string serialize_mapping( const AbstractionMapping& phi, const Mvn& m )
{
  std::ostringstream os;
  os << "abstraction " << phi.name() << " for " << m.name << "\n";
  for ( std::size_t i = 0; i < phi.size(); ++i )
  {
    if ( phi.is_identity( i ) )
    {
      continue;
    }
    os << "map " << m[i].id << ":";
    const auto image = phi.entry( i )->image();
    for ( std::size_t s = 0; s < image.size(); ++s )
    {
      os << ( s > 0 ? ", " : " " ) << s << "->" << image[s];
    }
    os << "\n";
  }
  return os.str();
}

} // namespace mvabs
