#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "uchoo/syntax.hpp"

namespace uchoo {

enum class TokenKind {
  KwModule,
  KwUchoo,
  KwTrue,
  KwMain,
  KwWhile,
  KwEndwhile,
  KwRead,
  KwPrint,
  KwLog,
  Ident,
  Int,
  Str,
  Semi,
  Comma,
  LParen,
  RParen,
  Assign,  // =
  EqEq,    // ==
  Plus,
  Minus,
  Star,
  Slash,
  End,
};

const char* token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;  // identifier name, decoded string body, or digit run
  long long int_value = 0;
  int line = 1;
  int column = 1;
};

/// Position-annotated syntax error. `what()` is preformatted as
/// `line:column: expected <expected>, found <found>`.
class ParseError : public std::runtime_error {
public:
  ParseError(int line, int column, std::string expected, std::string found);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

private:
  int line_;
  int column_;
  std::string expected_;
  std::string found_;
};

/// A parsed `.uch` file: zero or more modules followed by one main goal.
struct SourceFile {
  std::vector<Module> modules;
  GoalPtr main;
};

bool operator==(const SourceFile& a, const SourceFile& b);

/// Splits source text into tokens. Keywords, identifiers, integer and
/// string literals, punctuation `; , ( ) = == + - * /`; `%` starts a line
/// comment. Throws ParseError on an illegal character or unterminated
/// string.
std::vector<Token> tokenize(const std::string& src);

/// Parses a whole `.uch` file. The returned definitions are closed: each
/// clause is wrapped in one Forall binder per parameter, where a parameter
/// is a bare lowercase identifier appearing as a head argument of a call.
/// `;` builds DSeq in definition position and Seq in goal position, both
/// right-associative.
SourceFile parse_program(const std::string& src);

/// Parses a single goal (the REPL and `--goal` entry point).
GoalPtr parse_goal(const std::string& src);

std::string pretty(const SourceFile& file);

}  // namespace uchoo
