#include "uchoo/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace uchoo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::map<std::string, TokenKind, std::less<>> kKeywords = {
    {"module", TokenKind::KwModule},     {"uchoo", TokenKind::KwUchoo},
    {"true", TokenKind::KwTrue},         {"main", TokenKind::KwMain},
    {"while", TokenKind::KwWhile},       {"endwhile", TokenKind::KwEndwhile},
    {"read", TokenKind::KwRead},         {"print", TokenKind::KwPrint},
    {"log", TokenKind::KwLog},
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::KwModule:
      return "'module'";
    case TokenKind::KwUchoo:
      return "'uchoo'";
    case TokenKind::KwTrue:
      return "'true'";
    case TokenKind::KwMain:
      return "'main'";
    case TokenKind::KwWhile:
      return "'while'";
    case TokenKind::KwEndwhile:
      return "'endwhile'";
    case TokenKind::KwRead:
      return "'read'";
    case TokenKind::KwPrint:
      return "'print'";
    case TokenKind::KwLog:
      return "'log'";
    case TokenKind::Ident:
      return "identifier";
    case TokenKind::Int:
      return "integer literal";
    case TokenKind::Str:
      return "string literal";
    case TokenKind::Semi:
      return "';'";
    case TokenKind::Comma:
      return "','";
    case TokenKind::LParen:
      return "'('";
    case TokenKind::RParen:
      return "')'";
    case TokenKind::Assign:
      return "'='";
    case TokenKind::EqEq:
      return "'=='";
    case TokenKind::Plus:
      return "'+'";
    case TokenKind::Minus:
      return "'-'";
    case TokenKind::Star:
      return "'*'";
    case TokenKind::Slash:
      return "'/'";
    case TokenKind::End:
      return "end of input";
  }
  return "?";
}

ParseError::ParseError(int line, int column, std::string expected,
                       std::string found)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": expected " + expected + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

bool operator==(const SourceFile& a, const SourceFile& b) {
  if (a.modules.size() != b.modules.size()) return false;
  for (size_t i = 0; i < a.modules.size(); ++i)
    if (!(a.modules[i] == b.modules[i])) return false;
  return equal(a.main, b.main);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct LexResult {
  std::vector<Token> tokens;
  int end_line = 1;
  int end_column = 1;
};

LexResult lex(const std::string& src) {
  LexResult result;
  size_t i = 0;
  const size_t n = src.size();
  int line = 1;
  int column = 1;

  auto advance = [&]() {
    if (src[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };
  auto push = [&](TokenKind kind, std::string text, int l, int c) {
    result.tokens.push_back(Token{kind, std::move(text), 0, l, c});
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '%') {  // line comment
      while (i < n && src[i] != '\n') advance();
      continue;
    }
    int tl = line, tc = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                       src[i] == '_')) {
        word += src[i];
        advance();
      }
      auto kw = kKeywords.find(word);
      if (kw != kKeywords.end())
        push(kw->second, std::move(word), tl, tc);
      else
        push(TokenKind::Ident, std::move(word), tl, tc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits += src[i];
        advance();
      }
      long long value = 0;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw ParseError(tl, tc, "an integer literal in range",
                         "'" + digits + "'");
      Token t{TokenKind::Int, digits, value, tl, tc};
      result.tokens.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      advance();
      std::string text;
      while (true) {
        if (i >= n)
          throw ParseError(tl, tc, "a closing '\"'", "end of input");
        char d = src[i];
        if (d == '\n')
          throw ParseError(tl, tc, "a closing '\"'", "end of line");
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          advance();
          if (i >= n)
            throw ParseError(tl, tc, "a closing '\"'", "end of input");
          char e = src[i];
          switch (e) {
            case 'n':
              text += '\n';
              break;
            case 't':
              text += '\t';
              break;
            case '"':
              text += '"';
              break;
            case '\\':
              text += '\\';
              break;
            default:
              throw ParseError(line, column,
                               "an escape sequence (\\\" \\\\ \\n \\t)",
                               std::string("'\\") + e + "'");
          }
          advance();
          continue;
        }
        text += d;
        advance();
      }
      push(TokenKind::Str, std::move(text), tl, tc);
      continue;
    }
    TokenKind kind;
    switch (c) {
      case ';':
        kind = TokenKind::Semi;
        break;
      case ',':
        kind = TokenKind::Comma;
        break;
      case '(':
        kind = TokenKind::LParen;
        break;
      case ')':
        kind = TokenKind::RParen;
        break;
      case '+':
        kind = TokenKind::Plus;
        break;
      case '-':
        kind = TokenKind::Minus;
        break;
      case '*':
        kind = TokenKind::Star;
        break;
      case '/':
        kind = TokenKind::Slash;
        break;
      case '=':
        if (i + 1 < n && src[i + 1] == '=') {
          advance();
          kind = TokenKind::EqEq;
        } else {
          kind = TokenKind::Assign;
        }
        break;
      default:
        throw ParseError(line, column, "a token",
                         std::string("illegal character '") + c + "'");
    }
    advance();
    push(kind, std::string(1, c), tl, tc);
  }
  result.end_line = line;
  result.end_column = column;
  return result;
}

// Rewrites bare identifier occurrences of a clause parameter into Var nodes.

TermPtr ident_to_var(const TermPtr& t, const std::string& name) {
  return std::visit(
      overloaded{
          [&](const Term::Ident& x) {
            return x.name == name ? Term::var(name) : t;
          },
          [&](const Term::BinOp& x) {
            TermPtr lhs = ident_to_var(x.lhs, name);
            TermPtr rhs = ident_to_var(x.rhs, name);
            if (lhs == x.lhs && rhs == x.rhs) return t;
            return Term::binop(x.op, std::move(lhs), std::move(rhs));
          },
          [&](const auto&) { return t; },
      },
      t->node());
}

Atom ident_to_var(const Atom& a, const std::string& name) {
  if (const auto* c = a.as_call()) {
    std::vector<TermPtr> args;
    args.reserve(c->args.size());
    for (const auto& arg : c->args) args.push_back(ident_to_var(arg, name));
    return Atom::call(c->name, std::move(args));
  }
  const auto* f = a.as_field();
  return Atom::field(f->var, ident_to_var(f->value, name));
}

GoalPtr ident_to_var(const GoalPtr& g, const std::string& name) {
  return std::visit(
      overloaded{
          [&](const Goal::AtomGoal& x) {
            return Goal::atom(ident_to_var(x.atom, name));
          },
          [&](const Goal::Assign& x) {
            return Goal::assign(x.var, ident_to_var(x.expr, name));
          },
          [&](const Goal::Seq& x) {
            return Goal::seq(ident_to_var(x.first, name),
                             ident_to_var(x.second, name));
          },
          [&](const Goal::Print& x) {
            return Goal::print(ident_to_var(x.expr, name));
          },
          [&](const Goal::While& x) {
            return Goal::while_loop(ident_to_var(x.cond, name),
                                    ident_to_var(x.body, name));
          },
          [&](const auto&) { return g; },
      },
      g->node());
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  explicit Parser(const std::string& src) {
    LexResult lr = lex(src);
    tokens_ = std::move(lr.tokens);
    tokens_.push_back(
        Token{TokenKind::End, "", 0, lr.end_line, lr.end_column});
  }

  SourceFile parse_file() {
    SourceFile file;
    std::set<std::string> names;
    while (check(TokenKind::KwModule)) {
      Token kw = consume();
      Token name = expect(TokenKind::Ident, "a module name");
      if (!names.insert(name.text).second)
        throw ParseError(name.line, name.column, "a unique module name",
                         "duplicate module '" + name.text + "'");
      DefPtr decls = parse_def_seq();
      auto fv = free_vars(*decls);
      if (!fv.empty())
        throw ParseError(kw.line, kw.column, "a closed definition",
                         "free variable '" + fv.front() + "' in module '" +
                             name.text + "'");
      file.modules.push_back(Module{name.text, std::move(decls)});
    }
    expect(TokenKind::KwMain, "'module' or 'main'");
    file.main = parse_goal_seq(false);
    expect(TokenKind::End, "end of input");
    return file;
  }

  GoalPtr parse_goal_only() {
    GoalPtr g = parse_goal_seq(false);
    expect(TokenKind::End, "end of input");
    return g;
  }

private:
  std::vector<Token> tokens_;
  size_t idx_ = 0;

  const Token& cur() const { return tokens_[idx_]; }
  const Token& peek(size_t k) const {
    size_t j = idx_ + k;
    return tokens_[std::min(j, tokens_.size() - 1)];
  }
  bool check(TokenKind kind) const { return cur().kind == kind; }
  Token consume() { return tokens_[idx_++]; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Ident:
        return "identifier '" + t.text + "'";
      case TokenKind::Int:
        return "integer '" + t.text + "'";
      case TokenKind::Str:
        return "string literal";
      default:
        return token_kind_name(t.kind);
    }
  }

  Token expect(TokenKind kind, const char* what) {
    if (!check(kind))
      throw ParseError(cur().line, cur().column, what, describe(cur()));
    return consume();
  }

  [[noreturn]] void fail(const char* expected) {
    throw ParseError(cur().line, cur().column, expected, describe(cur()));
  }

  bool can_start_def() const {
    return check(TokenKind::Ident) || check(TokenKind::KwUchoo);
  }

  bool can_start_goal() const {
    switch (cur().kind) {
      case TokenKind::KwTrue:
      case TokenKind::Ident:
      case TokenKind::KwRead:
      case TokenKind::KwPrint:
      case TokenKind::KwLog:
      case TokenKind::KwWhile:
        return true;
      default:
        return false;
    }
  }

  // True when the upcoming tokens form `atom =`, which starts the next
  // clause of a definition sequence rather than continuing a clause body.
  bool looks_like_clause_start() {
    if (!check(TokenKind::Ident)) return false;
    size_t save = idx_;
    bool result = false;
    try {
      parse_atom();
      result = check(TokenKind::Assign);
    } catch (const ParseError&) {
      result = false;
    }
    idx_ = save;
    return result;
  }

  DefPtr parse_def_seq() {
    DefPtr first = parse_def_unit();
    if (check(TokenKind::Semi)) {
      consume();
      if (can_start_def()) return Def::dseq(first, parse_def_seq());
      // dangling `;` before ')', ',', 'main', 'module', or end of input
    }
    return first;
  }

  DefPtr parse_def_unit() {
    if (check(TokenKind::KwUchoo)) {
      consume();
      expect(TokenKind::LParen, "'('");
      std::vector<DefPtr> branches;
      branches.push_back(parse_def_seq());
      while (check(TokenKind::Comma)) {
        consume();
        branches.push_back(parse_def_seq());
      }
      expect(TokenKind::RParen, "')' or ','");
      return Def::choice(std::move(branches));
    }
    if (!check(TokenKind::Ident)) fail("a definition");
    Atom head = parse_atom();
    GoalPtr body = Goal::truth();
    if (check(TokenKind::Assign)) {
      consume();
      body = parse_goal_seq(true);
    }
    return wrap_clause(head, std::move(body));
  }

  // Converts bare lowercase identifier head arguments into parameters:
  // each becomes a Var bound by a Forall around the clause, and identifier
  // occurrences of the same name in the body become Var references.
  DefPtr wrap_clause(const Atom& head, GoalPtr body) {
    std::vector<std::string> params;
    Atom bound_head = head;
    if (const auto* c = head.as_call()) {
      std::vector<TermPtr> args = c->args;
      for (auto& arg : args) {
        const auto* id = std::get_if<Term::Ident>(&arg->node());
        if (!id || id->name.empty()) continue;
        if (!std::islower(static_cast<unsigned char>(id->name[0]))) continue;
        if (std::find(params.begin(), params.end(), id->name) == params.end())
          params.push_back(id->name);
        arg = Term::var(id->name);
      }
      bound_head = Atom::call(c->name, std::move(args));
    }
    for (const auto& p : params) body = ident_to_var(body, p);
    DefPtr d = Def::clause(std::move(bound_head), std::move(body));
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      d = Def::forall(*it, std::move(d));
    return d;
  }

  Atom parse_atom() {
    Token name = expect(TokenKind::Ident, "an atom");
    if (check(TokenKind::LParen)) {
      consume();
      std::vector<TermPtr> args;
      if (!check(TokenKind::RParen)) {
        args.push_back(parse_expr());
        while (check(TokenKind::Comma)) {
          consume();
          args.push_back(parse_expr());
        }
      }
      expect(TokenKind::RParen, "')' or ','");
      return Atom::call(name.text, std::move(args));
    }
    if (check(TokenKind::EqEq)) {
      consume();
      return Atom::field(name.text, parse_expr());
    }
    fail("'(' or '==' after identifier");
  }

  GoalPtr parse_goal_seq(bool stop_at_clause) {
    GoalPtr first = parse_goal_unit();
    if (check(TokenKind::Semi)) {
      size_t mark = idx_;
      consume();
      if (!can_start_goal()) return first;  // dangling `;`
      if (stop_at_clause && looks_like_clause_start()) {
        idx_ = mark;  // the `;` separates definitions, not goals
        return first;
      }
      return Goal::seq(std::move(first), parse_goal_seq(stop_at_clause));
    }
    return first;
  }

  GoalPtr parse_goal_unit() {
    switch (cur().kind) {
      case TokenKind::KwTrue:
        consume();
        return Goal::truth();
      case TokenKind::KwRead: {
        consume();
        expect(TokenKind::LParen, "'('");
        Token v = expect(TokenKind::Ident, "a variable name");
        expect(TokenKind::RParen, "')'");
        return Goal::read(v.text);
      }
      case TokenKind::KwPrint: {
        consume();
        expect(TokenKind::LParen, "'('");
        TermPtr e = parse_expr();
        expect(TokenKind::RParen, "')'");
        return Goal::print(std::move(e));
      }
      case TokenKind::KwLog: {
        consume();
        expect(TokenKind::LParen, "'('");
        Token s = expect(TokenKind::Str, "a string literal");
        expect(TokenKind::RParen, "')'");
        return Goal::log(s.text);
      }
      case TokenKind::KwWhile: {
        consume();
        expect(TokenKind::LParen, "'('");
        Atom cond = Atom::call("true");
        if (check(TokenKind::KwTrue))
          consume();
        else
          cond = parse_atom();
        expect(TokenKind::RParen, "')'");
        GoalPtr body = parse_goal_seq(false);
        expect(TokenKind::KwEndwhile, "'endwhile'");
        return Goal::while_loop(std::move(cond), std::move(body));
      }
      case TokenKind::Ident: {
        Token name = cur();
        TokenKind next = peek(1).kind;
        if (next == TokenKind::LParen || next == TokenKind::EqEq)
          return Goal::atom(parse_atom());
        if (next == TokenKind::Assign) {
          consume();
          consume();
          return Goal::assign(name.text, parse_expr());
        }
        throw ParseError(peek(1).line, peek(1).column,
                         "'(', '==', or '=' after identifier",
                         describe(peek(1)));
      }
      default:
        fail("a goal");
    }
  }

  TermPtr parse_expr() {
    TermPtr lhs = parse_mul();
    while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
      BinaryOp op =
          check(TokenKind::Plus) ? BinaryOp::Add : BinaryOp::Sub;
      consume();
      lhs = Term::binop(op, std::move(lhs), parse_mul());
    }
    return lhs;
  }

  TermPtr parse_mul() {
    TermPtr lhs = parse_primary();
    while (check(TokenKind::Star) || check(TokenKind::Slash)) {
      BinaryOp op =
          check(TokenKind::Star) ? BinaryOp::Mul : BinaryOp::Div;
      consume();
      lhs = Term::binop(op, std::move(lhs), parse_primary());
    }
    return lhs;
  }

  TermPtr parse_primary() {
    switch (cur().kind) {
      case TokenKind::Int:
        return Term::integer(consume().int_value);
      case TokenKind::Str:
        return Term::str(consume().text);
      case TokenKind::Ident:
        return Term::ident(consume().text);
      case TokenKind::LParen: {
        consume();
        TermPtr e = parse_expr();
        expect(TokenKind::RParen, "')'");
        return e;
      }
      default:
        fail("an expression");
    }
  }
};

}  // namespace

std::vector<Token> tokenize(const std::string& src) {
  return lex(src).tokens;
}

SourceFile parse_program(const std::string& src) {
  Parser parser(src);
  return parser.parse_file();
}

GoalPtr parse_goal(const std::string& src) {
  Parser parser(src);
  return parser.parse_goal_only();
}

std::string pretty(const SourceFile& file) {
  std::string out;
  for (const auto& m : file.modules) {
    out += pretty(m);
    out += "\n\n";
  }
  out += "main\n";
  out += pretty(*file.main);
  out += "\n";
  return out;
}

}  // namespace uchoo
