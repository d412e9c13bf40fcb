#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace uchoo {

class Term;
class Goal;
class Def;

using TermPtr = std::shared_ptr<const Term>;
using GoalPtr = std::shared_ptr<const Goal>;
using DefPtr = std::shared_ptr<const Def>;

enum class BinaryOp { Add, Sub, Mul, Div };

char binary_op_symbol(BinaryOp op);

/// Terms are the values and expressions flowing through goals and the
/// machine state. `Ident` is a symbol constant (`on`, `medical`), `Var`
/// is a clause parameter and only appears under a `Forall` binder in a
/// well-formed definition.
///
/// All syntax nodes are immutable after construction; subtrees are shared
/// freely via shared_ptr and substitution reuses untouched subtrees.
class Term {
public:
  struct Ident {
    std::string name;
  };
  struct Int {
    long long value;
  };
  struct Str {
    std::string value;
  };
  struct Var {
    std::string name;
  };
  struct BinOp {
    BinaryOp op;
    TermPtr lhs;
    TermPtr rhs;
  };

  using Node = std::variant<Ident, Int, Str, Var, BinOp>;

  explicit Term(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  static TermPtr ident(std::string name);
  static TermPtr integer(long long value);
  static TermPtr str(std::string value);
  static TermPtr var(std::string name);
  static TermPtr binop(BinaryOp op, TermPtr lhs, TermPtr rhs);

private:
  Node node_;
};

/// Atoms are the heads of procedure definitions and the atomic goals the
/// machine backchains on: a call `p(t1,...,tn)` or a field form `x == v`.
struct Atom {
  struct Call {
    std::string name;
    std::vector<TermPtr> args;
  };
  struct Field {
    std::string var;
    TermPtr value;
  };

  std::variant<Call, Field> node;

  static Atom call(std::string name, std::vector<TermPtr> args = {});
  static Atom field(std::string var, TermPtr value);

  const Call* as_call() const { return std::get_if<Call>(&node); }
  const Field* as_field() const { return std::get_if<Field>(&node); }
};

/// Goals are the executable statements. `;` sequencing associates to the
/// right: `a; b; c` parses as Seq(a, Seq(b, c)).
class Goal {
public:
  struct True {};
  struct AtomGoal {
    Atom atom;
  };
  struct Assign {
    std::string var;
    TermPtr expr;
  };
  struct Seq {
    GoalPtr first;
    GoalPtr second;
  };
  struct Read {
    std::string var;
  };
  struct Print {
    TermPtr expr;
  };
  struct Log {
    std::string message;
  };
  struct While {
    Atom cond;  // the bare condition `true` is stored as a nullary call "true"
    GoalPtr body;
  };

  using Node =
      std::variant<True, AtomGoal, Assign, Seq, Read, Print, Log, While>;

  explicit Goal(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  static GoalPtr truth();
  static GoalPtr atom(Atom atom);
  static GoalPtr assign(std::string var, TermPtr expr);
  static GoalPtr seq(GoalPtr first, GoalPtr second);
  static GoalPtr read(std::string var);
  static GoalPtr print(TermPtr expr);
  static GoalPtr log(std::string message);
  static GoalPtr while_loop(Atom cond, GoalPtr body);

private:
  Node node_;
};

/// Definitions: clauses `A = G`, sequences `D; D`, parameter binders, and
/// choice blocks `uchoo(D1,...,Dn)` whose branches are mutually exclusive
/// alternatives resolved at run time.
class Def {
public:
  struct Clause {
    Atom head;
    GoalPtr body;
  };
  struct DSeq {
    DefPtr first;
    DefPtr second;
  };
  struct Forall {
    std::string var;
    DefPtr body;
  };
  struct Choice {
    std::vector<DefPtr> branches;  // nonempty
  };

  using Node = std::variant<Clause, DSeq, Forall, Choice>;

  explicit Def(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  static DefPtr clause(Atom head, GoalPtr body);
  static DefPtr dseq(DefPtr first, DefPtr second);
  static DefPtr forall(std::string var, DefPtr body);
  static DefPtr choice(std::vector<DefPtr> branches);

private:
  Node node_;
};

struct Module {
  std::string name;
  DefPtr decls;
};

bool operator==(const Term& a, const Term& b);
bool operator==(const Atom& a, const Atom& b);
bool operator==(const Goal& a, const Goal& b);
bool operator==(const Def& a, const Def& b);
bool operator==(const Module& a, const Module& b);

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const GoalPtr& a, const GoalPtr& b);
bool equal(const DefPtr& a, const DefPtr& b);

/// True iff no Var node occurs in the term.
bool is_ground(const Term& t);
bool is_ground(const Atom& a);

/// Replaces every free occurrence of `var` by `value`; occurrences bound
/// by an inner Forall of the same name are untouched. `value` must be
/// ground, so repeated substitution of the same variable is idempotent.
TermPtr substitute(const TermPtr& t, const std::string& var,
                   const TermPtr& value);
Atom substitute(const Atom& a, const std::string& var, const TermPtr& value);
GoalPtr substitute(const GoalPtr& g, const std::string& var,
                   const TermPtr& value);
DefPtr substitute(const DefPtr& d, const std::string& var,
                  const TermPtr& value);

/// Free Var names, sorted and deduplicated. A loadable definition set
/// has none.
std::vector<std::string> free_vars(const Def& d);
bool is_closed(const Def& d);

/// Concrete syntax. Output parses back to a structurally equal tree for
/// every tree the parser can produce.
std::string pretty(const Term& t);
std::string pretty(const Atom& a);
std::string pretty(const Goal& g);
std::string pretty(const Def& d);
std::string pretty(const Module& m);

}  // namespace uchoo
