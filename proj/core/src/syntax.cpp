#include "uchoo/syntax.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace uchoo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

char binary_op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
      return '+';
    case BinaryOp::Sub:
      return '-';
    case BinaryOp::Mul:
      return '*';
    case BinaryOp::Div:
      return '/';
  }
  return '?';
}

TermPtr Term::ident(std::string name) {
  return std::make_shared<Term>(Ident{std::move(name)});
}
TermPtr Term::integer(long long value) {
  return std::make_shared<Term>(Int{value});
}
TermPtr Term::str(std::string value) {
  return std::make_shared<Term>(Str{std::move(value)});
}
TermPtr Term::var(std::string name) {
  return std::make_shared<Term>(Var{std::move(name)});
}
TermPtr Term::binop(BinaryOp op, TermPtr lhs, TermPtr rhs) {
  if (!lhs || !rhs) throw std::invalid_argument("binop: null operand");
  return std::make_shared<Term>(BinOp{op, std::move(lhs), std::move(rhs)});
}

Atom Atom::call(std::string name, std::vector<TermPtr> args) {
  for (const auto& a : args)
    if (!a) throw std::invalid_argument("call: null argument");
  return Atom{Call{std::move(name), std::move(args)}};
}
Atom Atom::field(std::string var, TermPtr value) {
  if (!value) throw std::invalid_argument("field: null value");
  return Atom{Field{std::move(var), std::move(value)}};
}

GoalPtr Goal::truth() { return std::make_shared<Goal>(True{}); }
GoalPtr Goal::atom(Atom atom) {
  return std::make_shared<Goal>(AtomGoal{std::move(atom)});
}
GoalPtr Goal::assign(std::string var, TermPtr expr) {
  if (!expr) throw std::invalid_argument("assign: null expression");
  return std::make_shared<Goal>(Assign{std::move(var), std::move(expr)});
}
GoalPtr Goal::seq(GoalPtr first, GoalPtr second) {
  if (!first || !second) throw std::invalid_argument("seq: null goal");
  return std::make_shared<Goal>(Seq{std::move(first), std::move(second)});
}
GoalPtr Goal::read(std::string var) {
  return std::make_shared<Goal>(Read{std::move(var)});
}
GoalPtr Goal::print(TermPtr expr) {
  if (!expr) throw std::invalid_argument("print: null expression");
  return std::make_shared<Goal>(Print{std::move(expr)});
}
GoalPtr Goal::log(std::string message) {
  return std::make_shared<Goal>(Log{std::move(message)});
}
GoalPtr Goal::while_loop(Atom cond, GoalPtr body) {
  if (!body) throw std::invalid_argument("while: null body");
  return std::make_shared<Goal>(While{std::move(cond), std::move(body)});
}

DefPtr Def::clause(Atom head, GoalPtr body) {
  if (!body) throw std::invalid_argument("clause: null body");
  return std::make_shared<Def>(Clause{std::move(head), std::move(body)});
}
DefPtr Def::dseq(DefPtr first, DefPtr second) {
  if (!first || !second) throw std::invalid_argument("dseq: null definition");
  return std::make_shared<Def>(DSeq{std::move(first), std::move(second)});
}
DefPtr Def::forall(std::string var, DefPtr body) {
  if (!body) throw std::invalid_argument("forall: null body");
  return std::make_shared<Def>(Forall{std::move(var), std::move(body)});
}
DefPtr Def::choice(std::vector<DefPtr> branches) {
  if (branches.empty()) throw std::invalid_argument("choice: no branches");
  for (const auto& b : branches)
    if (!b) throw std::invalid_argument("choice: null branch");
  return std::make_shared<Def>(Choice{std::move(branches)});
}

// ---------------------------------------------------------------------------
// Structural equality

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}
bool equal(const GoalPtr& a, const GoalPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}
bool equal(const DefPtr& a, const DefPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const Term& a, const Term& b) {
  return std::visit(
      overloaded{
          [&](const Term::Ident& x) {
            const auto* y = std::get_if<Term::Ident>(&b.node());
            return y && x.name == y->name;
          },
          [&](const Term::Int& x) {
            const auto* y = std::get_if<Term::Int>(&b.node());
            return y && x.value == y->value;
          },
          [&](const Term::Str& x) {
            const auto* y = std::get_if<Term::Str>(&b.node());
            return y && x.value == y->value;
          },
          [&](const Term::Var& x) {
            const auto* y = std::get_if<Term::Var>(&b.node());
            return y && x.name == y->name;
          },
          [&](const Term::BinOp& x) {
            const auto* y = std::get_if<Term::BinOp>(&b.node());
            return y && x.op == y->op && equal(x.lhs, y->lhs) &&
                   equal(x.rhs, y->rhs);
          },
      },
      a.node());
}

bool operator==(const Atom& a, const Atom& b) {
  if (const auto* x = a.as_call()) {
    const auto* y = b.as_call();
    if (!y || x->name != y->name || x->args.size() != y->args.size())
      return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!equal(x->args[i], y->args[i])) return false;
    return true;
  }
  const auto* x = a.as_field();
  const auto* y = b.as_field();
  return y && x->var == y->var && equal(x->value, y->value);
}

bool operator==(const Goal& a, const Goal& b) {
  return std::visit(
      overloaded{
          [&](const Goal::True&) {
            return std::holds_alternative<Goal::True>(b.node());
          },
          [&](const Goal::AtomGoal& x) {
            const auto* y = std::get_if<Goal::AtomGoal>(&b.node());
            return y && x.atom == y->atom;
          },
          [&](const Goal::Assign& x) {
            const auto* y = std::get_if<Goal::Assign>(&b.node());
            return y && x.var == y->var && equal(x.expr, y->expr);
          },
          [&](const Goal::Seq& x) {
            const auto* y = std::get_if<Goal::Seq>(&b.node());
            return y && equal(x.first, y->first) && equal(x.second, y->second);
          },
          [&](const Goal::Read& x) {
            const auto* y = std::get_if<Goal::Read>(&b.node());
            return y && x.var == y->var;
          },
          [&](const Goal::Print& x) {
            const auto* y = std::get_if<Goal::Print>(&b.node());
            return y && equal(x.expr, y->expr);
          },
          [&](const Goal::Log& x) {
            const auto* y = std::get_if<Goal::Log>(&b.node());
            return y && x.message == y->message;
          },
          [&](const Goal::While& x) {
            const auto* y = std::get_if<Goal::While>(&b.node());
            return y && x.cond == y->cond && equal(x.body, y->body);
          },
      },
      a.node());
}

bool operator==(const Def& a, const Def& b) {
  return std::visit(
      overloaded{
          [&](const Def::Clause& x) {
            const auto* y = std::get_if<Def::Clause>(&b.node());
            return y && x.head == y->head && equal(x.body, y->body);
          },
          [&](const Def::DSeq& x) {
            const auto* y = std::get_if<Def::DSeq>(&b.node());
            return y && equal(x.first, y->first) && equal(x.second, y->second);
          },
          [&](const Def::Forall& x) {
            const auto* y = std::get_if<Def::Forall>(&b.node());
            return y && x.var == y->var && equal(x.body, y->body);
          },
          [&](const Def::Choice& x) {
            const auto* y = std::get_if<Def::Choice>(&b.node());
            if (!y || x.branches.size() != y->branches.size()) return false;
            for (size_t i = 0; i < x.branches.size(); ++i)
              if (!equal(x.branches[i], y->branches[i])) return false;
            return true;
          },
      },
      a.node());
}

bool operator==(const Module& a, const Module& b) {
  return a.name == b.name && equal(a.decls, b.decls);
}

// ---------------------------------------------------------------------------
// Groundness

bool is_ground(const Term& t) {
  return std::visit(overloaded{
                        [](const Term::Var&) { return false; },
                        [](const Term::BinOp& x) {
                          return is_ground(*x.lhs) && is_ground(*x.rhs);
                        },
                        [](const auto&) { return true; },
                    },
                    t.node());
}

bool is_ground(const Atom& a) {
  if (const auto* c = a.as_call()) {
    return std::all_of(c->args.begin(), c->args.end(),
                       [](const TermPtr& t) { return is_ground(*t); });
  }
  return is_ground(*a.as_field()->value);
}

// ---------------------------------------------------------------------------
// Substitution. Untouched subtrees are returned by pointer, so the common
// no-occurrence case allocates nothing.

TermPtr substitute(const TermPtr& t, const std::string& var,
                   const TermPtr& value) {
  return std::visit(
      overloaded{
          [&](const Term::Var& x) { return x.name == var ? value : t; },
          [&](const Term::BinOp& x) {
            TermPtr lhs = substitute(x.lhs, var, value);
            TermPtr rhs = substitute(x.rhs, var, value);
            if (lhs == x.lhs && rhs == x.rhs) return t;
            return Term::binop(x.op, std::move(lhs), std::move(rhs));
          },
          [&](const auto&) { return t; },
      },
      t->node());
}

Atom substitute(const Atom& a, const std::string& var, const TermPtr& value) {
  if (const auto* c = a.as_call()) {
    std::vector<TermPtr> args;
    args.reserve(c->args.size());
    for (const auto& arg : c->args) args.push_back(substitute(arg, var, value));
    return Atom::call(c->name, std::move(args));
  }
  const auto* f = a.as_field();
  return Atom::field(f->var, substitute(f->value, var, value));
}

GoalPtr substitute(const GoalPtr& g, const std::string& var,
                   const TermPtr& value) {
  return std::visit(
      overloaded{
          [&](const Goal::AtomGoal& x) {
            return Goal::atom(substitute(x.atom, var, value));
          },
          [&](const Goal::Assign& x) {
            return Goal::assign(x.var, substitute(x.expr, var, value));
          },
          [&](const Goal::Seq& x) {
            return Goal::seq(substitute(x.first, var, value),
                             substitute(x.second, var, value));
          },
          [&](const Goal::Print& x) {
            return Goal::print(substitute(x.expr, var, value));
          },
          [&](const Goal::While& x) {
            return Goal::while_loop(substitute(x.cond, var, value),
                                    substitute(x.body, var, value));
          },
          [&](const auto&) { return g; },
      },
      g->node());
}

DefPtr substitute(const DefPtr& d, const std::string& var,
                  const TermPtr& value) {
  return std::visit(
      overloaded{
          [&](const Def::Clause& x) {
            return Def::clause(substitute(x.head, var, value),
                               substitute(x.body, var, value));
          },
          [&](const Def::DSeq& x) {
            return Def::dseq(substitute(x.first, var, value),
                             substitute(x.second, var, value));
          },
          [&](const Def::Forall& x) {
            // An inner binder of the same name shadows the substitution.
            if (x.var == var) return d;
            return Def::forall(x.var, substitute(x.body, var, value));
          },
          [&](const Def::Choice& x) {
            std::vector<DefPtr> branches;
            branches.reserve(x.branches.size());
            for (const auto& b : x.branches)
              branches.push_back(substitute(b, var, value));
            return Def::choice(std::move(branches));
          },
      },
      d->node());
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void collect_term_vars(const Term& t, const std::set<std::string>& bound,
                       std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Term::Var& x) {
                   if (!bound.count(x.name)) out.insert(x.name);
                 },
                 [&](const Term::BinOp& x) {
                   collect_term_vars(*x.lhs, bound, out);
                   collect_term_vars(*x.rhs, bound, out);
                 },
                 [](const auto&) {},
             },
             t.node());
}

void collect_atom_vars(const Atom& a, const std::set<std::string>& bound,
                       std::set<std::string>& out) {
  if (const auto* c = a.as_call()) {
    for (const auto& arg : c->args) collect_term_vars(*arg, bound, out);
  } else {
    collect_term_vars(*a.as_field()->value, bound, out);
  }
}

void collect_goal_vars(const Goal& g, const std::set<std::string>& bound,
                       std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Goal::AtomGoal& x) {
                   collect_atom_vars(x.atom, bound, out);
                 },
                 [&](const Goal::Assign& x) {
                   collect_term_vars(*x.expr, bound, out);
                 },
                 [&](const Goal::Seq& x) {
                   collect_goal_vars(*x.first, bound, out);
                   collect_goal_vars(*x.second, bound, out);
                 },
                 [&](const Goal::Print& x) {
                   collect_term_vars(*x.expr, bound, out);
                 },
                 [&](const Goal::While& x) {
                   collect_atom_vars(x.cond, bound, out);
                   collect_goal_vars(*x.body, bound, out);
                 },
                 [](const auto&) {},
             },
             g.node());
}

void collect_def_vars(const Def& d, std::set<std::string> bound,
                      std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Def::Clause& x) {
                   collect_atom_vars(x.head, bound, out);
                   collect_goal_vars(*x.body, bound, out);
                 },
                 [&](const Def::DSeq& x) {
                   collect_def_vars(*x.first, bound, out);
                   collect_def_vars(*x.second, bound, out);
                 },
                 [&](const Def::Forall& x) {
                   bound.insert(x.var);
                   collect_def_vars(*x.body, std::move(bound), out);
                 },
                 [&](const Def::Choice& x) {
                   for (const auto& b : x.branches)
                     collect_def_vars(*b, bound, out);
                 },
             },
             d.node());
}

}  // namespace

std::vector<std::string> free_vars(const Def& d) {
  std::set<std::string> out;
  collect_def_vars(d, {}, out);
  return {out.begin(), out.end()};
}

bool is_closed(const Def& d) { return free_vars(d).empty(); }

// ---------------------------------------------------------------------------
// Pretty printing
//
// The printer emits the canonical concrete syntax. Two context rules keep
// parse(pretty(x)) == x for parser-producible trees:
//   - Forall binders are implicit: a clause prints its head with parameter
//     names and the parser re-derives the binders from the head.
//   - A body-less clause prints bare (`x == v`), except directly after a
//     clause that printed an explicit body, where the bare form would be
//     swallowed into that body; there it prints `head = true`.

namespace {

int precedence(BinaryOp op) {
  return (op == BinaryOp::Add || op == BinaryOp::Sub) ? 1 : 2;
}

void print_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
}

void print_term(std::string& out, const Term& t, int parent_prec,
                bool right_child) {
  std::visit(
      overloaded{
          [&](const Term::Ident& x) { out += x.name; },
          [&](const Term::Int& x) { out += std::to_string(x.value); },
          [&](const Term::Str& x) { print_escaped(out, x.value); },
          [&](const Term::Var& x) { out += x.name; },
          [&](const Term::BinOp& x) {
            int prec = precedence(x.op);
            bool parens =
                prec < parent_prec || (prec == parent_prec && right_child);
            if (parens) out += '(';
            print_term(out, *x.lhs, prec, false);
            out += ' ';
            out += binary_op_symbol(x.op);
            out += ' ';
            print_term(out, *x.rhs, prec, true);
            if (parens) out += ')';
          },
      },
      t.node());
}

void print_atom(std::string& out, const Atom& a) {
  if (const auto* c = a.as_call()) {
    out += c->name;
    out += '(';
    for (size_t i = 0; i < c->args.size(); ++i) {
      if (i) out += ", ";
      print_term(out, *c->args[i], 0, false);
    }
    out += ')';
  } else {
    const auto* f = a.as_field();
    out += f->var;
    out += " == ";
    print_term(out, *f->value, 0, false);
  }
}

bool is_true_cond(const Atom& a) {
  const auto* c = a.as_call();
  return c && c->name == "true" && c->args.empty();
}

void print_goal_seq(std::string& out, const Goal& g) {
  if (const auto* s = std::get_if<Goal::Seq>(&g.node())) {
    print_goal_seq(out, *s->first);
    out += "; ";
    print_goal_seq(out, *s->second);
    return;
  }
  std::visit(overloaded{
                 [&](const Goal::True&) { out += "true"; },
                 [&](const Goal::AtomGoal& x) { print_atom(out, x.atom); },
                 [&](const Goal::Assign& x) {
                   out += x.var;
                   out += " = ";
                   print_term(out, *x.expr, 0, false);
                 },
                 [&](const Goal::Seq&) {},  // handled above
                 [&](const Goal::Read& x) {
                   out += "read(";
                   out += x.var;
                   out += ')';
                 },
                 [&](const Goal::Print& x) {
                   out += "print(";
                   print_term(out, *x.expr, 0, false);
                   out += ')';
                 },
                 [&](const Goal::Log& x) {
                   out += "log(";
                   print_escaped(out, x.message);
                   out += ')';
                 },
                 [&](const Goal::While& x) {
                   out += "while (";
                   if (is_true_cond(x.cond))
                     out += "true";
                   else
                     print_atom(out, x.cond);
                   out += ") ";
                   print_goal_seq(out, *x.body);
                   out += " endwhile";
                 },
             },
             g.node());
}

void flatten_dseq(const Def& d, std::vector<const Def*>& units) {
  if (const auto* s = std::get_if<Def::DSeq>(&d.node())) {
    flatten_dseq(*s->first, units);
    flatten_dseq(*s->second, units);
  } else {
    units.push_back(&d);
  }
}

// Peels the Forall spine; binders are implicit in the printed clause head.
const Def& strip_foralls(const Def& d) {
  const Def* p = &d;
  while (const auto* f = std::get_if<Def::Forall>(&p->node())) p = f->body.get();
  return *p;
}

bool is_true_body(const Goal& g) {
  return std::holds_alternative<Goal::True>(g.node());
}

void print_def_units(std::string& out, const Def& d, const char* sep);

// Returns true when the unit printed an explicit `= goal` body.
bool print_def_unit(std::string& out, const Def& d, bool force_body) {
  const Def& stripped = strip_foralls(d);
  if (const auto* c = std::get_if<Def::Clause>(&stripped.node())) {
    print_atom(out, c->head);
    if (!is_true_body(*c->body) || force_body) {
      out += " = ";
      print_goal_seq(out, *c->body);
      return true;
    }
    return false;
  }
  if (const auto* ch = std::get_if<Def::Choice>(&stripped.node())) {
    out += "uchoo(";
    for (size_t i = 0; i < ch->branches.size(); ++i) {
      if (i) out += ", ";
      print_def_units(out, *ch->branches[i], "; ");
    }
    out += ')';
    return false;
  }
  return false;  // DSeq is flattened by the caller
}

void print_def_units(std::string& out, const Def& d, const char* sep) {
  std::vector<const Def*> units;
  flatten_dseq(d, units);
  bool open_body = false;
  for (size_t i = 0; i < units.size(); ++i) {
    if (i) out += sep;
    open_body = print_def_unit(out, *units[i], open_body);
  }
}

}  // namespace

std::string pretty(const Term& t) {
  std::string out;
  print_term(out, t, 0, false);
  return out;
}

std::string pretty(const Atom& a) {
  std::string out;
  print_atom(out, a);
  return out;
}

std::string pretty(const Goal& g) {
  std::string out;
  print_goal_seq(out, g);
  return out;
}

std::string pretty(const Def& d) {
  std::string out;
  print_def_units(out, d, "; ");
  return out;
}

std::string pretty(const Module& m) {
  std::string out = "module " + m.name + "\n";
  print_def_units(out, *m.decls, ";\n");
  return out;
}

}  // namespace uchoo
