#include "uchoo/oracle.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace uchoo::oracle {

bool operator==(const ChoiceStep& a, const ChoiceStep& b) {
  return a.point == b.point && a.branch == b.branch;
}

namespace {

struct Context {
  std::map<const Def*, int> point_ids;
  std::set<std::string> field_constants;
  const Def* defs = nullptr;
  int max_depth = 0;
};

void note_field_value(Context& ctx, const TermPtr& value) {
  if (const auto* id = std::get_if<Term::Ident>(&value->node()))
    ctx.field_constants.insert(id->name);
}

void scan_goal(Context& ctx, const Goal& g) {
  if (const auto* atom = std::get_if<Goal::AtomGoal>(&g.node())) {
    if (const auto* f = atom->atom.as_field()) note_field_value(ctx, f->value);
    return;
  }
  if (const auto* seq = std::get_if<Goal::Seq>(&g.node())) {
    scan_goal(ctx, *seq->first);
    scan_goal(ctx, *seq->second);
    return;
  }
  if (const auto* loop = std::get_if<Goal::While>(&g.node())) {
    if (const auto* f = loop->cond.as_field()) note_field_value(ctx, f->value);
    scan_goal(ctx, *loop->body);
  }
}

void index_defs(Context& ctx, const Def& d, int& next_id) {
  if (const auto* clause = std::get_if<Def::Clause>(&d.node())) {
    if (const auto* f = clause->head.as_field()) note_field_value(ctx, f->value);
    scan_goal(ctx, *clause->body);
    return;
  }
  if (const auto* seq = std::get_if<Def::DSeq>(&d.node())) {
    ctx.point_ids[&d] = next_id++;
    index_defs(ctx, *seq->first, next_id);
    index_defs(ctx, *seq->second, next_id);
    return;
  }
  if (const auto* all = std::get_if<Def::Forall>(&d.node())) {
    index_defs(ctx, *all->body, next_id);
    return;
  }
  const auto& choice = std::get<Def::Choice>(d.node());
  ctx.point_ids[&d] = next_id++;
  for (const auto& b : choice.branches) index_defs(ctx, *b, next_id);
}

// Value-position folding: identifiers denote themselves, arithmetic folds
// over integer literals only.
std::optional<TermPtr> fold_value(const TermPtr& t) {
  if (std::get_if<Term::Var>(&t->node())) return std::nullopt;
  const auto* op = std::get_if<Term::BinOp>(&t->node());
  if (!op) return t;
  auto lhs = fold_value(op->lhs);
  auto rhs = fold_value(op->rhs);
  if (!lhs || !rhs) return std::nullopt;
  const auto* li = std::get_if<Term::Int>(&(*lhs)->node());
  const auto* ri = std::get_if<Term::Int>(&(*rhs)->node());
  if (!li || !ri) return std::nullopt;
  switch (op->op) {
    case BinaryOp::Add:
      return Term::integer(li->value + ri->value);
    case BinaryOp::Sub:
      return Term::integer(li->value - ri->value);
    case BinaryOp::Mul:
      return Term::integer(li->value * ri->value);
    case BinaryOp::Div:
      if (ri->value == 0) return std::nullopt;
      return Term::integer(li->value / ri->value);
  }
  return std::nullopt;
}

// Expression-position evaluation: bound identifiers resolve through the
// state, identifiers known as field constants denote themselves, anything
// else is a (silent) branch failure.
std::optional<TermPtr> eval(const Context& ctx, const State& s,
                            const TermPtr& t) {
  if (const auto* i = std::get_if<Term::Int>(&t->node())) {
    (void)i;
    return t;
  }
  if (std::get_if<Term::Str>(&t->node())) return t;
  if (const auto* id = std::get_if<Term::Ident>(&t->node())) {
    if (const TermPtr* bound = s.lookup(id->name)) return *bound;
    if (ctx.field_constants.count(id->name)) return t;
    return std::nullopt;
  }
  if (std::get_if<Term::Var>(&t->node())) return std::nullopt;
  const auto& op = std::get<Term::BinOp>(t->node());
  auto lhs = eval(ctx, s, op.lhs);
  auto rhs = eval(ctx, s, op.rhs);
  if (!lhs || !rhs) return std::nullopt;
  const auto* li = std::get_if<Term::Int>(&(*lhs)->node());
  const auto* ri = std::get_if<Term::Int>(&(*rhs)->node());
  if (!li || !ri) return std::nullopt;
  switch (op.op) {
    case BinaryOp::Add:
      return Term::integer(li->value + ri->value);
    case BinaryOp::Sub:
      return Term::integer(li->value - ri->value);
    case BinaryOp::Mul:
      return Term::integer(li->value * ri->value);
    case BinaryOp::Div:
      if (ri->value == 0) return std::nullopt;
      return Term::integer(li->value / ri->value);
  }
  return std::nullopt;
}

std::optional<Atom> eval_atom(const Context& ctx, const State& s,
                              const Atom& a) {
  if (const auto* c = a.as_call()) {
    std::vector<TermPtr> args;
    args.reserve(c->args.size());
    for (const auto& arg : c->args) {
      auto v = eval(ctx, s, arg);
      if (!v) return std::nullopt;
      args.push_back(*v);
    }
    return Atom::call(c->name, std::move(args));
  }
  const auto* f = a.as_field();
  auto v = fold_value(f->value);
  if (!v) return std::nullopt;
  return Atom::field(f->var, *v);
}

bool term_is_simple(const Term& t) {
  return std::get_if<Term::Ident>(&t.node()) ||
         std::get_if<Term::Int>(&t.node()) ||
         std::get_if<Term::Str>(&t.node());
}

std::optional<std::map<std::string, TermPtr>> match(const Atom& head,
                                                    const Atom& call) {
  const auto* hc = head.as_call();
  const auto* cc = call.as_call();
  if (hc && cc) {
    if (hc->name != cc->name) return std::nullopt;
    if (hc->args.size() != cc->args.size()) return std::nullopt;
    std::map<std::string, TermPtr> binding;
    for (size_t i = 0; i < hc->args.size(); ++i) {
      const TermPtr& pattern = hc->args[i];
      const TermPtr& value = cc->args[i];
      if (const auto* v = std::get_if<Term::Var>(&pattern->node())) {
        auto it = binding.find(v->name);
        if (it == binding.end()) {
          binding[v->name] = value;
        } else if (!(*it->second == *value)) {
          return std::nullopt;
        }
        continue;
      }
      if (!term_is_simple(*pattern)) return std::nullopt;
      if (!(*pattern == *value)) return std::nullopt;
    }
    return binding;
  }
  const auto* hf = head.as_field();
  const auto* cf = call.as_field();
  if (!hf || !cf) return std::nullopt;
  if (hf->var != cf->var) return std::nullopt;
  if (!is_ground(*hf->value)) return std::nullopt;
  if (!(*hf->value == *cf->value)) return std::nullopt;
  return std::map<std::string, TermPtr>{};
}

// Selection side effect: every body-less field clause on the branch's
// DSeq spine asserts its binding.
State commit_selection(State s, const Def& branch) {
  std::vector<const Def*> stack{&branch};
  while (!stack.empty()) {
    const Def* d = stack.back();
    stack.pop_back();
    if (const auto* seq = std::get_if<Def::DSeq>(&d->node())) {
      stack.push_back(seq->second.get());
      stack.push_back(seq->first.get());
      continue;
    }
    const auto* clause = std::get_if<Def::Clause>(&d->node());
    if (!clause) continue;
    const auto* f = clause->head.as_field();
    if (!f) continue;
    if (!std::get_if<Goal::True>(&clause->body->node())) continue;
    auto v = fold_value(f->value);
    if (!v) continue;
    s = s.with(f->var, *v);
  }
  return s;
}

struct Derived {
  std::vector<ChoiceStep> choices;
  State state;
};

struct Enumerator {
  Context ctx;

  void check_depth(int depth) const {
    if (depth > ctx.max_depth)
      throw OracleError("derivation depth bound exceeded");
  }

  void exec_all(const State& s, const Goal& g, int depth,
                const std::vector<ChoiceStep>& path,
                std::vector<Derived>& out) {
    check_depth(depth);
    if (std::get_if<Goal::True>(&g.node())) {
      out.push_back(Derived{path, s});
      return;
    }
    if (const auto* assign = std::get_if<Goal::Assign>(&g.node())) {
      auto v = eval(ctx, s, assign->expr);
      if (v) out.push_back(Derived{path, s.with(assign->var, *v)});
      return;
    }
    if (const auto* seq = std::get_if<Goal::Seq>(&g.node())) {
      std::vector<Derived> mids;
      exec_all(s, *seq->first, depth + 1, path, mids);
      for (const auto& mid : mids)
        exec_all(mid.state, *seq->second, depth + 1, mid.choices, out);
      return;
    }
    if (const auto* atom = std::get_if<Goal::AtomGoal>(&g.node())) {
      auto ground = eval_atom(ctx, s, atom->atom);
      if (!ground) return;
      if (const auto* f = ground->as_field()) {
        if (s.binds_to(f->var, *f->value)) {
          out.push_back(Derived{path, s});
          return;
        }
      }
      if (ctx.defs) bc_all(s, *ctx.defs, *ground, depth + 1, path, out);
      return;
    }
    if (const auto* print = std::get_if<Goal::Print>(&g.node())) {
      if (eval(ctx, s, print->expr)) out.push_back(Derived{path, s});
      return;
    }
    if (std::get_if<Goal::Log>(&g.node())) {
      out.push_back(Derived{path, s});
      return;
    }
    if (std::get_if<Goal::Read>(&g.node()))
      throw OracleError("enumeration does not support read");
    throw OracleError("enumeration does not support while");
  }

  void bc_all(const State& s, const Def& d, const Atom& a, int depth,
              const std::vector<ChoiceStep>& path, std::vector<Derived>& out) {
    check_depth(depth);
    if (const auto* seq = std::get_if<Def::DSeq>(&d.node())) {
      int id = ctx.point_ids.at(&d);
      std::vector<ChoiceStep> left = path;
      left.push_back(ChoiceStep{id, 0});
      bc_all(s, *seq->first, a, depth + 1, left, out);
      std::vector<ChoiceStep> right = path;
      right.push_back(ChoiceStep{id, 1});
      bc_all(s, *seq->second, a, depth + 1, right, out);
      return;
    }
    if (const auto* choice = std::get_if<Def::Choice>(&d.node())) {
      int id = ctx.point_ids.at(&d);
      for (size_t i = 0; i < choice->branches.size(); ++i) {
        std::vector<ChoiceStep> taken = path;
        taken.push_back(ChoiceStep{id, static_cast<int>(i)});
        std::vector<Derived> proven;
        bc_all(s, *choice->branches[i], a, depth + 1, taken, proven);
        for (auto& result : proven) {
          result.state = commit_selection(result.state, *choice->branches[i]);
          out.push_back(std::move(result));
        }
      }
      return;
    }
    // Forall chain down to a clause.
    std::vector<std::string> binders;
    const Def* node = &d;
    while (const auto* all = std::get_if<Def::Forall>(&node->node())) {
      binders.push_back(all->var);
      node = all->body.get();
    }
    const auto* clause = std::get_if<Def::Clause>(&node->node());
    if (!clause) return;
    auto binding = match(clause->head, a);
    if (!binding) return;
    for (const auto& b : binders)
      if (!binding->count(b)) return;
    GoalPtr body = clause->body;
    for (const auto& [name, value] : *binding)
      body = substitute(body, name, value);
    exec_all(s, *body, depth + 1, path, out);
  }
};

}  // namespace

std::vector<Enumeration> enumerate(const Program& p, const GoalPtr& g,
                                   const Limits& limits) {
  Enumerator en;
  en.ctx.max_depth = limits.max_depth;
  en.ctx.defs = p.defs.get();
  if (p.defs) {
    int next_id = 0;
    index_defs(en.ctx, *p.defs, next_id);
    int points = static_cast<int>(en.ctx.point_ids.size());
    if (points > limits.max_choice_points)
      throw OracleError("too many choice points: " + std::to_string(points));
  }
  std::vector<Derived> results;
  en.exec_all(p.state, *g, 0, {}, results);
  std::vector<Enumeration> out;
  out.reserve(results.size());
  for (auto& r : results)
    out.push_back(Enumeration{std::move(r.choices), std::move(r.state)});
  return out;
}

}  // namespace uchoo::oracle
