#include "uchoo/engine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>

namespace uchoo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_true_cond(const Atom& a) {
  const auto* c = a.as_call();
  return c && c->name == "true" && c->args.empty();
}

std::string cond_text(const Atom& c) {
  return is_true_cond(c) ? "true" : pretty(c);
}

// Rendering for emitted program output: strings verbatim, no quotes.
std::string render_plain(const Term& t) {
  if (const auto* s = std::get_if<Term::Str>(&t.node())) return s->value;
  return pretty(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// State

const TermPtr* State::lookup(const std::string& name) const {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : &it->second;
}

bool State::binds_to(const std::string& name, const Term& value) const {
  const TermPtr* bound = lookup(name);
  return bound && **bound == value;
}

State State::with(std::string name, TermPtr value) const {
  State next = *this;
  next.bindings_[std::move(name)] = std::move(value);
  return next;
}

bool operator==(const State& a, const State& b) {
  if (a.bindings_.size() != b.bindings_.size()) return false;
  auto it = b.bindings_.begin();
  for (const auto& [name, value] : a.bindings_) {
    if (it->first != name || !equal(it->second, value)) return false;
    ++it;
  }
  return true;
}

Program load_program(const SourceFile& file) {
  Program p;
  for (auto it = file.modules.rbegin(); it != file.modules.rend(); ++it)
    p.defs = p.defs ? Def::dseq(it->decls, p.defs) : it->decls;
  return p;
}

// ---------------------------------------------------------------------------
// I/O ports

std::optional<std::string> StreamIoPort::next_input() {
  std::string line;
  if (!std::getline(*in_, line)) return std::nullopt;
  return line;
}

void StreamIoPort::emit(std::string_view text) {
  (*out_) << text;
  out_->flush();
}

std::optional<std::string> ScriptIoPort::next_input() {
  if (next_ >= inputs_.size()) return std::nullopt;
  return inputs_[next_++];
}

void ScriptIoPort::emit(std::string_view text) {
  emitted_.emplace_back(text);
}

std::string ScriptIoPort::output() const {
  std::string out;
  for (const auto& piece : emitted_) out += piece;
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

TermPtr eval_expr(const State& s, const Term& e,
                  const std::set<std::string>* symbols) {
  return std::visit(
      overloaded{
          [&](const Term::Int& x) { return Term::integer(x.value); },
          [&](const Term::Str& x) { return Term::str(x.value); },
          [&](const Term::Ident& x) {
            if (const TermPtr* bound = s.lookup(x.name)) return *bound;
            if (symbols && symbols->count(x.name)) return Term::ident(x.name);
            throw EvalError("unbound variable " + x.name);
          },
          [&](const Term::Var& x) -> TermPtr {
            throw EvalError("unsubstituted parameter " + x.name);
          },
          [&](const Term::BinOp& x) {
            TermPtr lhs = eval_expr(s, *x.lhs, symbols);
            TermPtr rhs = eval_expr(s, *x.rhs, symbols);
            const auto* li = std::get_if<Term::Int>(&lhs->node());
            const auto* ri = std::get_if<Term::Int>(&rhs->node());
            if (!li || !ri)
              throw EvalError("arithmetic on a non-integer value");
            long long result = 0;
            switch (x.op) {
              case BinaryOp::Add:
                result = li->value + ri->value;
                break;
              case BinaryOp::Sub:
                result = li->value - ri->value;
                break;
              case BinaryOp::Mul:
                result = li->value * ri->value;
                break;
              case BinaryOp::Div:
                if (ri->value == 0) throw EvalError("division by zero");
                result = li->value / ri->value;
                break;
            }
            return Term::integer(result);
          },
      },
      e.node());
}

namespace {

// Field values are value position: identifiers denote themselves and are
// never resolved through the state. Arithmetic over integer literals
// still folds so stored values stay fully evaluated.
TermPtr eval_field_value(const TermPtr& t) {
  return std::visit(
      overloaded{
          [&](const Term::Var& x) -> TermPtr {
            throw EvalError("unsubstituted parameter " + x.name);
          },
          [&](const Term::BinOp& x) {
            TermPtr lhs = eval_field_value(x.lhs);
            TermPtr rhs = eval_field_value(x.rhs);
            const auto* li = std::get_if<Term::Int>(&lhs->node());
            const auto* ri = std::get_if<Term::Int>(&rhs->node());
            if (!li || !ri)
              throw EvalError("arithmetic on a non-integer value");
            long long result = 0;
            switch (x.op) {
              case BinaryOp::Add:
                result = li->value + ri->value;
                break;
              case BinaryOp::Sub:
                result = li->value - ri->value;
                break;
              case BinaryOp::Mul:
                result = li->value * ri->value;
                break;
              case BinaryOp::Div:
                if (ri->value == 0) throw EvalError("division by zero");
                result = li->value / ri->value;
                break;
            }
            return Term::integer(result);
          },
          [&](const auto&) { return t; },
      },
      t->node());
}

bool is_literal(const Term& t) {
  return std::holds_alternative<Term::Ident>(t.node()) ||
         std::holds_alternative<Term::Int>(t.node()) ||
         std::holds_alternative<Term::Str>(t.node());
}

}  // namespace

std::optional<Substitution> match_atom(const Atom& head, const Atom& call) {
  if (const auto* hc = head.as_call()) {
    const auto* cc = call.as_call();
    if (!cc || hc->name != cc->name || hc->args.size() != cc->args.size())
      return std::nullopt;
    Substitution sub;
    for (size_t i = 0; i < hc->args.size(); ++i) {
      const Term& pattern = *hc->args[i];
      const TermPtr& value = cc->args[i];
      if (const auto* v = std::get_if<Term::Var>(&pattern.node())) {
        auto [it, inserted] = sub.emplace(v->name, value);
        if (!inserted && !equal(it->second, value)) return std::nullopt;
      } else if (is_literal(pattern)) {
        if (!(pattern == *value)) return std::nullopt;
      } else {
        return std::nullopt;  // compound head arguments never match
      }
    }
    return sub;
  }
  const auto* hf = head.as_field();
  const auto* cf = call.as_field();
  if (!cf || hf->var != cf->var) return std::nullopt;
  if (!is_ground(*hf->value)) return std::nullopt;
  if (!(*hf->value == *cf->value)) return std::nullopt;
  return Substitution{};
}

State commit_assert(
    const State& s, const Def& branch,
    const std::function<void(const std::string&, const TermPtr&)>&
        on_change) {
  State result = s;
  // Walk the DSeq spine only; nested blocks keep their own selections.
  auto walk = [&](auto&& self, const Def& d) -> void {
    if (const auto* seq = std::get_if<Def::DSeq>(&d.node())) {
      self(self, *seq->first);
      self(self, *seq->second);
      return;
    }
    const auto* clause = std::get_if<Def::Clause>(&d.node());
    if (!clause) return;
    const auto* field = clause->head.as_field();
    if (!field) return;
    if (!std::holds_alternative<Goal::True>(clause->body->node())) return;
    TermPtr value;
    try {
      value = eval_field_value(field->value);
    } catch (const EvalError&) {
      return;  // not a storable value; selection asserts nothing for it
    }
    if (result.binds_to(field->var, *value)) return;
    result = result.with(field->var, value);
    if (on_change) on_change(field->var, value);
  };
  walk(walk, branch);
  return result;
}

// ---------------------------------------------------------------------------
// The interpreter

namespace {

TermPtr parse_input_value(const std::string& raw) {
  size_t begin = raw.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return Term::str("");
  size_t end = raw.find_last_not_of(" \t\r\n");
  std::string s = raw.substr(begin, end - begin + 1);

  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+' || *first == '-') ++first;
  if (first != last &&
      std::all_of(first, last,
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc{} && ptr == s.data() + s.size())
      return Term::integer(value);
  }
  bool ident = std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_';
  if (ident)
    ident = std::all_of(s.begin(), s.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
  if (ident) return Term::ident(s);
  return Term::str(s);
}

class Interp {
public:
  Interp(IoPort& io, const Budget& budget) : io_(io), budget_(budget) {}

  struct Res {
    enum class Tag { Ok, Fail, Cut };
    Tag tag = Tag::Fail;
    Program prog;
  };
  using Cont = std::function<Res(Program)>;

  static Res ok(Program p) { return Res{Res::Tag::Ok, std::move(p)}; }
  static Res fail() { return Res{Res::Tag::Fail, {}}; }
  static Res cut() { return Res{Res::Tag::Cut, {}}; }

  RunResult run_goal(const Program& p, const GoalPtr& goal) {
    if (p.defs) index_defs(*p.defs);
    Res r = exec(p, goal, 0, [](Program final_p) { return ok(std::move(final_p)); });
    RunResult out;
    switch (r.tag) {
      case Res::Tag::Ok:
        out.status = RunResult::Status::Success;
        out.program = std::move(r.prog);
        out.trace = trace_.finish(RunOutcome::Success);
        break;
      case Res::Tag::Fail:
        trace_.record(EventKind::Failure, std::nullopt, "exhausted", 0);
        out.status = RunResult::Status::Failure;
        out.program = p;
        out.trace = trace_.finish(RunOutcome::Failure);
        break;
      case Res::Tag::Cut:
        trace_.record(EventKind::Failure, std::nullopt, budget_detail_, 0);
        out.status = RunResult::Status::BudgetExceeded;
        out.program = p;
        out.trace = trace_.finish(RunOutcome::BudgetExceeded);
        break;
    }
    return out;
  }

private:
  IoPort& io_;
  Budget budget_;
  TraceBuilder trace_;
  int steps_ = 0;
  std::string budget_detail_;
  std::map<const Def*, int> choice_ids_;
  std::set<std::string> field_names_;      // fields with a definition head
  std::set<std::string> field_constants_;  // identifiers used as field values

  void index_defs(const Def& d) {
    int next_id = 1;
    auto note_field_value = [&](const TermPtr& value) {
      if (const auto* id = std::get_if<Term::Ident>(&value->node()))
        field_constants_.insert(id->name);
    };
    auto scan_goal = [&](auto&& self, const Goal& g) -> void {
      std::visit(overloaded{
                     [&](const Goal::AtomGoal& x) {
                       if (const auto* f = x.atom.as_field())
                         note_field_value(f->value);
                     },
                     [&](const Goal::Seq& x) {
                       self(self, *x.first);
                       self(self, *x.second);
                     },
                     [&](const Goal::While& x) {
                       if (const auto* f = x.cond.as_field())
                         note_field_value(f->value);
                       self(self, *x.body);
                     },
                     [](const auto&) {},
                 },
                 g.node());
    };
    auto scan = [&](auto&& self, const Def& def) -> void {
      std::visit(overloaded{
                     [&](const Def::Clause& x) {
                       if (const auto* f = x.head.as_field()) {
                         field_names_.insert(f->var);
                         note_field_value(f->value);
                       }
                       scan_goal(scan_goal, *x.body);
                     },
                     [&](const Def::DSeq& x) {
                       self(self, *x.first);
                       self(self, *x.second);
                     },
                     [&](const Def::Forall& x) { self(self, *x.body); },
                     [&](const Def::Choice& x) {
                       choice_ids_.emplace(&def, next_id++);
                       for (const auto& b : x.branches) self(self, *b);
                     },
                 },
                 def.node());
    };
    scan(scan, d);
  }

  // One step per goal or definition dispatch.
  bool tick(int depth) {
    if (++steps_ > budget_.max_steps) {
      budget_detail_ = "max steps exceeded";
      return false;
    }
    if (depth > budget_.max_depth) {
      budget_detail_ = "max depth exceeded";
      return false;
    }
    return true;
  }

  void record(EventKind kind, std::optional<int> rule, std::string detail,
              int depth) {
    trace_.record(kind, rule, std::move(detail), depth);
  }

  Res eval_failure(const EvalError& err, int depth) {
    record(EventKind::Failure, std::nullopt, err.what(), depth);
    return fail();
  }

  Res exec(Program p, const GoalPtr& g, int depth, const Cont& k) {
    if (!tick(depth)) return cut();
    return std::visit(
        overloaded{
            [&](const Goal::True&) -> Res {
              record(EventKind::RuleApplied, 8, "true", depth);
              return k(std::move(p));
            },
            [&](const Goal::Assign& x) -> Res {
              record(EventKind::RuleApplied, 9,
                     x.var + " = " + pretty(*x.expr), depth);
              TermPtr value;
              try {
                value = eval_expr(p.state, *x.expr, &field_constants_);
              } catch (const EvalError& err) {
                return eval_failure(err, depth);
              }
              if (!p.state.binds_to(x.var, *value))
                record(EventKind::StateUpdate, std::nullopt,
                       x.var + "=" + pretty(*value), depth);
              p.state = p.state.with(x.var, value);
              return k(std::move(p));
            },
            [&](const Goal::Seq& x) -> Res {
              record(EventKind::RuleApplied, 10, "seq", depth);
              return exec(std::move(p), x.first, depth + 1,
                          [this, &x, depth, &k](Program p1) {
                            return exec(std::move(p1), x.second, depth + 1, k);
                          });
            },
            [&](const Goal::AtomGoal& x) -> Res {
              Atom ground = x.atom;
              try {
                ground = evaluate_atom(p, x.atom);
              } catch (const EvalError& err) {
                return eval_failure(err, depth);
              }
              record(EventKind::RuleApplied, 7, pretty(ground), depth);
              if (const auto* f = ground.as_field()) {
                // Boolean shortcut: an already-asserted field holds.
                if (p.state.binds_to(f->var, *f->value)) return k(std::move(p));
              }
              if (!p.defs) return fail();
              DefPtr defs = p.defs;
              return bc(std::move(p), defs, ground, depth + 1, k);
            },
            [&](const Goal::Read& x) -> Res {
              std::optional<std::string> line = io_.next_input();
              if (!line) {
                record(EventKind::Failure, std::nullopt, "input exhausted",
                       depth);
                return fail();
              }
              TermPtr value = parse_input_value(*line);
              record(EventKind::IoRead, std::nullopt,
                     x.var + " <- " + pretty(*value), depth);
              if (field_names_.count(x.var)) {
                // The read value drives field selection, as a field goal.
                GoalPtr probe = Goal::atom(Atom::field(x.var, value));
                return exec(std::move(p), probe, depth + 1, k);
              }
              if (!p.state.binds_to(x.var, *value))
                record(EventKind::StateUpdate, std::nullopt,
                       x.var + "=" + pretty(*value), depth);
              p.state = p.state.with(x.var, value);
              return k(std::move(p));
            },
            [&](const Goal::Print& x) -> Res {
              TermPtr value;
              try {
                value = eval_expr(p.state, *x.expr, &field_constants_);
              } catch (const EvalError& err) {
                return eval_failure(err, depth);
              }
              std::string text = render_plain(*value);
              io_.emit(text + "\n");
              record(EventKind::IoEmit, std::nullopt, "print " + text, depth);
              return k(std::move(p));
            },
            [&](const Goal::Log& x) -> Res {
              io_.emit(x.message + "\n");
              record(EventKind::IoEmit, std::nullopt, "log " + x.message,
                     depth);
              return k(std::move(p));
            },
            [&](const Goal::While& x) -> Res {
              // Iterations are committed: the body's first solution stands,
              // and a later failure does not reopen earlier iterations.
              Program current = std::move(p);
              for (bool first = true;; first = false) {
                if (!first && !tick(depth)) return cut();
                record(EventKind::RuleApplied, std::nullopt,
                       "while (" + cond_text(x.cond) + ")", depth);
                bool holds = false;
                if (is_true_cond(x.cond)) {
                  holds = true;
                } else if (const auto* f = x.cond.as_field()) {
                  TermPtr value;
                  try {
                    value = eval_field_value(f->value);
                  } catch (const EvalError& err) {
                    return eval_failure(err, depth);
                  }
                  holds = current.state.binds_to(f->var, *value);
                }
                if (!holds) return k(std::move(current));
                Res r = exec(current, x.body, depth + 1,
                             [](Program p1) { return ok(std::move(p1)); });
                if (r.tag != Res::Tag::Ok) return r;
                current = std::move(r.prog);
              }
            },
        },
        g->node());
  }

  Atom evaluate_atom(const Program& p, const Atom& a) {
    if (const auto* c = a.as_call()) {
      std::vector<TermPtr> args;
      args.reserve(c->args.size());
      for (const auto& arg : c->args)
        args.push_back(eval_expr(p.state, *arg, &field_constants_));
      return Atom::call(c->name, std::move(args));
    }
    const auto* f = a.as_field();
    return Atom::field(f->var, eval_field_value(f->value));
  }

  Res bc(Program p, const DefPtr& d, const Atom& a, int depth, const Cont& k) {
    if (!tick(depth)) return cut();
    return std::visit(
        overloaded{
            [&](const Def::Clause& c) -> Res {
              return bc_clause(std::move(p), {}, c, a, depth, k);
            },
            [&](const Def::Forall&) -> Res {
              std::vector<std::string> binders;
              const Def* node = d.get();
              while (const auto* f = std::get_if<Def::Forall>(&node->node())) {
                binders.push_back(f->var);
                node = f->body.get();
              }
              const auto* c = std::get_if<Def::Clause>(&node->node());
              if (!c) return fail();  // binders over non-clauses don't resolve
              return bc_clause(std::move(p), binders, *c, a, depth, k);
            },
            [&](const Def::DSeq& x) -> Res {
              record(EventKind::RuleApplied, 4, "dseq left", depth);
              Res r = bc(p, x.first, a, depth + 1, k);
              if (r.tag != Res::Tag::Fail) return r;
              record(EventKind::RuleApplied, 5, "dseq right", depth);
              return bc(std::move(p), x.second, a, depth + 1, k);
            },
            [&](const Def::Choice& x) -> Res {
              int id = choice_ids_.at(d.get());
              record(EventKind::ChoiceEnter, 6, "uchoo#" + std::to_string(id),
                     depth);
              for (size_t i = 0; i < x.branches.size(); ++i) {
                std::string tag =
                    std::to_string(i + 1) + " of uchoo#" + std::to_string(id);
                record(EventKind::BranchTry, std::nullopt, tag, depth);
                const DefPtr& branch = x.branches[i];
                Res r = bc(
                    p, branch, a, depth + 1,
                    [this, &k, &branch, &tag, depth](Program p1) -> Res {
                      record(EventKind::BranchCommit, std::nullopt, tag,
                             depth);
                      p1.state = commit_assert(
                          p1.state, *branch,
                          [this, depth](const std::string& name,
                                        const TermPtr& value) {
                            record(EventKind::StateUpdate, std::nullopt,
                                   name + "=" + pretty(*value), depth);
                          });
                      return k(std::move(p1));
                    });
                if (r.tag != Res::Tag::Fail) return r;
                record(EventKind::Backtrack, std::nullopt, tag, depth);
              }
              return fail();
            },
        },
        d->node());
  }

  Res bc_clause(Program p, const std::vector<std::string>& binders,
                const Def::Clause& c, const Atom& a, int depth,
                const Cont& k) {
    std::optional<Substitution> sub = match_atom(c.head, a);
    if (!sub) return fail();
    for (const auto& binder : binders)
      if (!sub->count(binder)) return fail();  // head does not determine it
    for (const auto& binder : binders)
      record(EventKind::RuleApplied, 3,
             "forall " + binder + " := " + pretty(*sub->at(binder)), depth);
    bool field_head = c.head.as_field() != nullptr;
    record(EventKind::RuleApplied, field_head ? 2 : 1,
           "clause " + pretty(c.head), depth);
    GoalPtr body = c.body;
    for (const auto& [name, value] : *sub) body = substitute(body, name, value);
    return exec(std::move(p), body, depth + 1, k);
  }
};

}  // namespace

RunResult run(const Program& p, const GoalPtr& goal, IoPort& io,
              const Budget& budget) {
  Interp interp(io, budget);
  return interp.run_goal(p, goal);
}

}  // namespace uchoo
