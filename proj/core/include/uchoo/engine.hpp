#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uchoo/parser.hpp"
#include "uchoo/syntax.hpp"
#include "uchoo/trace.hpp"

namespace uchoo {

/// Machine state: a functional map from variable names to ground,
/// fully-evaluated values (never a BinOp). Updates build a new State, so
/// a choice point keeps its snapshot by value and backtracking restores
/// it exactly.
class State {
public:
  using Map = std::map<std::string, TermPtr>;

  State() = default;

  const TermPtr* lookup(const std::string& name) const;
  bool binds_to(const std::string& name, const Term& value) const;
  State with(std::string name, TermPtr value) const;
  const Map& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }

  friend bool operator==(const State& a, const State& b);

private:
  Map bindings_;
};

/// A program is the joined definition set of all loaded modules plus the
/// machine state. `defs` is null when the file declares no modules.
struct Program {
  DefPtr defs;
  State state;
};

/// Joins module declarations in file order (right-associated DSeq) over
/// an empty state.
Program load_program(const SourceFile& file);

/// Caps on the search. One step is charged per goal or definition
/// dispatch; depth is the derivation-tree depth. Tripping either cap
/// aborts the run with a budget-exceeded outcome, distinct from semantic
/// failure.
struct Budget {
  int max_steps = 10000;
  int max_depth = 200;
};

/// The engine's only stateful dependency. Inputs are consumed strictly
/// left to right and are not replayed on backtracking.
class IoPort {
public:
  virtual ~IoPort() = default;
  virtual std::optional<std::string> next_input() = 0;
  virtual void emit(std::string_view text) = 0;
};

/// Reads lines from an input stream, writes to an output stream.
class StreamIoPort final : public IoPort {
public:
  StreamIoPort(std::istream& in, std::ostream& out) : in_(&in), out_(&out) {}
  std::optional<std::string> next_input() override;
  void emit(std::string_view text) override;

private:
  std::istream* in_;
  std::ostream* out_;
};

/// Scripted inputs and captured outputs, for tests and `--input` runs.
class ScriptIoPort final : public IoPort {
public:
  ScriptIoPort() = default;
  explicit ScriptIoPort(std::vector<std::string> inputs)
      : inputs_(std::move(inputs)) {}

  std::optional<std::string> next_input() override;
  void emit(std::string_view text) override;

  const std::vector<std::string>& emitted() const { return emitted_; }
  std::string output() const;

private:
  std::vector<std::string> inputs_;
  size_t next_ = 0;
  std::vector<std::string> emitted_;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluates `e` to a ground value. Literals evaluate to themselves;
/// an identifier resolves through the state when bound, denotes itself
/// as a symbol when unbound but listed in `symbols` (the engine passes
/// the identifiers appearing as field constants in the loaded
/// definitions), and is an error otherwise. Arithmetic requires integer
/// operands; division truncates and division by zero is an error.
TermPtr eval_expr(const State& s, const Term& e,
                  const std::set<std::string>* symbols = nullptr);

using Substitution = std::map<std::string, TermPtr>;

/// One-way matching of a ground call against a clause head: a head
/// argument either is a literal equal to the corresponding call argument
/// or a Var bound to it, with repeated Vars binding consistently. Field
/// heads match field calls with the same name and equal ground value.
std::optional<Substitution> match_atom(const Atom& head, const Atom& call);

/// Installs every field definition on the top-level DSeq spine of a
/// proven choice branch into the state: for each body-less field clause
/// `x == v`, the binding x -> v is added or replaced. Procedure clauses
/// and nested blocks are skipped; their effects come from execution, not
/// selection. `on_change` observes actual binding changes in spine order.
State commit_assert(
    const State& s, const Def& branch,
    const std::function<void(const std::string&, const TermPtr&)>& on_change =
        {});

struct RunResult {
  enum class Status { Success, Failure, BudgetExceeded };

  Status status = Status::Failure;
  Program program;  // final program on success, the initial one otherwise
  Derivation trace;

  bool ok() const { return status == Status::Success; }
};

/// Runs a goal against a program.
///
/// The interpreter alternates between an execution phase that reduces the
/// current statement and a backchaining phase that resolves an atomic
/// goal against the definitions. All nondeterminism is resolved
/// left-to-right, depth-first, with chronological backtracking on
/// failure. Trace events tag the applied rule:
///
///   1  clause match on a procedure head; run its body
///   2  clause match on a field definition; run its body
///   3  parameter instantiation at a clause head
///   4  definition sequence, left conjunct tried first
///   5  definition sequence, right conjunct on failure of the left
///   6  choice block: try branches left to right, commit the first
///      success and assert its field definitions into the state
///   7  atomic goal: switch to backchaining (a field goal `x == v`
///      short-circuits to success when the state already binds x to v)
///   8  `true` succeeds immediately
///   9  assignment: evaluate the right-hand side and bind
///  10  sequential composition
///
/// Surface statements beyond the core rules: `read(x)` consumes one input
/// line and behaves like the field goal `x == v` for the read value v
/// (plain assignment when no definition mentions the field x); `print(e)`
/// evaluates and emits; `log(m)` emits its message; `while (c) g endwhile`
/// repeats g as long as c is `true` or holds in the state, is not a choice
/// point, and fails if a committed iteration fails.
///
/// A choice made inside a `uchoo` block does not persist: the block stays
/// in the definitions and is chosen anew on every backchain; only the
/// asserted field bindings survive, in the state.
RunResult run(const Program& p, const GoalPtr& goal, IoPort& io,
              const Budget& budget = {});

}  // namespace uchoo
