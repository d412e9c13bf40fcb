#pragma once

#include <optional>
#include <string>
#include <vector>

namespace uchoo {

enum class EventKind {
  RuleApplied,
  ChoiceEnter,
  BranchTry,
  BranchCommit,
  Backtrack,
  StateUpdate,
  IoRead,
  IoEmit,
  Failure,
};

/// Hyphenated name as it appears in rendered traces: "rule-applied",
/// "choice-enter", "branch-try", "branch-commit", "backtrack",
/// "state-update", "io-read", "io-emit", "failure".
const char* event_kind_name(EventKind kind);

/// One step of a run: a transition-rule application, choice-point
/// bookkeeping, a state update, or an I/O action. `rule` carries the
/// engine's rule id (1-10, see engine.hpp) when one applies.
struct TraceEvent {
  int step;
  EventKind kind;
  std::optional<int> rule;
  std::string detail;
  int depth;
};

enum class RunOutcome { Success, Failure, BudgetExceeded };

/// "success", "failure", or "budget-exceeded".
const char* run_outcome_name(RunOutcome outcome);

/// The full exploration record of one run, including trials that were
/// later undone by backtracking. Events are appended in execution order
/// with strictly increasing step ordinals.
struct Derivation {
  std::vector<TraceEvent> events;
  RunOutcome outcome = RunOutcome::Failure;
};

/// One line per event, indented two spaces per depth level:
/// `<kind> [<rule>] [<detail>]`. The format is a stability surface:
/// identical runs render byte-identically.
std::string render_text(const Derivation& d);

/// Compact JSON with fixed field order:
/// {"outcome":string,"events":[{"step":int,"kind":string,"rule":int|null,
/// "detail":string,"depth":int}]}
std::string render_json(const Derivation& d);

/// Append-only event sink used by the engine while a run executes.
class TraceBuilder {
public:
  void record(EventKind kind, std::optional<int> rule, std::string detail,
              int depth);
  Derivation finish(RunOutcome outcome);

private:
  std::vector<TraceEvent> events_;
  int next_step_ = 1;
};

}  // namespace uchoo
