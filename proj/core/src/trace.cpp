#include "uchoo/trace.hpp"

#include <nlohmann/json.hpp>

namespace uchoo {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::RuleApplied:
      return "rule-applied";
    case EventKind::ChoiceEnter:
      return "choice-enter";
    case EventKind::BranchTry:
      return "branch-try";
    case EventKind::BranchCommit:
      return "branch-commit";
    case EventKind::Backtrack:
      return "backtrack";
    case EventKind::StateUpdate:
      return "state-update";
    case EventKind::IoRead:
      return "io-read";
    case EventKind::IoEmit:
      return "io-emit";
    case EventKind::Failure:
      return "failure";
  }
  return "?";
}

const char* run_outcome_name(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Success:
      return "success";
    case RunOutcome::Failure:
      return "failure";
    case RunOutcome::BudgetExceeded:
      return "budget-exceeded";
  }
  return "?";
}

std::string render_text(const Derivation& d) {
  std::string out;
  for (const auto& e : d.events) {
    out.append(static_cast<size_t>(e.depth) * 2, ' ');
    out += event_kind_name(e.kind);
    if (e.rule) {
      out += ' ';
      out += std::to_string(*e.rule);
    }
    if (!e.detail.empty()) {
      out += ' ';
      out += e.detail;
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Derivation& d) {
  nlohmann::ordered_json doc;
  doc["outcome"] = run_outcome_name(d.outcome);
  auto& events = doc["events"] = nlohmann::ordered_json::array();
  for (const auto& e : d.events) {
    nlohmann::ordered_json ev;
    ev["step"] = e.step;
    ev["kind"] = event_kind_name(e.kind);
    if (e.rule)
      ev["rule"] = *e.rule;
    else
      ev["rule"] = nullptr;
    ev["detail"] = e.detail;
    ev["depth"] = e.depth;
    events.push_back(std::move(ev));
  }
  return doc.dump();
}

void TraceBuilder::record(EventKind kind, std::optional<int> rule,
                          std::string detail, int depth) {
  events_.push_back(
      TraceEvent{next_step_++, kind, rule, std::move(detail), depth});
}

Derivation TraceBuilder::finish(RunOutcome outcome) {
  Derivation d;
  d.events = std::move(events_);
  d.outcome = outcome;
  events_.clear();
  next_step_ = 1;
  return d;
}

}  // namespace uchoo
