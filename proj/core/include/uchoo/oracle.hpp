#pragma once

#include <stdexcept>
#include <vector>

#include "uchoo/engine.hpp"
#include "uchoo/syntax.hpp"

namespace uchoo::oracle {

/// Bounds on the enumeration. `max_choice_points` counts every
/// nondeterministic definition node (DSeq splits and choice blocks) in
/// the program.
struct Limits {
  int max_depth = 64;
  int max_choice_points = 16;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One resolved nondeterministic decision: `point` is the preorder id of
/// the DSeq or choice node, `branch` the 0-based alternative taken.
struct ChoiceStep {
  int point;
  int branch;
};

bool operator==(const ChoiceStep& a, const ChoiceStep& b);

/// One successful derivation: the decisions that produced it, in
/// chronological order, and the resulting machine state.
struct Enumeration {
  std::vector<ChoiceStep> choices;
  State state;
};

/// Exhaustively enumerates every successful derivation of the goal
/// against the program, trying both conjuncts of every definition
/// sequence and every branch of every choice block. Results come in
/// lexicographic order of their choice vectors, so the first entry is
/// the derivation a left-to-right depth-first engine commits to. An
/// empty result means the goal provably fails within the depth bound.
///
/// Handles the loop-free, input-free fragment: `read` and `while` raise
/// OracleError, as do programs exceeding the configured bounds.
///
/// This is a reference implementation kept deliberately separate from
/// the engine: it shares the syntax types but re-implements evaluation,
/// matching, and selection on its own.
std::vector<Enumeration> enumerate(const Program& p, const GoalPtr& g,
                                   const Limits& limits = {});

}  // namespace uchoo::oracle
