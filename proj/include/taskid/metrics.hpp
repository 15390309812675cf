#pragma once

#include <optional>

#include "taskid/core.hpp"

namespace taskid {

struct SampleScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Unset when the true family could not have been predicted (held-out family).
  std::optional<bool> family_correct;
};

/// Task-level precision/recall/F1 for one sample. An empty prediction scores
/// precision 0. Throws std::invalid_argument on an empty truth set.
SampleScore score_sample(const TaskSet& predicted, const TaskSet& truth);

}  // namespace taskid
