#include "taskid/metrics.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace taskid {

SampleScore score_sample(const TaskSet& predicted, const TaskSet& truth) {
  if (truth.empty()) throw std::invalid_argument("ground-truth task set is empty");
  const TaskSet p = make_task_set(predicted);
  const TaskSet t = make_task_set(truth);
  TaskSet hit;
  std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(hit));

  SampleScore s;
  const double h = static_cast<double>(hit.size());
  s.precision = p.empty() ? 0.0 : h / static_cast<double>(p.size());
  s.recall = h / static_cast<double>(t.size());
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace taskid
