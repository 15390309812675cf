#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "taskid/actr.hpp"
#include "taskid/baselines.hpp"
#include "taskid/core.hpp"

namespace taskid {

enum class Method { ActrIb, ActrR, NaiveBayes, DecisionTree, RandomForest, LogReg };

std::string_view to_string(Method method);
/// Accepts the CLI names: actr-ib, actr-r, nb, dt, rf, logreg.
Method parse_method(std::string_view text);

struct MethodConfig {
  ActrParams actr;
  double smoothing = 1.0;
  RfOptions forest;
  TreeOptions tree;
  LogRegOptions logreg;
};

/// A trained model in either family or direct-task mode.
class Classifier {
 public:
  virtual ~Classifier() = default;

  /// `query` must be encoded against the vocabulary of the training corpus.
  virtual Prediction predict(const EncodedQuery& query) const = 0;

  Prediction predict(const AttributeSet& query) const { return predict(training().encode(query)); }
  virtual const Corpus& training() const = 0;
};

/// In direct mode the baselines train one binary model per task; the ACT-R
/// models score tasks as chunks directly.
std::unique_ptr<Classifier> train_classifier(Method method, Mode mode, const Corpus& corpus,
                                             const MethodConfig& config, std::uint64_t seed);

}  // namespace taskid
