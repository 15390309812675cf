#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "taskid/core.hpp"

namespace taskid {

/// Activation of one chunk: base-level + spreading + partial match.
struct Activation {
  double base = 0.0;
  double spreading = 0.0;
  double partial = 0.0;

  double total() const { return base + spreading + partial; }
};

struct Retrieval {
  Eigen::VectorXd probs;
  std::size_t retained = 0;
  bool degenerate = false;
};

/// Boltzmann retrieval with temperature `noise`. When `threshold` is given,
/// chunks below it get probability 0; if that would discard every chunk the
/// softmax falls back to all chunks and flags the result degenerate.
template <typename Derived>
Retrieval softmax_retrieval(const Eigen::MatrixBase<Derived>& activations, double noise,
                            std::optional<double> threshold = std::nullopt) {
  const Eigen::Index n = activations.size();
  if (n == 0) throw std::invalid_argument("retrieval over an empty chunk list");
  if (!(noise > 0.0)) throw std::invalid_argument("noise s must be > 0");

  Eigen::Array<bool, Eigen::Dynamic, 1> keep =
      threshold ? (activations.array() >= *threshold).eval()
                : Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, true);
  Retrieval out;
  out.retained = static_cast<std::size_t>(keep.count());
  if (out.retained == 0) {
    keep.setConstant(true);
    out.degenerate = true;
  }

  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (keep(i)) top = std::max(top, static_cast<double>(activations(i)));
  }
  out.probs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (keep(i)) out.probs(i) = std::exp((activations(i) - top) / noise);
  }
  out.probs /= out.probs.sum();
  return out;
}

/// Retrieval as used by the instance-based model: tau filtering on.
template <typename Derived>
Retrieval retrieval_probs(const Eigen::MatrixBase<Derived>& activations, const ActrParams& params) {
  return softmax_retrieval(activations, params.noise, params.tau);
}

// ---------------------------------------------------------------------------
// Instance-based model: every training sample is a chunk.

Activation ib_activation(const Corpus& memory, const ActrParams& params,
                         const EncodedQuery& query, std::size_t j);
Activation ib_activation(const Corpus& memory, const ActrParams& params,
                         const AttributeSet& query, std::size_t j);

/// Activations of every memory chunk against one query, computed from the
/// attribute postings rather than by per-pair set intersection.
std::vector<Activation> ib_activations(const Corpus& memory, const ActrParams& params,
                                       const EncodedQuery& query);

Prediction ib_predict(const Corpus& memory, const ActrParams& params, const EncodedQuery& query,
                      Mode mode);
Prediction ib_predict(const Corpus& memory, const ActrParams& params, const AttributeSet& query,
                      Mode mode);

// ---------------------------------------------------------------------------
// Rule-based model: each label (family, or task in direct mode) is a chunk.

/// Smoothed conditional probabilities of attribute presence per label.
///
/// Rows cover the attributes seen in training; `row_of` maps a vocabulary
/// index to its row or -1.
struct RuleTable {
  std::vector<std::string> labels;
  Eigen::VectorXd prior;       // p(label)
  Eigen::MatrixXd p_given;     // rows x labels: p(a | label)
  Eigen::MatrixXd p_not_given; // rows x labels: p(a | not label)
  std::vector<int> row_of;
  double smoothing = 1.0;
  Mode mode = Mode::Family;

  int row(AttrIndex a) const { return a < row_of.size() ? row_of[a] : -1; }
};

/// Family-mode rules: one chunk per family.
RuleTable rb_train(const Corpus& corpus, double smoothing = 1.0);
/// Direct-mode rules: one chunk per task, contrasted against its complement.
RuleTable rb_train_tasks(const Corpus& corpus, double smoothing = 1.0);

/// Base-level plus spreading activation for every label of the table.
std::vector<Activation> rb_activations(const RuleTable& rules, const ActrParams& params,
                                       const EncodedQuery& query);

Prediction rb_predict(const RuleTable& rules, const Corpus& corpus, const ActrParams& params,
                      const EncodedQuery& query);
Prediction rb_predict(const RuleTable& rules, const Corpus& corpus, const ActrParams& params,
                      const AttributeSet& query);

}  // namespace taskid
