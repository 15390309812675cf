#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "taskid/core.hpp"

namespace taskid {

/// Class labels for a training corpus: y[i] in [0, n_classes).
///
/// Family mode uses the family index; direct mode trains one binary label
/// space per task (1 = sample performs the task).
struct LabelSpace {
  std::vector<int> y;
  int n_classes = 0;
  std::vector<std::string> names;
};

LabelSpace family_labels(const Corpus& corpus);
LabelSpace task_labels(const Corpus& corpus, std::size_t task);

/// Class distribution -> Prediction over families (tasks thresholded from the
/// family mass, argmax family picked).
Prediction family_prediction(const Eigen::VectorXd& probs, const Corpus& corpus,
                             double task_threshold);

// ---------------------------------------------------------------------------
// Naive Bayes, Bernoulli event model.

struct NbModel {
  Eigen::VectorXd priors;      // per class
  Eigen::VectorXd class_size;  // per class
  Eigen::MatrixXd cond;        // rows x classes: p(a present | class)
  Eigen::VectorXd log_absent;  // per class: sum over rows of log(1 - cond)
  std::vector<int> row_of;
  double smoothing = 1.0;

  int row(AttrIndex a) const { return a < row_of.size() ? row_of[a] : -1; }
};

NbModel nb_train(const Corpus& corpus, const LabelSpace& labels, double smoothing = 1.0);
Eigen::VectorXd nb_posterior(const NbModel& model, const EncodedQuery& query);

NbModel nb_train(const Corpus& corpus, double smoothing = 1.0);
Prediction nb_predict(const NbModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold = 0.5);

// ---------------------------------------------------------------------------
// Decision tree and random forest.

struct TreeOptions {
  /// Nodes holding fewer than this fraction of the root's samples become leaves.
  double min_split_fraction = 0.05;
  /// Attributes examined per node; 0 = all.
  std::size_t max_features = 0;
};

struct DtModel {
  struct Node {
    int attribute = -1;  // vocabulary index, -1 for a leaf
    int present = -1;
    int absent = -1;
    Eigen::VectorXd dist;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  int n_classes = 0;

  std::size_t depth() const;
  std::size_t leaf_count() const;
};

/// Information-gain tree. `seed` only matters when max_features limits the
/// attributes examined per node.
DtModel dt_train(const Corpus& corpus, const LabelSpace& labels, const TreeOptions& options = {},
                 std::uint64_t seed = 0);
DtModel dt_train(const Corpus& corpus, const TreeOptions& options = {});
Eigen::VectorXd dt_distribution(const DtModel& model, const EncodedQuery& query);
Prediction dt_predict(const DtModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold = 0.5);

struct RfOptions {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  /// 0 = ceil(sqrt(#attributes)).
  std::size_t max_features = 0;
  double min_split_fraction = 0.05;
};

struct RfModel {
  std::vector<DtModel> trees;
  int n_classes = 0;
};

RfModel rf_train(const Corpus& corpus, const LabelSpace& labels, const RfOptions& options,
                 std::uint64_t seed);
RfModel rf_train(const Corpus& corpus, std::size_t n_trees, std::uint64_t seed);
Eigen::VectorXd rf_distribution(const RfModel& model, const EncodedQuery& query);
Prediction rf_predict(const RfModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold = 0.5);

// ---------------------------------------------------------------------------
// Multinomial logistic regression.

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogRegOptions {
  double learning_rate = 0.1;
  double l2 = 1e-3;
  int epochs = 500;
};

using SparseDesign = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Binary design matrix over the attributes seen in `corpus` (columns ordered
/// by vocabulary index).
struct Design {
  SparseDesign x;
  std::vector<int> column_of;
};

Design make_design(const Corpus& corpus);
Eigen::RowVectorXd design_row(const std::vector<int>& column_of, Eigen::Index n_columns,
                              const EncodedQuery& query);

struct LogRegModel {
  Eigen::MatrixXd weights;  // classes x columns
  Eigen::VectorXd bias;     // classes
  std::vector<int> column_of;
  double final_objective = 0.0;
  double gradient_norm = 0.0;
  int epochs_run = 0;
};

/// Mean log-likelihood minus (l2 / 2) ||W||^2; bias unpenalized.
double logreg_objective(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const SparseDesign& x, const std::vector<int>& y, double l2);
/// Gradient of logreg_objective with respect to (weights, bias).
void logreg_gradient(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                     const SparseDesign& x, const std::vector<int>& y, double l2,
                     Eigen::MatrixXd& grad_weights, Eigen::VectorXd& grad_bias);

/// Full-batch gradient ascent from zero weights. `seed` is accepted for
/// interface uniformity; the optimizer is deterministic.
LogRegModel logreg_train(const Corpus& corpus, const LabelSpace& labels,
                         const LogRegOptions& options = {}, std::uint64_t seed = 0);
LogRegModel logreg_train(const Corpus& corpus, double learning_rate, double l2, int epochs,
                         std::uint64_t seed);
Eigen::VectorXd logreg_distribution(const LogRegModel& model, const EncodedQuery& query);
Prediction logreg_predict(const LogRegModel& model, const Corpus& corpus,
                          const EncodedQuery& query, double task_threshold = 0.5);

}  // namespace taskid
