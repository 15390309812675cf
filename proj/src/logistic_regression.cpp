#include <cmath>

#include "taskid/baselines.hpp"

namespace taskid {

namespace {

// Objective and, when requested, its gradient from a single pass over the scores.
double evaluate(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias, const SparseDesign& x,
                const std::vector<int>& y, double l2, Eigen::MatrixXd* grad_weights,
                Eigen::VectorXd* grad_bias) {
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd scores = x * weights.transpose();
  scores.rowwise() += bias.transpose();
  const Eigen::VectorXd top = scores.rowwise().maxCoeff();
  scores.colwise() -= top;
  const Eigen::VectorXd log_z = scores.array().exp().rowwise().sum().log();

  double ll = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    ll += scores(i, y[static_cast<std::size_t>(i)]) - log_z(i);
  }
  if (grad_weights != nullptr) {
    // residual = onehot(y) - softmax(scores)
    Eigen::MatrixXd residual = -(scores.colwise() - log_z).array().exp().matrix();
    for (Eigen::Index i = 0; i < residual.rows(); ++i) {
      residual(i, y[static_cast<std::size_t>(i)]) += 1.0;
    }
    *grad_weights = (x.transpose() * residual).transpose() / n - l2 * weights;
    *grad_bias = residual.colwise().sum().transpose() / n;
  }
  return ll / n - 0.5 * l2 * weights.squaredNorm();
}

}  // namespace

Design make_design(const Corpus& corpus) {
  Design d;
  d.column_of.assign(corpus.vocabulary().size(), -1);
  int cols = 0;
  for (AttrIndex a = 0; a < d.column_of.size(); ++a) {
    if (corpus.fan(a) > 0) d.column_of[a] = cols++;
  }
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (AttrIndex a : corpus.encoded(i)) {
      entries.emplace_back(static_cast<int>(i), d.column_of[a], 1.0);
    }
  }
  d.x.resize(static_cast<Eigen::Index>(corpus.size()), cols);
  d.x.setFromTriplets(entries.begin(), entries.end());
  return d;
}

Eigen::RowVectorXd design_row(const std::vector<int>& column_of, Eigen::Index n_columns,
                              const EncodedQuery& query) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_columns);
  for (AttrIndex a : query.known) {
    if (a < column_of.size() && column_of[a] >= 0) row(column_of[a]) = 1.0;
  }
  return row;
}

double logreg_objective(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const SparseDesign& x, const std::vector<int>& y, double l2) {
  return evaluate(weights, bias, x, y, l2, nullptr, nullptr);
}

void logreg_gradient(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                     const SparseDesign& x, const std::vector<int>& y, double l2,
                     Eigen::MatrixXd& grad_weights, Eigen::VectorXd& grad_bias) {
  evaluate(weights, bias, x, y, l2, &grad_weights, &grad_bias);
}

LogRegModel logreg_train(const Corpus& corpus, const LabelSpace& labels,
                         const LogRegOptions& options, std::uint64_t /*seed*/) {
  if (options.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (corpus.empty()) throw std::invalid_argument("logistic regression needs a non-empty corpus");

  Design design = make_design(corpus);
  LogRegModel model;
  model.weights = Eigen::MatrixXd::Zero(labels.n_classes, design.x.cols());
  model.bias = Eigen::VectorXd::Zero(labels.n_classes);
  model.column_of = std::move(design.column_of);

  Eigen::MatrixXd gw;
  Eigen::VectorXd gb;
  for (int epoch = 1; epoch <= options.epochs + 1; ++epoch) {
    // The extra pass scores the final weights without stepping.
    const double objective = evaluate(model.weights, model.bias, design.x, labels.y, options.l2, &gw, &gb);
    if (!std::isfinite(objective)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
    }
    model.final_objective = objective;
    if (epoch > options.epochs) break;
    model.weights += options.learning_rate * gw;
    model.bias += options.learning_rate * gb;
    model.epochs_run = epoch;
  }
  model.gradient_norm = std::sqrt(gw.squaredNorm() + gb.squaredNorm());
  return model;
}

LogRegModel logreg_train(const Corpus& corpus, double learning_rate, double l2, int epochs,
                         std::uint64_t seed) {
  return logreg_train(corpus, family_labels(corpus), {learning_rate, l2, epochs}, seed);
}

Eigen::VectorXd logreg_distribution(const LogRegModel& model, const EncodedQuery& query) {
  if (query.empty()) throw std::invalid_argument("empty query attribute set");
  const Eigen::RowVectorXd row = design_row(model.column_of, model.weights.cols(), query);
  Eigen::VectorXd scores = model.weights * row.transpose() + model.bias;
  scores.array() -= scores.maxCoeff();
  Eigen::VectorXd p = scores.array().exp().matrix();
  return p / p.sum();
}

Prediction logreg_predict(const LogRegModel& model, const Corpus& corpus,
                          const EncodedQuery& query, double task_threshold) {
  return family_prediction(logreg_distribution(model, query), corpus, task_threshold);
}

}  // namespace taskid
