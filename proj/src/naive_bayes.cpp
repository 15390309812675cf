#include <cmath>
#include <limits>

#include "taskid/baselines.hpp"

namespace taskid {

NbModel nb_train(const Corpus& corpus, const LabelSpace& labels, double smoothing) {
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be > 0");
  if (corpus.empty()) throw std::invalid_argument("naive Bayes needs a non-empty corpus");
  const Eigen::Index k = labels.n_classes;

  NbModel model;
  model.smoothing = smoothing;
  model.row_of.assign(corpus.vocabulary().size(), -1);
  int rows = 0;
  for (AttrIndex a = 0; a < model.row_of.size(); ++a) {
    if (corpus.fan(a) > 0) model.row_of[a] = rows++;
  }

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(rows, k);
  model.class_size = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const int c = labels.y[i];
    model.class_size(c) += 1.0;
    for (AttrIndex a : corpus.encoded(i)) counts(model.row_of[a], c) += 1.0;
  }
  model.priors = model.class_size / static_cast<double>(corpus.size());

  model.cond.resize(rows, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    model.cond.col(c) = (counts.col(c).array() + smoothing) / (model.class_size(c) + 2.0 * smoothing);
  }
  model.log_absent = (1.0 - model.cond.array()).log().colwise().sum().transpose();
  return model;
}

Eigen::VectorXd nb_posterior(const NbModel& model, const EncodedQuery& query) {
  if (query.empty()) throw std::invalid_argument("empty query attribute set");
  Eigen::VectorXd log_post = model.priors.array().log().matrix() + model.log_absent;
  std::size_t unseen = query.unknown;
  for (AttrIndex a : query.known) {
    const int r = model.row(a);
    if (r < 0) {
      ++unseen;
      continue;
    }
    log_post += (model.cond.row(r).array().log() - (1.0 - model.cond.row(r).array()).log())
                    .matrix()
                    .transpose();
  }
  if (unseen > 0) {
    const Eigen::ArrayXd p_unseen =
        model.smoothing / (model.class_size.array() + 2.0 * model.smoothing);
    log_post += (static_cast<double>(unseen) * p_unseen.log()).matrix();
  }

  const double top = log_post.maxCoeff();
  Eigen::VectorXd post = (log_post.array() - top).exp().matrix();
  return post / post.sum();
}

NbModel nb_train(const Corpus& corpus, double smoothing) {
  return nb_train(corpus, family_labels(corpus), smoothing);
}

Prediction nb_predict(const NbModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold) {
  return family_prediction(nb_posterior(model, query), corpus, task_threshold);
}

}  // namespace taskid
