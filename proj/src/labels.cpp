#include "taskid/baselines.hpp"

namespace taskid {

LabelSpace family_labels(const Corpus& corpus) {
  LabelSpace out;
  const auto names = corpus.family_names();
  out.names.assign(names.begin(), names.end());
  out.n_classes = static_cast<int>(names.size());
  out.y.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.y.push_back(static_cast<int>(corpus.family_index(i)));
  }
  return out;
}

LabelSpace task_labels(const Corpus& corpus, std::size_t task) {
  const auto names = corpus.task_names();
  if (task >= names.size()) throw std::out_of_range("task index out of range");
  LabelSpace out;
  out.names = {"not " + names[task], names[task]};
  out.n_classes = 2;
  out.y.assign(corpus.size(), 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (auto t : corpus.task_indices(i)) {
      if (t == task) out.y[i] = 1;
    }
  }
  return out;
}

Prediction family_prediction(const Eigen::VectorXd& probs, const Corpus& corpus,
                             double task_threshold) {
  const auto names = corpus.family_names();
  Prediction out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    out.class_probs.emplace(names[k], probs(static_cast<Eigen::Index>(k)));
  }
  out.predicted_tasks = tasks_from_family_probs(out.class_probs, corpus.families(), task_threshold);
  out.predicted_family = argmax_label(out.class_probs);
  return out;
}

}  // namespace taskid
