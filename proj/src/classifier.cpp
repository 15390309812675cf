#include "taskid/classifier.hpp"

#include <stdexcept>
#include <string>

#include "taskid/random.hpp"

namespace taskid {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ActrIb: return "actr-ib";
    case Method::ActrR: return "actr-r";
    case Method::NaiveBayes: return "nb";
    case Method::DecisionTree: return "dt";
    case Method::RandomForest: return "rf";
    case Method::LogReg: return "logreg";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::ActrIb, Method::ActrR, Method::NaiveBayes, Method::DecisionTree,
                   Method::RandomForest, Method::LogReg}) {
    if (to_string(m) == text) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

namespace {

class InstanceClassifier final : public Classifier {
 public:
  InstanceClassifier(Corpus memory, ActrParams params, Mode mode)
      : memory_(std::move(memory)), params_(params), mode_(mode) {
    params_.validate();
    if (memory_.empty()) throw std::invalid_argument("instance-based model needs a non-empty memory");
  }
  Prediction predict(const EncodedQuery& q) const override {
    return ib_predict(memory_, params_, q, mode_);
  }
  const Corpus& training() const override { return memory_; }

 private:
  Corpus memory_;
  ActrParams params_;
  Mode mode_;
};

class RuleClassifier final : public Classifier {
 public:
  RuleClassifier(Corpus corpus, ActrParams params, Mode mode, double smoothing)
      : corpus_(std::move(corpus)),
        params_(params),
        rules_(mode == Mode::Family ? rb_train(corpus_, smoothing) : rb_train_tasks(corpus_, smoothing)) {
    params_.validate();
  }
  Prediction predict(const EncodedQuery& q) const override {
    return rb_predict(rules_, corpus_, params_, q);
  }
  const Corpus& training() const override { return corpus_; }

 private:
  Corpus corpus_;
  ActrParams params_;
  RuleTable rules_;
};

// Uniform wrapper over the baseline models' class distributions.
template <typename Model, typename Train, typename Distribution>
class BaselineClassifier final : public Classifier {
 public:
  BaselineClassifier(Corpus corpus, Mode mode, double threshold, Train train, Distribution dist)
      : corpus_(std::move(corpus)), mode_(mode), threshold_(threshold), dist_(std::move(dist)) {
    if (mode_ == Mode::Family) {
      models_.push_back(train(family_labels(corpus_), 0));
    } else {
      for (std::size_t t = 0; t < corpus_.task_names().size(); ++t) {
        models_.push_back(train(task_labels(corpus_, t), t + 1));
      }
    }
  }

  Prediction predict(const EncodedQuery& q) const override {
    if (mode_ == Mode::Family) return family_prediction(dist_(models_.front(), q), corpus_, threshold_);
    Prediction out;
    const auto names = corpus_.task_names();
    for (std::size_t t = 0; t < models_.size(); ++t) out.class_probs.emplace(names[t], dist_(models_[t], q)(1));
    out.predicted_tasks = tasks_from_task_probs(out.class_probs, threshold_);
    return out;
  }
  const Corpus& training() const override { return corpus_; }

 private:
  Corpus corpus_;
  Mode mode_;
  double threshold_;
  Distribution dist_;
  std::vector<Model> models_;
};

template <typename Model, typename Train, typename Distribution>
std::unique_ptr<Classifier> make_baseline(const Corpus& corpus, Mode mode, double threshold,
                                          Train train, Distribution dist) {
  return std::make_unique<BaselineClassifier<Model, Train, Distribution>>(corpus, mode, threshold,
                                                                          std::move(train), std::move(dist));
}

}  // namespace

std::unique_ptr<Classifier> train_classifier(Method method, Mode mode, const Corpus& corpus,
                                             const MethodConfig& config, std::uint64_t seed) {
  if (corpus.empty()) throw std::invalid_argument("cannot train on an empty corpus");
  const double threshold = config.actr.task_threshold;
  // Per-label-space seeds: stream 0 is the family model, stream t+1 task t.
  switch (method) {
    case Method::ActrIb:
      return std::make_unique<InstanceClassifier>(corpus, config.actr, mode);
    case Method::ActrR:
      return std::make_unique<RuleClassifier>(corpus, config.actr, mode, config.smoothing);
    case Method::NaiveBayes:
      return make_baseline<NbModel>(
          corpus, mode, threshold,
          [&](const LabelSpace& labels, std::size_t) { return nb_train(corpus, labels, config.smoothing); },
          [](const NbModel& m, const EncodedQuery& q) { return nb_posterior(m, q); });
    case Method::DecisionTree:
      return make_baseline<DtModel>(
          corpus, mode, threshold,
          [&](const LabelSpace& labels, std::size_t) { return dt_train(corpus, labels, config.tree, 0); },
          [](const DtModel& m, const EncodedQuery& q) { return dt_distribution(m, q); });
    case Method::RandomForest:
      return make_baseline<RfModel>(
          corpus, mode, threshold,
          [&](const LabelSpace& labels, std::size_t stream) {
            return rf_train(corpus, labels, config.forest, derive_seed(seed, stream));
          },
          [](const RfModel& m, const EncodedQuery& q) { return rf_distribution(m, q); });
    case Method::LogReg:
      return make_baseline<LogRegModel>(
          corpus, mode, threshold,
          [&](const LabelSpace& labels, std::size_t stream) {
            return logreg_train(corpus, labels, config.logreg, derive_seed(seed, stream));
          },
          [](const LogRegModel& m, const EncodedQuery& q) { return logreg_distribution(m, q); });
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace taskid
