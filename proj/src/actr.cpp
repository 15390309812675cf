#include "taskid/actr.hpp"

#include <algorithm>

namespace taskid {

namespace {

double partial_match(const ActrParams& params, std::size_t shared, std::size_t query_size,
                     std::size_t chunk_size) {
  const double overlap =
      static_cast<double>(shared) / std::sqrt(static_cast<double>(query_size * chunk_size));
  return params.partial_match == PartialMatch::Overlap ? params.mp * overlap
                                                      : params.mp * (overlap - 1.0);
}

void require_query(const EncodedQuery& query) {
  if (query.empty()) throw std::invalid_argument("empty query attribute set");
}

Prediction finish_family(std::map<std::string, double> family_probs, const FamilyMap& families,
                         double threshold) {
  Prediction out;
  out.predicted_tasks = tasks_from_family_probs(family_probs, families, threshold);
  out.predicted_family = argmax_label(family_probs);
  out.class_probs = std::move(family_probs);
  return out;
}

}  // namespace

Activation ib_activation(const Corpus& memory, const ActrParams& params,
                         const EncodedQuery& query, std::size_t j) {
  require_query(query);
  const auto chunk = memory.encoded(j);
  const double m = static_cast<double>(memory.size());
  const double q = static_cast<double>(query.size());

  std::size_t shared = 0;
  double s = 0.0;
  for (AttrIndex a : query.known) {
    if (std::binary_search(chunk.begin(), chunk.end(), a)) {
      ++shared;
      s += std::log(m / memory.fan(a));
    } else {
      s += std::log(1.0 / m);
    }
  }
  s += static_cast<double>(query.unknown) * std::log(1.0 / m);

  return {params.beta, s / q, partial_match(params, shared, query.size(), chunk.size())};
}

Activation ib_activation(const Corpus& memory, const ActrParams& params,
                         const AttributeSet& query, std::size_t j) {
  return ib_activation(memory, params, memory.encode(query), j);
}

std::vector<Activation> ib_activations(const Corpus& memory, const ActrParams& params,
                                       const EncodedQuery& query) {
  require_query(query);
  const std::size_t n = memory.size();
  const double m = static_cast<double>(n);
  const double q = static_cast<double>(query.size());

  std::vector<std::uint32_t> shared(n, 0);
  std::vector<double> hit_sum(n, 0.0);
  for (AttrIndex a : query.known) {
    const auto fan = memory.fan(a);
    if (fan == 0) continue;
    const double gain = std::log(m / fan);
    for (std::uint32_t j : memory.postings(a)) {
      ++shared[j];
      hit_sum[j] += gain;
    }
  }

  const double miss = std::log(1.0 / m);
  std::vector<Activation> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = hit_sum[j] + static_cast<double>(query.size() - shared[j]) * miss;
    out[j] = {params.beta, s / q,
              partial_match(params, shared[j], query.size(), memory.encoded(j).size())};
  }
  return out;
}

Prediction ib_predict(const Corpus& memory, const ActrParams& params, const EncodedQuery& query,
                      Mode mode) {
  params.validate();
  if (memory.empty()) throw std::invalid_argument("instance-based model needs a non-empty memory");
  const auto acts = ib_activations(memory, params, query);
  Eigen::VectorXd a(static_cast<Eigen::Index>(acts.size()));
  for (std::size_t j = 0; j < acts.size(); ++j) a(static_cast<Eigen::Index>(j)) = acts[j].total();
  const Retrieval r = retrieval_probs(a, params);

  Prediction out;
  if (mode == Mode::Family) {
    std::map<std::string, double> family_probs;
    const auto names = memory.family_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
      double p = 0.0;
      for (std::size_t j : memory.family_members(k)) p += r.probs(static_cast<Eigen::Index>(j));
      family_probs.emplace(names[k], p);
    }
    out = finish_family(std::move(family_probs), memory.families(), params.task_threshold);
  } else {
    const auto names = memory.task_names();
    std::vector<double> mass(names.size(), 0.0);
    for (std::size_t j = 0; j < memory.size(); ++j) {
      for (auto t : memory.task_indices(j)) mass[t] += r.probs(static_cast<Eigen::Index>(j));
    }
    for (std::size_t t = 0; t < names.size(); ++t) out.class_probs.emplace(names[t], mass[t]);
    out.predicted_tasks = tasks_from_task_probs(out.class_probs, params.task_threshold);
  }
  out.retained_chunks = r.retained;
  out.degenerate = r.degenerate;
  return out;
}

Prediction ib_predict(const Corpus& memory, const ActrParams& params, const AttributeSet& query,
                      Mode mode) {
  return ib_predict(memory, params, memory.encode(query), mode);
}

namespace {

// Rules for arbitrary (possibly overlapping) label memberships. For families
// the memberships partition the corpus; for tasks they overlap.
RuleTable train_rules(const Corpus& corpus, double smoothing, std::vector<std::string> labels,
                      const std::vector<std::vector<std::size_t>>& members, Mode mode) {
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be > 0");
  if (labels.empty()) throw std::invalid_argument("rule training needs at least one label");
  const auto n_labels = static_cast<Eigen::Index>(labels.size());
  const double total = static_cast<double>(corpus.size());

  RuleTable rules;
  rules.labels = std::move(labels);
  rules.smoothing = smoothing;
  rules.mode = mode;
  rules.row_of.assign(corpus.vocabulary().size(), -1);
  int rows = 0;
  for (AttrIndex a = 0; a < rules.row_of.size(); ++a) {
    if (corpus.fan(a) > 0) rules.row_of[a] = rows++;
  }

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(rows, n_labels);
  Eigen::VectorXd fan(rows);
  for (AttrIndex a = 0; a < rules.row_of.size(); ++a) {
    if (rules.row_of[a] >= 0) fan(rules.row_of[a]) = corpus.fan(a);
  }
  rules.prior.resize(n_labels);
  for (Eigen::Index f = 0; f < n_labels; ++f) {
    const auto& m = members[static_cast<std::size_t>(f)];
    if (m.empty()) {
      throw std::invalid_argument("label '" + rules.labels[static_cast<std::size_t>(f)] +
                                  "' has no training samples");
    }
    for (std::size_t i : m) {
      for (AttrIndex a : corpus.encoded(i)) counts(rules.row_of[a], f) += 1.0;
    }
    rules.prior(f) = static_cast<double>(m.size()) / total;
  }

  rules.p_given.resize(rows, n_labels);
  rules.p_not_given.resize(rows, n_labels);
  for (Eigen::Index f = 0; f < n_labels; ++f) {
    const double in = static_cast<double>(members[static_cast<std::size_t>(f)].size());
    const double out = total - in;
    rules.p_given.col(f) = (counts.col(f).array() + smoothing) / (in + 2.0 * smoothing);
    rules.p_not_given.col(f) =
        ((fan - counts.col(f)).array() + smoothing) / (out + 2.0 * smoothing);
  }
  return rules;
}

}  // namespace

RuleTable rb_train(const Corpus& corpus, double smoothing) {
  const auto names = corpus.family_names();
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto m = corpus.family_members(k);
    members.emplace_back(m.begin(), m.end());
  }
  return train_rules(corpus, smoothing, {names.begin(), names.end()}, members, Mode::Family);
}

RuleTable rb_train_tasks(const Corpus& corpus, double smoothing) {
  const auto names = corpus.task_names();
  std::vector<std::vector<std::size_t>> members(names.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (auto t : corpus.task_indices(i)) members[t].push_back(i);
  }
  return train_rules(corpus, smoothing, {names.begin(), names.end()}, members, Mode::Direct);
}

std::vector<Activation> rb_activations(const RuleTable& rules, const ActrParams& params,
                                       const EncodedQuery& query) {
  require_query(query);
  const auto n_labels = static_cast<Eigen::Index>(rules.labels.size());
  Eigen::VectorXd spread = Eigen::VectorXd::Zero(n_labels);
  for (AttrIndex a : query.known) {
    const int r = rules.row(a);
    if (r < 0) continue;
    spread += (rules.p_given.row(r).array() / rules.p_not_given.row(r).array()).log().matrix().transpose();
  }
  spread *= params.w / static_cast<double>(query.size());

  std::vector<Activation> out(rules.labels.size());
  for (Eigen::Index f = 0; f < n_labels; ++f) {
    out[static_cast<std::size_t>(f)] = {std::log(rules.prior(f)), spread(f), 0.0};
  }
  return out;
}

Prediction rb_predict(const RuleTable& rules, const Corpus& corpus, const ActrParams& params,
                      const EncodedQuery& query) {
  params.validate();
  const auto acts = rb_activations(rules, params, query);
  Prediction out;
  if (rules.mode == Mode::Family) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(acts.size()));
    for (std::size_t f = 0; f < acts.size(); ++f) a(static_cast<Eigen::Index>(f)) = acts[f].total();
    const Retrieval r = softmax_retrieval(a, params.noise);
    std::map<std::string, double> family_probs;
    for (std::size_t f = 0; f < acts.size(); ++f) {
      family_probs.emplace(rules.labels[f], r.probs(static_cast<Eigen::Index>(f)));
    }
    out = finish_family(std::move(family_probs), corpus.families(), params.task_threshold);
    out.retained_chunks = r.retained;
  } else {
    // Each task competes with its complement chunk, whose spreading terms are
    // the negated log odds and whose base level is log(1 - prior).
    for (std::size_t t = 0; t < acts.size(); ++t) {
      Eigen::Vector2d a(acts[t].total(),
                        std::log1p(-rules.prior(static_cast<Eigen::Index>(t))) - acts[t].spreading);
      const Retrieval r = softmax_retrieval(a, params.noise);
      out.class_probs.emplace(rules.labels[t], r.probs(0));
    }
    out.predicted_tasks = tasks_from_task_probs(out.class_probs, params.task_threshold);
    out.retained_chunks = 2 * acts.size();
  }
  return out;
}

Prediction rb_predict(const RuleTable& rules, const Corpus& corpus, const ActrParams& params,
                      const AttributeSet& query) {
  return rb_predict(rules, corpus, params, corpus.encode(query));
}

}  // namespace taskid
