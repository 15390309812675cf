#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "taskid/baselines.hpp"
#include "taskid/random.hpp"

namespace taskid {

namespace {

constexpr double kGainEps = 1e-12;

double entropy(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

// Lexicographic rank of each vocabulary entry, for deterministic tie-breaks.
std::vector<std::uint32_t> lexicographic_ranks(const Vocabulary& vocab) {
  std::vector<AttrIndex> order(vocab.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](AttrIndex a, AttrIndex b) { return vocab.token(a) < vocab.token(b); });
  std::vector<std::uint32_t> rank(vocab.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<std::uint32_t>(r);
  return rank;
}

class TreeBuilder {
 public:
  TreeBuilder(const Corpus& corpus, const LabelSpace& labels, const TreeOptions& options,
              const std::vector<std::uint32_t>& rank, std::uint64_t seed)
      : corpus_(corpus),
        labels_(labels),
        options_(options),
        rank_(rank),
        rng_(seed),
        k_(static_cast<std::size_t>(labels.n_classes)),
        present_(corpus.vocabulary().size() * k_, 0.0),
        touched_flag_(corpus.vocabulary().size(), 0),
        tested_(corpus.vocabulary().size(), 0) {
    for (AttrIndex a = 0; a < corpus.vocabulary().size(); ++a) {
      if (corpus.fan(a) > 0) pool_.push_back(a);
    }
  }

  DtModel build(std::vector<std::size_t> root) {
    min_size_ = options_.min_split_fraction * static_cast<double>(root.size());
    model_.n_classes = labels_.n_classes;
    grow(root);
    return std::move(model_);
  }

 private:
  struct Split {
    int attribute = -1;
    double gain = 0.0;
  };

  int grow(const std::vector<std::size_t>& idx) {
    const int id = static_cast<int>(model_.nodes.size());
    model_.nodes.emplace_back();

    std::vector<double> counts(k_, 0.0);
    for (std::size_t i : idx) counts[static_cast<std::size_t>(labels_.y[i])] += 1.0;
    const double n = static_cast<double>(idx.size());
    Eigen::VectorXd dist(static_cast<Eigen::Index>(k_));
    for (std::size_t c = 0; c < k_; ++c) dist(static_cast<Eigen::Index>(c)) = n > 0 ? counts[c] / n : 0.0;
    model_.nodes[id].dist = dist;

    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; });
    if (nonzero <= 1 || n < min_size_) return id;

    const Split split = best_split(idx, counts);
    if (split.attribute < 0) return id;

    std::vector<std::size_t> with, without;
    const auto a = static_cast<AttrIndex>(split.attribute);
    for (std::size_t i : idx) {
      const auto enc = corpus_.encoded(i);
      (std::binary_search(enc.begin(), enc.end(), a) ? with : without).push_back(i);
    }
    tested_[a] = 1;
    const int present = grow(with);
    const int absent = grow(without);
    tested_[a] = 0;

    auto& node = model_.nodes[id];
    node.attribute = split.attribute;
    node.present = present;
    node.absent = absent;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& idx, const std::vector<double>& counts) {
    std::vector<AttrIndex> touched;
    for (std::size_t i : idx) {
      const auto c = static_cast<std::size_t>(labels_.y[i]);
      for (AttrIndex a : corpus_.encoded(i)) {
        if (!touched_flag_[a]) {
          touched_flag_[a] = 1;
          touched.push_back(a);
        }
        present_[a * k_ + c] += 1.0;
      }
    }

    const double n = static_cast<double>(idx.size());
    const double h = entropy(counts, n);
    std::vector<double> in(k_), out(k_);
    auto gain_of = [&](AttrIndex a) {
      if (!touched_flag_[a] || tested_[a]) return 0.0;
      double n_in = 0.0;
      for (std::size_t c = 0; c < k_; ++c) {
        in[c] = present_[a * k_ + c];
        out[c] = counts[c] - in[c];
        n_in += in[c];
      }
      const double n_out = n - n_in;
      if (n_in == 0.0 || n_out == 0.0) return 0.0;
      return h - (n_in / n) * entropy(in, n_in) - (n_out / n) * entropy(out, n_out);
    };
    auto consider = [&](AttrIndex a, Split& best) {
      const double g = gain_of(a);
      if (g <= kGainEps) return;
      if (best.attribute < 0 || g > best.gain + kGainEps ||
          (std::abs(g - best.gain) <= kGainEps && rank_[a] < rank_[static_cast<AttrIndex>(best.attribute)])) {
        best = {static_cast<int>(a), g};
      }
    };

    Split best;
    if (options_.max_features == 0 || options_.max_features >= pool_.size()) {
      for (AttrIndex a : touched) consider(a, best);
    } else {
      // Random feature subsets; keep drawing further subsets until one yields
      // a usable split or the pool is exhausted.
      std::vector<AttrIndex> order = pool_;
      std::shuffle(order.begin(), order.end(), rng_);
      for (std::size_t start = 0; start < order.size() && best.attribute < 0;
           start += options_.max_features) {
        const std::size_t stop = std::min(order.size(), start + options_.max_features);
        for (std::size_t i = start; i < stop; ++i) consider(order[i], best);
      }
    }

    for (AttrIndex a : touched) {
      touched_flag_[a] = 0;
      std::fill_n(present_.begin() + static_cast<std::ptrdiff_t>(a * k_), k_, 0.0);
    }
    return best;
  }

  const Corpus& corpus_;
  const LabelSpace& labels_;
  const TreeOptions& options_;
  const std::vector<std::uint32_t>& rank_;
  Rng rng_;
  std::size_t k_;
  std::vector<double> present_;
  std::vector<char> touched_flag_;
  std::vector<char> tested_;
  std::vector<AttrIndex> pool_;
  double min_size_ = 0.0;
  DtModel model_;
};

}  // namespace

std::size_t DtModel::depth() const {
  std::function<std::size_t(int)> walk = [&](int id) -> std::size_t {
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (node.attribute < 0) return 0;
    return 1 + std::max(walk(node.present), walk(node.absent));
  };
  return nodes.empty() ? 0 : walk(0);
}

std::size_t DtModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.attribute < 0; }));
}

DtModel dt_train(const Corpus& corpus, const LabelSpace& labels, const TreeOptions& options,
                 std::uint64_t seed) {
  if (corpus.empty()) throw std::invalid_argument("decision tree needs a non-empty corpus");
  const auto rank = lexicographic_ranks(corpus.vocabulary());
  std::vector<std::size_t> root(corpus.size());
  std::iota(root.begin(), root.end(), 0);
  return TreeBuilder(corpus, labels, options, rank, seed).build(std::move(root));
}

DtModel dt_train(const Corpus& corpus, const TreeOptions& options) {
  return dt_train(corpus, family_labels(corpus), options, 0);
}

Eigen::VectorXd dt_distribution(const DtModel& model, const EncodedQuery& query) {
  if (query.empty()) throw std::invalid_argument("empty query attribute set");
  int id = 0;
  while (model.nodes[static_cast<std::size_t>(id)].attribute >= 0) {
    const auto& node = model.nodes[static_cast<std::size_t>(id)];
    const auto a = static_cast<AttrIndex>(node.attribute);
    id = std::binary_search(query.known.begin(), query.known.end(), a) ? node.present : node.absent;
  }
  return model.nodes[static_cast<std::size_t>(id)].dist;
}

Prediction dt_predict(const DtModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold) {
  return family_prediction(dt_distribution(model, query), corpus, task_threshold);
}

RfModel rf_train(const Corpus& corpus, const LabelSpace& labels, const RfOptions& options,
                 std::uint64_t seed) {
  if (options.n_trees < 1) throw std::invalid_argument("random forest needs at least one tree");
  if (corpus.empty()) throw std::invalid_argument("random forest needs a non-empty corpus");

  std::size_t n_attrs = 0;
  for (AttrIndex a = 0; a < corpus.vocabulary().size(); ++a) n_attrs += corpus.fan(a) > 0;
  TreeOptions tree;
  tree.min_split_fraction = options.min_split_fraction;
  tree.max_features = options.max_features != 0
                          ? options.max_features
                          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_attrs))));

  const auto rank = lexicographic_ranks(corpus.vocabulary());
  RfModel model;
  model.n_classes = labels.n_classes;
  model.trees.reserve(options.n_trees);
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, t);
    std::vector<std::size_t> root(corpus.size());
    if (options.bootstrap) {
      Rng rng(derive_seed(tree_seed, 0xb00757a9ULL));
      std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
      for (auto& i : root) i = pick(rng);
    } else {
      std::iota(root.begin(), root.end(), 0);
    }
    model.trees.push_back(TreeBuilder(corpus, labels, tree, rank, tree_seed).build(std::move(root)));
  }
  return model;
}

RfModel rf_train(const Corpus& corpus, std::size_t n_trees, std::uint64_t seed) {
  RfOptions options;
  options.n_trees = n_trees;
  return rf_train(corpus, family_labels(corpus), options, seed);
}

Eigen::VectorXd rf_distribution(const RfModel& model, const EncodedQuery& query) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.n_classes);
  for (const auto& tree : model.trees) sum += dt_distribution(tree, query);
  return sum / static_cast<double>(model.trees.size());
}

Prediction rf_predict(const RfModel& model, const Corpus& corpus, const EncodedQuery& query,
                      double task_threshold) {
  return family_prediction(rf_distribution(model, query), corpus, task_threshold);
}

}  // namespace taskid
