// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "taskid/actr.hpp"
#include "taskid/baselines.hpp"
#include "taskid/eval.hpp"
#include "taskid/ingest.hpp"
#include "taskid/metrics.hpp"
#include "taskid/synthgen.hpp"

using namespace taskid;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double split_f1(const Corpus& c, Method m) {
  EvalSpec spec;
  spec.method = m;
  return split_trials(c, spec, 0.6, 10, 2024).f1;
}

// 1. Distinct carriers, low mutation.
Outcome low_mutation() {
  const auto t0 = Clock::now();
  GenSpec spec;
  spec.overlap_target = 0.6;
  spec.seed = 101;
  const Corpus c = generate(spec).corpus;
  const double ib = split_f1(c, Method::ActrIb);
  const double rf = split_f1(c, Method::RandomForest);
  const double secs = seconds_since(t0);
  return {ib >= 0.98 && rf >= 0.98 && secs < 120.0,
          fmt("IB F1 %.4f, RF F1 %.4f (>= 0.98); %.1f s (< 120)", ib, rf, secs)};
}

// 2. Distinct carriers, high mutation.
Outcome high_mutation() {
  const auto t0 = Clock::now();
  GenSpec spec;
  spec.overlap_target = 0.2;
  spec.seed = 202;
  const Corpus c = generate(spec).corpus;
  const double ib = split_f1(c, Method::ActrIb);
  const double nb = split_f1(c, Method::NaiveBayes);
  const double dt = split_f1(c, Method::DecisionTree);
  const double lr = split_f1(c, Method::LogReg);
  const double best = std::max({nb, dt, lr});
  const double secs = seconds_since(t0);
  return {ib >= 0.95 && ib >= best - 0.02 && secs < 120.0,
          fmt("IB F1 %.4f (>= 0.95); NB %.4f, DT %.4f, LOGREG %.4f; %.1f s (< 120)", ib, nb, dt, lr, secs)};
}

// 3. Encryption.
Outcome encryption() {
  GenSpec spec = single_task_spec();
  spec.seed = 303;
  const Corpus train = generate_single_task(spec).corpus;
  GenSpec variant = spec;
  variant.batch = 1;
  variant.encrypted = true;
  const Corpus test = generate_single_task(variant).corpus;

  const double plain = split_f1(train, Method::ActrIb);
  const double enc = holdout(train, test, EvalSpec{}, 303).f1;
  return {enc >= 0.85 && enc < plain,
          fmt("unencrypted F1 %.4f, encrypted F1 %.4f at fraction %.2f (>= 0.85, < unencrypted)", plain, enc,
              variant.encrypt_fraction)};
}

// 4. IB family/direct equivalence.
Outcome ib_equivalence() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  std::size_t compared = 0;
  oracle::RandomCorpusSpec rs;
  rs.max_samples = 30;
  rs.n_attrs = 12;
  rs.max_families = 6;
  rs.n_tasks = 6;
  for (int round = 0; round < 50; ++round) {
    const Corpus c = oracle::random_corpus(rng, rs);
    const ActrParams params = round % 2 == 0 ? ActrParams{} : oracle::random_params(rng);
    for (int k = 0; k < 5; ++k) {
      const auto q = oracle::random_query(rng, rs.n_attrs);
      const auto fam = ib_predict(c, params, q, Mode::Family);
      const auto dir = ib_predict(c, params, q, Mode::Direct);
      for (const auto& [task, p] : dir.class_probs) {
        double mass = 0.0;
        for (const auto& [f, pf] : fam.class_probs) {
          const auto& tasks = c.families().at(f);
          if (std::binary_search(tasks.begin(), tasks.end(), task)) mass += pf;
        }
        worst = std::max(worst, std::abs(mass - p));
        ++compared;
      }
      if (fam.predicted_tasks != dir.predicted_tasks) worst = std::max(worst, 1.0);
    }
  }
  return {worst <= 1e-12, fmt("max |family - direct| = %.3g over %zu task probabilities (<= 1e-12)", worst, compared)};
}

// 5. Oracle equivalence.
Outcome oracle_equivalence() {
  std::mt19937_64 rng(505);
  double worst_ib = 0.0, worst_nb = 0.0;
  for (int round = 0; round < 100; ++round) {
    const Corpus c = oracle::random_corpus(rng, {});
    const auto mem = oracle::from_corpus(c);
    const ActrParams params = oracle::random_params(rng);
    const double s = 0.25 + 0.25 * static_cast<double>(round % 8);
    const NbModel nb = nb_train(c, s);
    for (int k = 0; k < 3; ++k) {
      const auto q = oracle::random_query(rng, 10);
      const oracle::StrSet qs(q.begin(), q.end());
      const auto fam = ib_predict(c, params, q, Mode::Family);
      for (const auto& [f, p] : oracle::ib_family_probs(mem, params, qs)) {
        worst_ib = std::max(worst_ib, std::abs(fam.class_probs.at(f) - static_cast<double>(p)));
      }
      const auto dir = ib_predict(c, params, q, Mode::Direct);
      for (const auto& [t, p] : oracle::ib_task_probs(mem, params, qs)) {
        worst_ib = std::max(worst_ib, std::abs(dir.class_probs.at(t) - static_cast<double>(p)));
      }
      const auto post = nb_posterior(nb, c.encode(q));
      Eigen::Index i = 0;
      for (const auto& [f, p] : oracle::nb_posterior(mem, s, qs)) {
        worst_nb = std::max(worst_nb, std::abs(post(i++) - static_cast<double>(p)));
      }
    }
  }
  return {worst_ib <= 1e-9 && worst_nb <= 1e-9,
          fmt("max deviation IB %.3g, NB %.3g over 100 corpora (<= 1e-9)", worst_ib, worst_nb)};
}

// 6. Softmax and threshold properties.
Outcome softmax_properties() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> act(-60.0, 60.0), temp(0.05, 5.0), shift(-100.0, 100.0);
  std::uniform_int_distribution<int> len(1, 40);
  std::size_t failures = 0, degenerate_cases = 0, cases = 0;
  for (; cases < 20000; ++cases) {
    Eigen::VectorXd a(len(rng));
    for (auto& x : a) x = act(rng);
    const double s = temp(rng);
    // Some thresholds sit above every activation to exercise the fallback.
    const double tau = cases % 4 == 0 ? 61.0 : act(rng);
    const auto r = softmax_retrieval(a, s, tau);

    bool ok = std::abs(r.probs.sum() - 1.0) <= 1e-9 && (r.probs.array() >= 0.0).all();
    const std::size_t above = static_cast<std::size_t>((a.array() >= tau).count());
    ok = ok && r.retained == above && r.degenerate == (above == 0);
    if (above > 0) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < tau) ok = ok && r.probs(i) == 0.0;
      }
    } else {
      ++degenerate_cases;
      const auto all = softmax_retrieval(a, s);
      ok = ok && (r.probs - all.probs).cwiseAbs().maxCoeff() <= 1e-12;
    }
    const double c = shift(rng);
    const auto shifted = softmax_retrieval((a.array() + c).matrix(), s, tau + c);
    ok = ok && shifted.retained == r.retained && (shifted.probs - r.probs).cwiseAbs().maxCoeff() <= 1e-9;
    failures += !ok;
  }
  return {failures == 0 && degenerate_cases > 0,
          fmt("%zu randomized cases (%zu degenerate), %zu violations", cases, degenerate_cases, failures)};
}

// 7. Metric identities.
Outcome metric_identities() {
  std::mt19937_64 rng(707);
  std::bernoulli_distribution coin(0.35);
  std::size_t failures = 0, cases = 0;
  for (; cases < 20000; ++cases) {
    TaskSet pred, truth;
    for (int t = 0; t < 10; ++t) {
      if (coin(rng)) pred.push_back("t" + std::to_string(t));
      if (coin(rng)) truth.push_back("t" + std::to_string(t));
    }
    if (truth.empty()) truth.push_back("t" + std::to_string(rng() % 10));
    pred = make_task_set(pred);
    truth = make_task_set(truth);
    const auto s = score_sample(pred, truth);
    std::size_t hit = 0;
    for (const auto& t : pred) hit += std::binary_search(truth.begin(), truth.end(), t);
    const double p = pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
    const double r = static_cast<double>(hit) / static_cast<double>(truth.size());
    const double f1 = hit == 0 ? 0.0 : 2.0 * static_cast<double>(hit) / static_cast<double>(pred.size() + truth.size());
    bool ok = std::abs(s.precision - p) <= 1e-12 && std::abs(s.recall - r) <= 1e-12 && std::abs(s.f1 - f1) <= 1e-12;
    if (s.precision + s.recall > 0.0) {
      ok = ok && std::abs(s.f1 - 2.0 * s.precision * s.recall / (s.precision + s.recall)) <= 1e-12;
    }
    ok = ok && s.f1 >= 0.0 && s.f1 <= 1.0 && s.f1 <= std::max(s.precision, s.recall) + 1e-12 &&
         s.f1 + 1e-12 >= std::min(s.precision, s.recall);
    failures += !ok;
  }
  const auto empty = score_sample({}, {"t1", "t2"});
  const bool empty_ok = empty.precision == 0.0 && empty.recall == 0.0 && empty.f1 == 0.0;
  return {failures == 0 && empty_ok,
          fmt("%zu randomized cases, %zu violations; empty prediction -> p=r=f1=0: %s", cases, failures,
              empty_ok ? "yes" : "no")};
}

// 8. Training-time ordering.
Outcome training_time() {
  GenSpec spec;
  spec.seed = 808;
  const Corpus c = generate(spec).corpus;
  MethodConfig cfg;
  auto best_of = [&](Method m, Mode mode) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      auto model = train_classifier(m, mode, c, cfg, 1);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  std::string detail;
  bool ok = true;
  for (Method m : {Method::LogReg, Method::DecisionTree, Method::RandomForest}) {
    const double fam = best_of(m, Mode::Family);
    const double dir = best_of(m, Mode::Direct);
    ok = ok && dir >= fam;
    detail += fmt("%s %.3fs/%.3fs; ", std::string(to_string(m)).c_str(), fam, dir);
  }
  const double ib_fam = best_of(Method::ActrIb, Mode::Family);
  const double ib_dir = best_of(Method::ActrIb, Mode::Direct);
  ok = ok && ib_fam < 1e-3 && ib_dir < 1e-3;
  detail += fmt("actr-ib %.2gs/%.2gs (family/direct; IB < 1 ms)", ib_fam, ib_dir);
  return {ok, detail};
}

// 9. Logistic-regression gradient check.
Outcome gradient_check() {
  GenSpec spec;
  spec.n_carriers = 3;
  spec.samples_per_family = 8;
  spec.carrier_attr_pool = 30;
  spec.carrier_attrs_per_sample = 10;
  spec.overlap_target = 0.8;
  spec.seed = 909;
  const Corpus c = generate(spec).corpus;
  const auto labels = family_labels(c);
  const Design d = make_design(c);
  const double l2 = 1e-3, h = 1e-5;

  std::mt19937_64 rng(909);
  std::normal_distribution<double> g(0.0, 0.5);
  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(labels.n_classes, d.x.cols(), [&] { return g(rng); });
    Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(labels.n_classes, [&] { return g(rng); });
    Eigen::MatrixXd gw;
    Eigen::VectorXd gb;
    logreg_gradient(w, b, d.x, labels.y, l2, gw, gb);

    Eigen::MatrixXd fw(w.rows(), w.cols());
    Eigen::VectorXd fb(b.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Eigen::MatrixXd up = w, down = w;
      up(i) += h;
      down(i) -= h;
      fw(i) = (logreg_objective(up, b, d.x, labels.y, l2) - logreg_objective(down, b, d.x, labels.y, l2)) / (2 * h);
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      Eigen::VectorXd up = b, down = b;
      up(i) += h;
      down(i) -= h;
      fb(i) = (logreg_objective(w, up, d.x, labels.y, l2) - logreg_objective(w, down, d.x, labels.y, l2)) / (2 * h);
    }
    const double diff = std::sqrt((gw - fw).squaredNorm() + (gb - fb).squaredNorm());
    const double scale = std::sqrt(gw.squaredNorm() + gb.squaredNorm());
    worst = std::max(worst, diff / scale);
  }
  return {worst <= 1e-5, fmt("max relative error %.3g over 10 random points (<= 1e-5)", worst)};
}

// 10. Ingest golden test.
Outcome ingest_golden() {
  const std::string dir = TASKID_TEST_DATA;
  const Sample s = parse_report_file(dir + "/cuckoo_report_golden.json");
  std::string joined;
  for (const auto& t : s.attribs) joined += t + "\n";
  std::ifstream in(dir + "/cuckoo_report_golden.tokens", std::ios::binary);
  std::ostringstream expected;
  expected << in.rdbuf();
  return {joined == expected.str(), fmt("%zu tokens, byte-exact match: %s", s.attribs.size(),
                                        joined == expected.str() ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"distinct carriers, low mutation", low_mutation},
      {"distinct carriers, high mutation", high_mutation},
      {"encryption regime", encryption},
      {"family/direct IB equivalence", ib_equivalence},
      {"oracle equivalence (IB, NB)", oracle_equivalence},
      {"softmax/threshold properties", softmax_properties},
      {"metric identities", metric_identities},
      {"training-time ordering", training_time},
      {"logistic-regression gradient check", gradient_check},
      {"ingest golden report", ingest_golden},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
