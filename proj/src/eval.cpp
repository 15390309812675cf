#include "taskid/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "taskid/random.hpp"

namespace taskid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TrialReport blank_report(const EvalSpec& spec, std::string protocol, std::uint64_t seed) {
  TrialReport r;
  r.method = std::string(to_string(spec.method));
  r.mode = std::string(to_string(spec.mode));
  r.protocol = std::move(protocol);
  r.seed = seed;
  return r;
}

ScoredSample score_one(const Sample& truth, const Prediction& pred, std::size_t trial,
                       bool family_applicable) {
  ScoredSample s;
  s.id = truth.id;
  s.trial = trial;
  s.score = score_sample(pred.predicted_tasks, *truth.tasks);
  if (family_applicable && pred.predicted_family) {
    s.score.family_correct = *pred.predicted_family == *truth.family;
  }
  s.predicted_tasks = pred.predicted_tasks;
  s.predicted_family = pred.predicted_family;
  s.retained_chunks = pred.retained_chunks;
  s.degenerate = pred.degenerate;
  return s;
}

void fill_summary(TrialSummary& t, std::span<const ScoredSample> scored) {
  t.n_test = scored.size();
  double p = 0, r = 0, f = 0, fam = 0;
  std::size_t fam_n = 0;
  for (const auto& s : scored) {
    p += s.score.precision;
    r += s.score.recall;
    f += s.score.f1;
    if (s.score.family_correct) {
      fam += *s.score.family_correct ? 1.0 : 0.0;
      ++fam_n;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(scored.size(), 1));
  t.precision = p / n;
  t.recall = r / n;
  t.f1 = f / n;
  t.family_accuracy = fam_n > 0 ? std::optional<double>(fam / static_cast<double>(fam_n)) : std::nullopt;
}

// Trains on `train_idx` of `corpus` and tests on `test_idx`; appends to report.
void run_fold(const Corpus& corpus, std::span<const std::size_t> train_idx,
              std::span<const std::size_t> test_idx, const EvalSpec& spec, std::uint64_t seed,
              std::size_t trial, bool family_applicable, TrialReport& report,
              std::optional<std::string> held_out = std::nullopt) {
  const Corpus train = corpus.subset(train_idx);

  TrialSummary summary;
  summary.trial = trial;
  summary.n_train = train.size();
  summary.held_out_family = std::move(held_out);

  const auto t0 = Clock::now();
  const auto model = train_classifier(spec.method, spec.mode, train, spec.config, seed);
  summary.train_seconds = seconds_since(t0);

  const std::size_t first = report.samples.size();
  const auto t1 = Clock::now();
  for (std::size_t i : test_idx) {
    // Subsets share the parent vocabulary, so the parent encoding is valid.
    EncodedQuery q;
    const auto enc = corpus.encoded(i);
    q.known.assign(enc.begin(), enc.end());
    report.samples.push_back(score_one(corpus.sample(i), model->predict(q), trial, family_applicable));
  }
  summary.predict_seconds = seconds_since(t1);

  fill_summary(summary, std::span(report.samples).subspan(first));
  report.trials.push_back(std::move(summary));
}

}  // namespace

void summarize(TrialReport& report) {
  TrialSummary all;
  fill_summary(all, report.samples);
  report.precision = all.precision;
  report.recall = all.recall;
  report.f1 = all.f1;
  report.family_accuracy = all.family_accuracy;
  report.train_seconds = 0.0;
  report.predict_seconds = 0.0;
  for (const auto& t : report.trials) {
    report.train_seconds += t.train_seconds;
    report.predict_seconds += t.predict_seconds;
  }
}

TrialReport loocv(const Corpus& corpus, const EvalSpec& spec, std::uint64_t seed) {
  if (corpus.size() < 2) throw std::invalid_argument("leave-one-out needs at least two samples");
  TrialReport report = blank_report(spec, "loocv", seed);
  std::vector<std::size_t> train(corpus.size() - 1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      if (j != i) train[k++] = j;
    }
    const std::size_t test[] = {i};
    run_fold(corpus, train, test, spec, derive_seed(seed, i), i, true, report);
  }
  summarize(report);
  return report;
}

SplitIndices stratified_split(const Corpus& corpus, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw std::invalid_argument("train fraction must lie in (0, 1)");
  Rng rng(seed);
  SplitIndices out;
  const auto names = corpus.family_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto members = corpus.family_members(k);
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw std::invalid_argument("family '" + names[k] + "' has fewer than 2 samples; cannot stratify");
    }
    std::vector<std::size_t> shuffled(members.begin(), members.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto n = static_cast<double>(shuffled.size());
    auto n_train = static_cast<std::size_t>(std::llround(train_frac * n));
    n_train = std::clamp<std::size_t>(n_train, 1, shuffled.size() - 1);
    out.train.insert(out.train.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

TrialReport split_trials(const Corpus& corpus, const EvalSpec& spec, double train_frac,
                         std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("need at least one trial");
  TrialReport report = blank_report(spec, "split", seed);
  for (std::size_t t = 0; t < n_trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const SplitIndices split = stratified_split(corpus, train_frac, trial_seed);
    run_fold(corpus, split.train, split.test, spec, derive_seed(trial_seed, 1), t, true, report);
  }
  summarize(report);
  return report;
}

std::vector<TrialReport> leave_one_family_out(const Corpus& corpus, const EvalSpec& spec,
                                              std::uint64_t seed) {
  const auto names = corpus.family_names();
  std::vector<std::size_t> populated;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!corpus.family_members(k).empty()) populated.push_back(k);
  }
  if (populated.size() < 2) throw std::invalid_argument("leave-one-family-out needs at least two families");

  std::vector<TrialReport> reports;
  for (std::size_t k : populated) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus.family_index(i) != k) train.push_back(i);
    }
    const auto test = corpus.family_members(k);
    TrialReport report = blank_report(spec, "lofo", seed);
    run_fold(corpus, train, test, spec, derive_seed(seed, k), k, false, report, names[k]);
    summarize(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

TrialReport holdout(const Corpus& train, const Corpus& test, const EvalSpec& spec,
                    std::uint64_t seed) {
  if (test.empty()) throw std::invalid_argument("holdout test corpus is empty");
  TrialReport report = blank_report(spec, "holdout", seed);
  TrialSummary summary;
  summary.n_train = train.size();

  const auto t0 = Clock::now();
  const auto model = train_classifier(spec.method, spec.mode, train, spec.config, derive_seed(seed, 0));
  summary.train_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  for (const auto& s : test.samples()) {
    const bool applicable = train.families().count(*s.family) > 0;
    report.samples.push_back(score_one(s, model->predict(s.attribs), 0, applicable));
  }
  summary.predict_seconds = seconds_since(t1);
  fill_summary(summary, report.samples);
  report.trials.push_back(summary);
  summarize(report);
  return report;
}

TrialReport merge_reports(const std::vector<TrialReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to merge");
  TrialReport out = reports.front();
  out.trials.clear();
  out.samples.clear();
  for (const auto& r : reports) {
    out.trials.insert(out.trials.end(), r.trials.begin(), r.trials.end());
    out.samples.insert(out.samples.end(), r.samples.begin(), r.samples.end());
  }
  summarize(out);
  return out;
}

}  // namespace taskid
