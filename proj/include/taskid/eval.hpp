#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taskid/classifier.hpp"
#include "taskid/metrics.hpp"

namespace taskid {

struct EvalSpec {
  Method method = Method::ActrIb;
  Mode mode = Mode::Family;
  MethodConfig config;
};

struct ScoredSample {
  std::string id;
  std::size_t trial = 0;
  SampleScore score;
  TaskSet predicted_tasks;
  std::optional<std::string> predicted_family;
  std::size_t retained_chunks = 0;
  bool degenerate = false;
};

struct TrialSummary {
  std::size_t trial = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> family_accuracy;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  std::optional<std::string> held_out_family;
};

/// Means are taken over every tested sample of every trial.
struct TrialReport {
  std::string method;
  std::string mode;
  std::string protocol;
  std::uint64_t seed = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> family_accuracy;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  std::vector<TrialSummary> trials;
  std::vector<ScoredSample> samples;
};

/// Recomputes the report means from its per-sample scores.
void summarize(TrialReport& report);

/// One fold per sample, each tested against a model built on the rest.
TrialReport loocv(const Corpus& corpus, const EvalSpec& spec, std::uint64_t seed);

/// Repeated family-stratified random splits.
TrialReport split_trials(const Corpus& corpus, const EvalSpec& spec, double train_frac = 0.6,
                         std::size_t n_trials = 10, std::uint64_t seed = 0);

/// Train/test index sets of one stratified split (exposed for inspection).
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices stratified_split(const Corpus& corpus, double train_frac, std::uint64_t seed);

/// One report per family, trained without that family.
std::vector<TrialReport> leave_one_family_out(const Corpus& corpus, const EvalSpec& spec,
                                              std::uint64_t seed = 0);

/// Train on one corpus, test on another (e.g. obfuscated variants).
TrialReport holdout(const Corpus& train, const Corpus& test, const EvalSpec& spec,
                    std::uint64_t seed);

/// Merges per-family reports into one, keeping each family as a trial.
TrialReport merge_reports(const std::vector<TrialReport>& reports);

}  // namespace taskid
