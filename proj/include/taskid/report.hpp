#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taskid/eval.hpp"
#include "taskid/stats.hpp"

namespace taskid {

// Reports use the corpus file's line-oriented JSON: a summary object on the
// first line followed by one object per tested sample. Wall-clock timings are
// written only on request so that reports stay byte-identical across runs.

void write_report(std::ostream& out, const TrialReport& report, bool include_timing = false);

/// Plain-text table: one row per report.
std::string format_table(std::span<const TrialReport> reports, bool include_timing = true);

/// CSV for plotting: method,mode,protocol,metric,value (one row per method x metric).
void write_metric_table(std::ostream& out, std::span<const TrialReport> reports);

struct PairwiseTest {
  std::string method_a;
  std::string method_b;
  std::string metric;  // "f1" or "family_accuracy"
  std::size_t pairs = 0;
  std::optional<PairedTest> test;
  std::string note;  // why `test` is missing
};

struct Comparison {
  std::vector<TrialReport> reports;
  std::vector<PairwiseTest> tests;
};

/// Aligns per-sample scores on (trial, sample id) and runs a paired t-test for
/// every pair of reports. Degenerate cases are recorded, not thrown.
Comparison compare_reports(std::vector<TrialReport> reports);

void write_comparison(std::ostream& out, const Comparison& comparison, bool include_timing = false);
std::string format_comparison(const Comparison& comparison, bool include_timing = true);

}  // namespace taskid
