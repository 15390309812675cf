#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "taskid/core.hpp"

namespace taskid {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Knobs of the carrier/payload generator.
///
/// A sample of family (carrier c, tasks T) holds
///   - the carrier's core: K attributes shared by every sample of carrier c,
///   - carrier_attrs_per_sample - K further attributes drawn from the rest of
///     the carrier pool (the mutation),
///   - the payload bundle of every task in T.
/// K is chosen so that the expected pairwise overlap |A ∩ B| / m of two
/// samples of one family (m = sample size) matches overlap_target:
///
///   E(K) = (K + P + (mc - K)^2 / (C - K)) / m,   P = |T| * payload, mc = carrier attrs
///
/// since the non-core draws of two samples are independent uniform subsets of
/// size mc - K from C - K attributes. Feasible targets lie in [E(0), 1].
struct GenSpec {
  std::size_t n_carriers = 5;
  std::size_t tasks_per_carrier = 7;
  std::size_t task_pool = 17;
  std::size_t samples_per_family = 200;
  std::size_t carrier_attr_pool = 1000;
  std::size_t carrier_attrs_per_sample = 80;
  std::size_t payload_attrs_per_task = 1;
  double overlap_target = 0.6;
  bool encrypted = false;
  double encrypt_fraction = 0.6;
  std::uint64_t seed = 1;
  /// Same seed, different batch: same carriers, cores and task sets, fresh samples.
  std::uint32_t batch = 0;

  void validate() const;
};

/// Defaults for the one-carrier, one-task-per-family regime (17 x 100).
GenSpec single_task_spec();

struct GenReport {
  double overlap_target = 0.0;
  double expected_overlap = 0.0;  // closed form at the chosen core size
  double feasible_min = 0.0;
  std::size_t core_size = 0;
  double within_family_overlap = 0.0;
  double cross_family_overlap = 0.0;
  std::map<std::string, std::size_t> family_sizes;
  bool encrypted = false;
};

struct GeneratedCorpus {
  Corpus corpus;
  GenReport report;
};

/// Closed-form expected within-family overlap for a core of size `core`.
double expected_overlap(std::size_t core, std::size_t carrier_pool, std::size_t carrier_attrs,
                        std::size_t payload_attrs);

/// One family per carrier, each with its own random task set.
GeneratedCorpus generate(const GenSpec& spec);

/// One carrier; one family per task of the pool, each performing only that task.
GeneratedCorpus generate_single_task(const GenSpec& spec);

/// Replaces each payload attribute with a fresh per-sample token with
/// probability `fraction`. Carrier attributes and labels are untouched.
Corpus encrypt_variant(const Corpus& corpus, double fraction, std::uint64_t seed);

bool is_payload_token(std::string_view token);

/// Mean pairwise |A ∩ B| / sqrt(|A| |B|) within families and across families.
/// Cross-family pairs are subsampled above `max_cross_pairs`.
std::pair<double, double> measure_overlap(const Corpus& corpus, std::uint64_t seed = 0,
                                          std::size_t max_cross_pairs = 200000);

void write_gen_report(std::ostream& out, const GenReport& report);

}  // namespace taskid
