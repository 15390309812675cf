#include "taskid/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "taskid/random.hpp"

namespace taskid {

namespace {

constexpr std::string_view kPayloadMarker = "payload_";

const char* const kCarrierNames[] = {"fileVirus", "keyLogger", "trojanExtortionist", "usbWorm",
                                     "webMoneyTrojan"};

const char* const kTaskNames[] = {
    "beacon",          "enumFiles",    "serviceManip",  "takeScreenShots", "upload",
    "keylog",          "download",     "persistRegistry", "spreadUsb",     "encryptFiles",
    "ransomNote",      "stealCredentials", "disableAv", "webMoneySteal",   "infectFiles",
    "remoteShell",     "selfDelete"};

std::string carrier_name(std::size_t c) {
  return c < std::size(kCarrierNames) ? kCarrierNames[c] : "carrier" + std::to_string(c);
}

std::string task_name(std::size_t t) {
  return t < std::size(kTaskNames) ? kTaskNames[t] : "task" + std::to_string(t);
}

std::string padded(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", k);
  return buf;
}

std::string carrier_token(const std::string& carrier, std::size_t k) {
  switch (k % 3) {
    case 0: return "usesDLL:" + carrier + "_" + padded(k) + ".dll";
    case 1: return "regAct:hklm\\software\\" + carrier + "\\k" + padded(k);
    default: return "fileAct:c:\\program files\\" + carrier + "\\f" + padded(k) + ".dat";
  }
}

std::string payload_token(const std::string& task, std::size_t k) {
  const std::string tag = std::string(kPayloadMarker) + task;
  switch (k % 3) {
    case 0: return "usesDLL:" + tag + "_" + std::to_string(k) + ".dll";
    case 1: return "regAct:hkcu\\software\\" + tag + "\\k" + std::to_string(k);
    default: return "fileAct:c:\\windows\\" + tag + "\\f" + std::to_string(k) + ".bin";
  }
}

struct CarrierPlan {
  std::string name;
  std::vector<std::string> core;
  std::vector<std::string> rest;
};

struct FamilyPlan {
  std::string name;
  std::size_t carrier = 0;
  TaskSet tasks;
  std::vector<std::string> payload;
};

// Core size whose closed-form overlap is closest to the target.
std::size_t solve_core(const GenSpec& spec, std::size_t payload_attrs, GenReport& report) {
  const std::size_t mc = spec.carrier_attrs_per_sample;
  report.feasible_min = expected_overlap(0, spec.carrier_attr_pool, mc, payload_attrs);
  if (spec.overlap_target < report.feasible_min - 1e-12) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "overlap target %.4f infeasible for these pool sizes; feasible range is [%.4f, 1]",
                  spec.overlap_target, report.feasible_min);
    throw GenerationError(buf);
  }
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= mc; ++k) {
    const double err = std::abs(expected_overlap(k, spec.carrier_attr_pool, mc, payload_attrs) - spec.overlap_target);
    if (err < best_err) {
      best_err = err;
      best = k;
    }
  }
  report.core_size = best;
  report.expected_overlap = expected_overlap(best, spec.carrier_attr_pool, mc, payload_attrs);
  return best;
}

CarrierPlan plan_carrier(const GenSpec& spec, std::size_t c, std::size_t core, Rng& rng) {
  CarrierPlan plan;
  plan.name = carrier_name(c);
  std::vector<std::string> pool;
  pool.reserve(spec.carrier_attr_pool);
  for (std::size_t k = 0; k < spec.carrier_attr_pool; ++k) pool.push_back(carrier_token(plan.name, k));
  std::shuffle(pool.begin(), pool.end(), rng);
  plan.core.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(core));
  plan.rest.assign(pool.begin() + static_cast<std::ptrdiff_t>(core), pool.end());
  return plan;
}

std::vector<std::string> payload_of(const GenSpec& spec, const TaskSet& tasks) {
  std::vector<std::string> out;
  for (const auto& t : tasks) {
    for (std::size_t k = 0; k < spec.payload_attrs_per_task; ++k) out.push_back(payload_token(t, k));
  }
  return out;
}

GeneratedCorpus assemble(const GenSpec& spec, const std::vector<CarrierPlan>& carriers,
                         const std::vector<FamilyPlan>& families, GenReport report) {
  const std::size_t draws = spec.carrier_attrs_per_sample - report.core_size;
  const std::uint64_t batch_seed = derive_seed(spec.seed, 1 + static_cast<std::uint64_t>(spec.batch));

  FamilyMap family_map;
  std::vector<Sample> samples;
  samples.reserve(families.size() * spec.samples_per_family);
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& fam = families[f];
    const auto& carrier = carriers[fam.carrier];
    family_map.emplace(fam.name, fam.tasks);
    Rng rng(derive_seed(batch_seed, f));
    for (std::size_t i = 0; i < spec.samples_per_family; ++i) {
      Sample s;
      s.id = "b" + std::to_string(spec.batch) + "-" + fam.name + "-" + padded(i);
      s.family = fam.name;
      s.tasks = fam.tasks;
      s.attribs = carrier.core;
      std::sample(carrier.rest.begin(), carrier.rest.end(), std::back_inserter(s.attribs), draws, rng);
      s.attribs.insert(s.attribs.end(), fam.payload.begin(), fam.payload.end());
      s.attribs = make_attribute_set(std::move(s.attribs));
      samples.push_back(std::move(s));
    }
    report.family_sizes[fam.name] = spec.samples_per_family;
  }

  Corpus corpus = Corpus::build(std::move(samples), std::move(family_map));
  const auto [within, cross] = measure_overlap(corpus, derive_seed(spec.seed, 0x0e7a));
  report.within_family_overlap = within;
  report.cross_family_overlap = cross;
  if (spec.samples_per_family >= 2 && std::abs(within - spec.overlap_target) > 0.05) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "realized within-family overlap %.4f misses target %.4f by more than 0.05",
                  within, spec.overlap_target);
    throw GenerationError(buf);
  }
  if (spec.encrypted) {
    corpus = encrypt_variant(corpus, spec.encrypt_fraction, derive_seed(batch_seed, 0xe4c));
    report.encrypted = true;
  }
  return {std::move(corpus), std::move(report)};
}

}  // namespace

void GenSpec::validate() const {
  if (n_carriers < 1) throw GenerationError("need at least one carrier");
  if (tasks_per_carrier < 1) throw GenerationError("need at least one task per carrier");
  if (tasks_per_carrier > task_pool) throw GenerationError("tasks_per_carrier exceeds the task pool");
  if (samples_per_family < 1) throw GenerationError("need at least one sample per family");
  if (carrier_attrs_per_sample > carrier_attr_pool) {
    throw GenerationError("carrier_attrs_per_sample exceeds carrier_attr_pool");
  }
  if (carrier_attrs_per_sample + payload_attrs_per_task == 0) {
    throw GenerationError("samples would have no attributes");
  }
  if (!(overlap_target > 0.0 && overlap_target <= 1.0)) {
    throw GenerationError("overlap target must lie in (0, 1]");
  }
  if (encrypted && !(encrypt_fraction > 0.0 && encrypt_fraction <= 1.0)) {
    throw GenerationError("encryption fraction must lie in (0, 1]");
  }
}

GenSpec single_task_spec() {
  GenSpec spec;
  spec.n_carriers = 1;
  spec.tasks_per_carrier = 1;
  spec.task_pool = 17;
  spec.samples_per_family = 100;
  // A larger pool keeps chance overlap between unrelated samples low, so a few
  // surviving payload attributes still identify the task after encryption.
  spec.carrier_attr_pool = 4000;
  spec.payload_attrs_per_task = 8;
  return spec;
}

double expected_overlap(std::size_t core, std::size_t carrier_pool, std::size_t carrier_attrs,
                        std::size_t payload_attrs) {
  const double m = static_cast<double>(carrier_attrs + payload_attrs);
  const double free_draws = static_cast<double>(carrier_attrs - core);
  const double free_pool = static_cast<double>(carrier_pool - core);
  const double chance = free_draws > 0.0 ? free_draws * free_draws / free_pool : 0.0;
  return (static_cast<double>(core + payload_attrs) + chance) / m;
}

GeneratedCorpus generate(const GenSpec& spec) {
  spec.validate();
  GenReport report;
  report.overlap_target = spec.overlap_target;
  const std::size_t core = solve_core(spec, spec.tasks_per_carrier * spec.payload_attrs_per_task, report);

  Rng rng(derive_seed(spec.seed, 0));
  std::vector<std::size_t> all_tasks(spec.task_pool);
  std::iota(all_tasks.begin(), all_tasks.end(), 0);

  std::vector<CarrierPlan> carriers;
  std::vector<FamilyPlan> families;
  for (std::size_t c = 0; c < spec.n_carriers; ++c) {
    carriers.push_back(plan_carrier(spec, c, core, rng));
    std::vector<std::size_t> picked;
    std::sample(all_tasks.begin(), all_tasks.end(), std::back_inserter(picked), spec.tasks_per_carrier, rng);
    FamilyPlan fam;
    fam.name = carriers.back().name;
    fam.carrier = c;
    for (auto t : picked) fam.tasks.push_back(task_name(t));
    fam.tasks = make_task_set(std::move(fam.tasks));
    fam.payload = payload_of(spec, fam.tasks);
    families.push_back(std::move(fam));
  }
  return assemble(spec, carriers, families, std::move(report));
}

GeneratedCorpus generate_single_task(const GenSpec& spec) {
  spec.validate();
  if (spec.n_carriers != 1) throw GenerationError("single-task generation uses exactly one carrier");
  GenReport report;
  report.overlap_target = spec.overlap_target;
  const std::size_t core = solve_core(spec, spec.payload_attrs_per_task, report);

  Rng rng(derive_seed(spec.seed, 0));
  std::vector<CarrierPlan> carriers{plan_carrier(spec, 0, core, rng)};
  std::vector<FamilyPlan> families;
  for (std::size_t t = 0; t < spec.task_pool; ++t) {
    FamilyPlan fam;
    fam.name = carriers[0].name + ":" + task_name(t);
    fam.tasks = {task_name(t)};
    fam.payload = payload_of(spec, fam.tasks);
    families.push_back(std::move(fam));
  }
  return assemble(spec, carriers, families, std::move(report));
}

bool is_payload_token(std::string_view token) {
  return token.find(kPayloadMarker) != std::string_view::npos;
}

Corpus encrypt_variant(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw GenerationError("encryption fraction must lie in (0, 1]");
  std::bernoulli_distribution replace(fraction);
  std::vector<Sample> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Sample s = corpus.sample(i);
    Rng rng(derive_seed(seed, i));
    for (auto& token : s.attribs) {
      if (!is_payload_token(token) || !replace(rng)) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "fileAct:c:\\windows\\temp\\enc_%016llx.bin",
                    static_cast<unsigned long long>(rng()));
      token = buf;
    }
    s.attribs = make_attribute_set(std::move(s.attribs));
    out.push_back(std::move(s));
  }
  return Corpus::build(std::move(out), corpus.families());
}

std::pair<double, double> measure_overlap(const Corpus& corpus, std::uint64_t seed,
                                          std::size_t max_cross_pairs) {
  auto overlap = [&](std::size_t a, std::size_t b) {
    const auto x = corpus.encoded(a);
    const auto y = corpus.encoded(b);
    std::size_t shared = 0;
    for (auto i = x.begin(), j = y.begin(); i != x.end() && j != y.end();) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++shared, ++i, ++j;
      }
    }
    return static_cast<double>(shared) / std::sqrt(static_cast<double>(x.size() * y.size()));
  };

  double within = 0.0;
  std::size_t families_counted = 0;
  for (std::size_t k = 0; k < corpus.family_names().size(); ++k) {
    const auto m = corpus.family_members(k);
    if (m.size() < 2) continue;
    double sum = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = a + 1; b < m.size(); ++b) sum += overlap(m[a], m[b]);
    }
    within += sum / (static_cast<double>(m.size()) * static_cast<double>(m.size() - 1) / 2.0);
    ++families_counted;
  }
  within = families_counted > 0 ? within / static_cast<double>(families_counted) : 0.0;

  // Cross-family pairs: exhaustive when few, otherwise a uniform sample.
  const std::size_t n = corpus.size();
  std::size_t cross_total = 0;
  for (std::size_t k = 0; k < corpus.family_names().size(); ++k) {
    const std::size_t s = corpus.family_members(k).size();
    cross_total += s * (n - s);
  }
  cross_total /= 2;
  double cross = 0.0;
  std::size_t counted = 0;
  if (cross_total == 0) return {within, 0.0};
  if (cross_total <= max_cross_pairs) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (corpus.family_index(a) == corpus.family_index(b)) continue;
        cross += overlap(a, b);
        ++counted;
      }
    }
  } else {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (counted < max_cross_pairs) {
      const std::size_t a = pick(rng), b = pick(rng);
      if (corpus.family_index(a) == corpus.family_index(b)) continue;
      cross += overlap(a, b);
      ++counted;
    }
  }
  return {within, cross / static_cast<double>(counted)};
}

void write_gen_report(std::ostream& out, const GenReport& report) {
  nlohmann::ordered_json j;
  j["overlap_target"] = report.overlap_target;
  j["expected_overlap"] = report.expected_overlap;
  j["feasible_min"] = report.feasible_min;
  j["core_size"] = report.core_size;
  j["within_family_overlap"] = report.within_family_overlap;
  j["cross_family_overlap"] = report.cross_family_overlap;
  j["family_sizes"] = report.family_sizes;
  j["encrypted"] = report.encrypted;
  out << j.dump() << '\n';
}

}  // namespace taskid
