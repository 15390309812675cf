#include "taskid/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace taskid {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> tokens, const char* what) {
  for (const auto& t : tokens) {
    if (t.empty()) throw CorpusError(std::string("empty ") + what + " token");
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

}  // namespace

AttributeSet make_attribute_set(std::vector<std::string> tokens) {
  return sorted_unique(std::move(tokens), "attribute");
}

TaskSet make_task_set(std::vector<std::string> tokens) {
  return sorted_unique(std::move(tokens), "task");
}

AttrIndex Vocabulary::intern(std::string_view token) {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<AttrIndex>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<AttrIndex> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

struct Corpus::Impl {
  std::vector<Sample> samples;
  std::vector<std::vector<AttrIndex>> encoded;
  FamilyMap families;
  std::vector<std::string> family_names;
  std::vector<std::size_t> family_of;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::string> task_names;
  std::vector<std::vector<std::uint32_t>> task_indices;
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<std::uint32_t> fan;
  std::vector<std::vector<std::uint32_t>> postings;

  // Everything except samples/encoded/families/vocab is derived here.
  void index() {
    family_names.clear();
    for (const auto& [name, _] : families) family_names.push_back(name);
    members.assign(family_names.size(), {});
    family_of.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto it = std::lower_bound(family_names.begin(), family_names.end(), *samples[i].family);
      family_of[i] = static_cast<std::size_t>(it - family_names.begin());
      members[family_of[i]].push_back(i);
    }

    std::set<std::string> all_tasks;
    for (const auto& [_, tasks] : families) all_tasks.insert(tasks.begin(), tasks.end());
    task_names.assign(all_tasks.begin(), all_tasks.end());
    task_indices.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto& out = task_indices[i];
      out.clear();
      for (const auto& t : *samples[i].tasks) {
        auto it = std::lower_bound(task_names.begin(), task_names.end(), t);
        out.push_back(static_cast<std::uint32_t>(it - task_names.begin()));
      }
    }

    fan.assign(vocab->size(), 0);
    postings.assign(vocab->size(), {});
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      for (AttrIndex a : encoded[i]) {
        ++fan[a];
        postings[a].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
};

Corpus::Corpus() {
  auto impl = std::make_shared<Impl>();
  impl->vocab = std::make_shared<Vocabulary>();
  impl_ = std::move(impl);
}

Corpus::Corpus(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Corpus Corpus::build(std::vector<Sample> samples, FamilyMap families) {
  for (auto& [name, tasks] : families) {
    if (name.empty()) throw CorpusError("empty family id");
    tasks = make_task_set(std::move(tasks));
  }

  std::unordered_set<std::string> seen;
  for (auto& s : samples) {
    if (s.id.empty()) throw CorpusError("sample with empty id");
    if (!seen.insert(s.id).second) throw CorpusError("duplicate sample id '" + s.id + "'");
    if (!s.family) throw CorpusError("sample '" + s.id + "' has no family label");
    auto fam = families.find(*s.family);
    if (fam == families.end()) {
      throw CorpusError("sample '" + s.id + "' names unknown family '" + *s.family + "'");
    }
    s.attribs = make_attribute_set(std::move(s.attribs));
    if (s.attribs.empty()) throw CorpusError("sample '" + s.id + "' has an empty attribute set");
    if (s.tasks) {
      s.tasks = make_task_set(std::move(*s.tasks));
      if (*s.tasks != fam->second) {
        throw CorpusError("sample '" + s.id + "' tasks differ from family '" + *s.family + "'");
      }
    } else {
      s.tasks = fam->second;
    }
  }

  auto impl = std::make_shared<Impl>();
  auto vocab = std::make_shared<Vocabulary>();
  impl->encoded.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<AttrIndex> ids;
    ids.reserve(s.attribs.size());
    for (const auto& a : s.attribs) ids.push_back(vocab->intern(a));
    std::sort(ids.begin(), ids.end());
    impl->encoded.push_back(std::move(ids));
  }
  impl->samples = std::move(samples);
  impl->families = std::move(families);
  impl->vocab = std::move(vocab);
  impl->index();
  return Corpus(std::move(impl));
}

Corpus Corpus::subset(std::span<const std::size_t> indices) const {
  auto impl = std::make_shared<Impl>();
  impl->vocab = impl_->vocab;
  impl->samples.reserve(indices.size());
  impl->encoded.reserve(indices.size());
  for (std::size_t i : indices) {
    impl->samples.push_back(impl_->samples.at(i));
    impl->encoded.push_back(impl_->encoded.at(i));
    const auto& fam = *impl_->samples[i].family;
    impl->families.emplace(fam, impl_->families.at(fam));
  }
  impl->index();
  return Corpus(std::move(impl));
}

std::size_t Corpus::size() const { return impl_->samples.size(); }
const Sample& Corpus::sample(std::size_t i) const { return impl_->samples.at(i); }
std::span<const Sample> Corpus::samples() const { return impl_->samples; }
std::span<const AttrIndex> Corpus::encoded(std::size_t i) const { return impl_->encoded.at(i); }
const FamilyMap& Corpus::families() const { return impl_->families; }
std::span<const std::string> Corpus::family_names() const { return impl_->family_names; }
std::size_t Corpus::family_index(std::size_t i) const { return impl_->family_of.at(i); }
std::span<const std::size_t> Corpus::family_members(std::size_t k) const {
  return impl_->members.at(k);
}
std::span<const std::string> Corpus::task_names() const { return impl_->task_names; }
std::span<const std::uint32_t> Corpus::task_indices(std::size_t i) const {
  return impl_->task_indices.at(i);
}
const Vocabulary& Corpus::vocabulary() const { return *impl_->vocab; }

std::uint32_t Corpus::fan(AttrIndex a) const {
  return a < impl_->fan.size() ? impl_->fan[a] : 0;
}

std::uint32_t Corpus::fan(std::string_view token) const {
  auto id = impl_->vocab->find(token);
  return id ? fan(*id) : 0;
}

std::span<const std::uint32_t> Corpus::postings(AttrIndex a) const {
  if (a >= impl_->postings.size()) return {};
  return impl_->postings[a];
}

EncodedQuery Corpus::encode(const AttributeSet& query) const {
  EncodedQuery q;
  for (const auto& token : make_attribute_set(query)) {
    if (auto id = impl_->vocab->find(token)) {
      q.known.push_back(*id);
    } else {
      ++q.unknown;
    }
  }
  std::sort(q.known.begin(), q.known.end());
  return q;
}

bool Corpus::equivalent(const Corpus& other) const {
  if (families() != other.families() || size() != other.size()) return false;
  auto sorted = [](std::span<const Sample> s) {
    std::vector<Sample> v(s.begin(), s.end());
    std::sort(v.begin(), v.end(), [](const Sample& a, const Sample& b) { return a.id < b.id; });
    return v;
  };
  return sorted(samples()) == sorted(other.samples());
}

void ActrParams::validate() const {
  if (!(noise > 0.0) || !std::isfinite(noise)) throw std::invalid_argument("noise s must be > 0");
  if (!(mp >= 0.0)) throw std::invalid_argument("mismatch penalty mp must be >= 0");
  if (!(task_threshold > 0.0 && task_threshold <= 1.0)) {
    throw std::invalid_argument("task threshold must lie in (0, 1]");
  }
  if (!std::isfinite(beta) || !std::isfinite(tau) || !std::isfinite(w)) {
    throw std::invalid_argument("ACT-R parameters must be finite");
  }
}

std::string_view to_string(Mode mode) { return mode == Mode::Family ? "family" : "direct"; }

Mode parse_mode(std::string_view text) {
  if (text == "family") return Mode::Family;
  if (text == "direct") return Mode::Direct;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

TaskSet tasks_from_family_probs(const std::map<std::string, double>& family_probs,
                                const FamilyMap& families, double threshold) {
  std::map<std::string, double> task_mass;
  for (const auto& [family, p] : family_probs) {
    auto it = families.find(family);
    if (it == families.end()) continue;
    for (const auto& t : it->second) task_mass[t] += p;
  }
  return tasks_from_task_probs(task_mass, threshold);
}

TaskSet tasks_from_task_probs(const std::map<std::string, double>& task_probs, double threshold) {
  TaskSet out;
  for (const auto& [task, p] : task_probs) {
    if (p >= threshold) out.push_back(task);
  }
  return out;
}

std::optional<std::string> argmax_label(const std::map<std::string, double>& probs) {
  std::optional<std::string> best;
  double best_p = -1.0;
  for (const auto& [label, p] : probs) {
    if (p > best_p) {
      best_p = p;
      best = label;
    }
  }
  return best;
}

}  // namespace taskid
