#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace taskid {

/// Raised for any violation of the corpus contract (labels, ids, attribute sets).
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted, duplicate-free list of attribute tokens ("usesDLL:kernel32.dll", "proAct", ...).
using AttributeSet = std::vector<std::string>;
/// Sorted, duplicate-free list of task tokens.
using TaskSet = std::vector<std::string>;
/// Family id -> the tasks every member of that family performs.
using FamilyMap = std::map<std::string, TaskSet>;

/// Dense index of an interned attribute token within one Vocabulary.
using AttrIndex = std::uint32_t;

// Both collapse duplicates and reject empty tokens.
AttributeSet make_attribute_set(std::vector<std::string> tokens);
TaskSet make_task_set(std::vector<std::string> tokens);

struct Sample {
  std::string id;
  AttributeSet attribs;
  std::optional<std::string> family;
  std::optional<TaskSet> tasks;

  bool operator==(const Sample&) const = default;
};

/// Bijective token <-> index map. Frozen once the owning corpus is built.
class Vocabulary {
 public:
  AttrIndex intern(std::string_view token);
  std::optional<AttrIndex> find(std::string_view token) const;
  const std::string& token(AttrIndex index) const { return tokens_.at(index); }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, AttrIndex> index_;
};

/// A query translated into a vocabulary. Tokens the vocabulary has never seen
/// are only counted, since no model can associate anything with them.
struct EncodedQuery {
  std::vector<AttrIndex> known;  // sorted
  std::size_t unknown = 0;

  std::size_t size() const { return known.size() + unknown; }
  bool empty() const { return size() == 0; }
};

/// Immutable, indexed collection of labeled samples.
///
/// Copies are cheap and share state. Subsets share the parent's vocabulary so
/// that queries encoded against the parent stay valid for models trained on
/// any subset; attributes missing from a subset simply have fan 0 there.
class Corpus {
 public:
  Corpus();

  static Corpus build(std::vector<Sample> samples, FamilyMap families);

  Corpus subset(std::span<const std::size_t> indices) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }

  const Sample& sample(std::size_t i) const;
  std::span<const Sample> samples() const;
  /// Sorted attribute indices of sample i.
  std::span<const AttrIndex> encoded(std::size_t i) const;

  const FamilyMap& families() const;
  /// Family names in sorted order; family_index() refers into this list.
  std::span<const std::string> family_names() const;
  std::size_t family_index(std::size_t i) const;
  /// Members of family k (by position in family_names()).
  std::span<const std::size_t> family_members(std::size_t k) const;

  /// Sorted union of every family's tasks.
  std::span<const std::string> task_names() const;
  /// Indices into task_names() for sample i.
  std::span<const std::uint32_t> task_indices(std::size_t i) const;

  const Vocabulary& vocabulary() const;
  std::uint32_t fan(AttrIndex a) const;
  std::uint32_t fan(std::string_view token) const;
  /// Samples containing attribute a, ascending.
  std::span<const std::uint32_t> postings(AttrIndex a) const;

  EncodedQuery encode(const AttributeSet& query) const;

  /// Same families and the same samples irrespective of order.
  bool equivalent(const Corpus& other) const;

 private:
  struct Impl;
  explicit Corpus(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

enum class PartialMatch {
  Overlap,   // mp * |q ∩ j| / sqrt(|q| |j|), in [0, mp]
  Mismatch,  // mp * (overlap - 1), in [-mp, 0]
};

/// Cognitive-model parameters. Defaults are the standard ACT-R settings.
struct ActrParams {
  double beta = 20.0;
  double noise = 0.1;  // softmax temperature s
  double tau = -10.0;
  double mp = 20.0;
  double w = 16.0;
  double task_threshold = 0.5;
  PartialMatch partial_match = PartialMatch::Overlap;

  void validate() const;
};

enum class Mode { Family, Direct };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct Prediction {
  /// Families in family mode, tasks in direct mode.
  std::map<std::string, double> class_probs;
  TaskSet predicted_tasks;
  std::optional<std::string> predicted_family;
  std::size_t retained_chunks = 0;
  bool degenerate = false;
};

/// Tasks whose summed family probability reaches the threshold.
TaskSet tasks_from_family_probs(const std::map<std::string, double>& family_probs,
                                const FamilyMap& families, double threshold);
/// Tasks whose own probability reaches the threshold.
TaskSet tasks_from_task_probs(const std::map<std::string, double>& task_probs, double threshold);
/// Highest-probability label; ties go to the lexicographically smallest.
std::optional<std::string> argmax_label(const std::map<std::string, double>& probs);

}  // namespace taskid
