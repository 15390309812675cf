#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "taskid/core.hpp"

namespace taskid {

/// Raw contents of a corpus file: the header's family map and every record,
/// labeled or not.
struct CorpusRecords {
  FamilyMap families;
  std::vector<Sample> samples;
};

// Line-oriented JSON format:
//   line 1:  {"families": {"<family>": ["<task>", ...], ...}}
//   line n:  {"id": "...", "family": "...", "tasks": [...], "attributes": [...]}
// family/tasks may be null or absent on unlabeled records.

CorpusRecords read_records(std::istream& in);
CorpusRecords load_records(const std::filesystem::path& path);
void write_records(std::ostream& out, const CorpusRecords& records);
void save_records(const CorpusRecords& records, const std::filesystem::path& path);

/// Loads and validates a fully labeled corpus.
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);

}  // namespace taskid
