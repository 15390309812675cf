#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "taskid/core.hpp"

namespace taskid {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathRules {
  bool fold_case = true;
  bool scrub_user_dirs = true;  // ...\users\<name>\ and ...\documents and settings\<name>\ .
  bool scrub_guids = true;      // {xxxxxxxx-xxxx-...} and SIDs
  bool scrub_temp_names = true; // ~abc1234.tmp style names
};

struct ExtractionConfig {
  bool uses_dll = true;
  bool reg_act = true;
  bool file_act = true;
  bool pro_act = true;
  /// Also read static.pe_imports into usesDLL attributes.
  bool include_static = false;
  PathRules paths;
  /// 0 = unlimited; otherwise the lexicographically first tokens are kept.
  std::size_t max_attributes = 0;

  void validate() const;
};

/// Reads an ExtractionConfig from a JSON object file; absent keys keep defaults.
ExtractionConfig load_extraction_config(const std::filesystem::path& path);
ExtractionConfig parse_extraction_config(std::string_view json_text);

/// Normalizes a file path or registry key. Idempotent.
std::string normalize_path(std::string_view raw, const PathRules& rules = {});

/// Parses one Cuckoo-style JSON report into an unlabeled sample.
Sample parse_report(std::string_view bytes, const ExtractionConfig& config = {});
Sample parse_report_file(const std::filesystem::path& path, const ExtractionConfig& config = {});

/// True if `token` has one of the four attribute shapes this parser emits.
bool is_valid_attribute_token(std::string_view token);

}  // namespace taskid
