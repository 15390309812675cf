#include "taskid/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace taskid {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const std::regex& user_dir_re() {
  static const std::regex re(R"((\\(?:users|documents and settings)\\)[^\\]+)", std::regex::icase);
  return re;
}
const std::regex& guid_re() {
  static const std::regex re(
      "[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}", std::regex::icase);
  return re;
}
const std::regex& sid_re() {
  static const std::regex re(R"(s-1-5-21(?:-[0-9]+)+)", std::regex::icase);
  return re;
}
const std::regex& temp_re() {
  static const std::regex re(R"((^|\\)~?[a-z]{0,3}[0-9a-f]{2,}\.tmp(?=\\|$))", std::regex::icase);
  return re;
}

std::string normalize_dll(std::string_view raw, const PathRules& rules) {
  const auto cut = raw.find_last_of("\\/");
  std::string_view base = cut == std::string_view::npos ? raw : raw.substr(cut + 1);
  return rules.fold_case ? lower(base) : std::string(base);
}

std::string normalize_regkey(std::string_view raw, const PathRules& rules) {
  static const std::pair<const char*, const char*> roots[] = {
      {"hkey_local_machine", "hklm"}, {"hkey_current_user", "hkcu"},
      {"hkey_classes_root", "hkcr"},  {"hkey_users", "hku"},
  };
  std::string key(raw);
  const std::string head = lower(key.substr(0, key.find('\\')));
  for (const auto& [long_name, short_name] : roots) {
    if (head == long_name) {
      key = short_name + key.substr(head.size());
      break;
    }
  }
  return normalize_path(key, rules);
}

// Strings of an array field; {src, dst} objects contribute both paths.
std::vector<std::string> string_entries(const json& parent, const char* field, const std::string& where) {
  std::vector<std::string> out;
  if (!parent.contains(field) || parent[field].is_null()) return out;
  const json& node = parent[field];
  const std::string path = where + "/" + field;
  if (!node.is_array()) throw IngestError(path + ": expected an array");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const json& v = node[i];
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_object()) {
      for (const char* k : {"src", "dst"}) {
        if (v.contains(k) && v[k].is_string()) out.push_back(v[k].get<std::string>());
      }
    } else {
      throw IngestError(path + "/" + std::to_string(i) + ": expected a string");
    }
  }
  return out;
}

bool spawns_process(const json& behavior) {
  if (behavior.contains("processes") && behavior["processes"].is_array() &&
      behavior["processes"].size() > 1) {
    return true;
  }
  if (behavior.contains("processtree") && behavior["processtree"].is_array()) {
    for (const auto& p : behavior["processtree"]) {
      if (p.is_object() && p.contains("children") && p["children"].is_array() && !p["children"].empty()) {
        return true;
      }
    }
  }
  return false;
}

std::string sample_id(const json& report) {
  if (report.contains("target") && report["target"].is_object()) {
    const json& target = report["target"];
    if (target.contains("file") && target["file"].is_object()) {
      const json& file = target["file"];
      for (const char* k : {"sha256", "md5", "name"}) {
        if (file.contains(k) && file[k].is_string() && !file[k].get<std::string>().empty()) {
          return file[k].get<std::string>();
        }
      }
    }
  }
  throw IngestError("/target/file: report does not identify the analyzed sample");
}

constexpr const char* kRegistryOps[] = {"regkey_written", "regkey_deleted"};
constexpr const char* kFileOps[] = {"file_created", "file_written", "file_deleted",
                                    "file_recreated", "file_moved", "file_copied"};

}  // namespace

void ExtractionConfig::validate() const {
  if (!uses_dll && !reg_act && !file_act && !pro_act) {
    throw std::invalid_argument("extraction config enables no attribute kind");
  }
}

ExtractionConfig parse_extraction_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IngestError(std::string("extraction config: ") + e.what());
  }
  if (!j.is_object()) throw IngestError("extraction config must be a JSON object");
  ExtractionConfig c;
  auto flag = [&](const char* key, bool& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw IngestError(std::string("extraction config: '") + key + "' must be boolean");
    field = j[key].get<bool>();
  };
  flag("usesDLL", c.uses_dll);
  flag("regAct", c.reg_act);
  flag("fileAct", c.file_act);
  flag("proAct", c.pro_act);
  flag("include_static", c.include_static);
  flag("fold_case", c.paths.fold_case);
  flag("scrub_user_dirs", c.paths.scrub_user_dirs);
  flag("scrub_guids", c.paths.scrub_guids);
  flag("scrub_temp_names", c.paths.scrub_temp_names);
  if (j.contains("max_attributes")) {
    if (!j["max_attributes"].is_number_unsigned()) {
      throw IngestError("extraction config: 'max_attributes' must be a non-negative integer");
    }
    c.max_attributes = j["max_attributes"].get<std::size_t>();
  }
  c.validate();
  return c;
}

ExtractionConfig load_extraction_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open extraction config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_extraction_config(ss.str());
}

std::string normalize_path(std::string_view raw, const PathRules& rules) {
  std::string s = rules.fold_case ? lower(raw) : std::string(raw);
  if (rules.scrub_user_dirs) s = std::regex_replace(s, user_dir_re(), "$1<user>");
  if (rules.scrub_guids) {
    s = std::regex_replace(s, guid_re(), "<guid>");
    s = std::regex_replace(s, sid_re(), "<sid>");
  }
  if (rules.scrub_temp_names) s = std::regex_replace(s, temp_re(), "$1<tmp>.tmp");
  return s;
}

Sample parse_report(std::string_view bytes, const ExtractionConfig& config) {
  config.validate();
  json report;
  try {
    report = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw IngestError(std::string("malformed report: ") + e.what());
  }
  if (!report.is_object()) throw IngestError("malformed report: top level is not an object");

  Sample sample;
  sample.id = sample_id(report);
  if (!report.contains("behavior") || !report["behavior"].is_object()) {
    throw IngestError("report '" + sample.id + "' has no behavior section; no attributes to extract");
  }
  const json& behavior = report["behavior"];
  static const json kEmpty = json::object();
  const json& summary =
      behavior.contains("summary") && behavior["summary"].is_object() ? behavior["summary"] : kEmpty;

  std::set<std::string> tokens;
  if (config.uses_dll) {
    for (const auto& dll : string_entries(summary, "dll_loaded", "/behavior/summary")) {
      tokens.insert("usesDLL:" + normalize_dll(dll, config.paths));
    }
    if (config.include_static && report.contains("static") && report["static"].is_object() &&
        report["static"].contains("pe_imports") && report["static"]["pe_imports"].is_array()) {
      for (const auto& imp : report["static"]["pe_imports"]) {
        if (imp.is_object() && imp.contains("dll") && imp["dll"].is_string()) {
          tokens.insert("usesDLL:" + normalize_dll(imp["dll"].get<std::string>(), config.paths));
        }
      }
    }
  }
  if (config.reg_act) {
    for (const char* op : kRegistryOps) {
      for (const auto& key : string_entries(summary, op, "/behavior/summary")) {
        tokens.insert("regAct:" + normalize_regkey(key, config.paths));
      }
    }
  }
  if (config.file_act) {
    for (const char* op : kFileOps) {
      for (const auto& path : string_entries(summary, op, "/behavior/summary")) {
        tokens.insert("fileAct:" + normalize_path(path, config.paths));
      }
    }
  }
  if (config.pro_act && spawns_process(behavior)) tokens.insert("proAct");

  // Drop kinds whose argument normalized to nothing.
  for (auto it = tokens.begin(); it != tokens.end();) {
    it = is_valid_attribute_token(*it) ? std::next(it) : tokens.erase(it);
  }
  if (tokens.empty()) {
    throw IngestError("report '" + sample.id + "' yields an empty attribute set");
  }
  sample.attribs.assign(tokens.begin(), tokens.end());
  if (config.max_attributes > 0 && sample.attribs.size() > config.max_attributes) {
    sample.attribs.resize(config.max_attributes);
  }
  return sample;
}

Sample parse_report_file(const std::filesystem::path& path, const ExtractionConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open report '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_report(bytes, config);
}

bool is_valid_attribute_token(std::string_view token) {
  static const std::regex re(R"(^(?:(?:usesDLL|regAct|fileAct):.+|proAct)$)");
  return std::regex_match(token.begin(), token.end(), re);
}

}  // namespace taskid
