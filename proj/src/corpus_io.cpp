#include "taskid/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace taskid {

using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& node, const char* field) {
  if (!node.is_array()) throw std::invalid_argument(std::string("'") + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_string()) {
      throw std::invalid_argument(std::string("'") + field + "' must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

FamilyMap parse_header(const json& header) {
  if (!header.is_object() || !header.contains("families") || !header["families"].is_object()) {
    throw std::invalid_argument("header must be an object with a 'families' map");
  }
  FamilyMap families;
  for (const auto& [name, tasks] : header["families"].items()) {
    families.emplace(name, make_task_set(string_array(tasks, "families")));
  }
  return families;
}

Sample parse_record(const json& rec, const FamilyMap& families) {
  if (!rec.is_object()) throw std::invalid_argument("record must be an object");
  if (!rec.contains("id") || !rec["id"].is_string()) {
    throw std::invalid_argument("record needs a string 'id'");
  }
  if (!rec.contains("attributes")) throw std::invalid_argument("record needs 'attributes'");

  Sample s;
  s.id = rec["id"].get<std::string>();
  if (s.id.empty()) throw std::invalid_argument("record has an empty 'id'");
  s.attribs = make_attribute_set(string_array(rec["attributes"], "attributes"));
  if (rec.contains("family") && !rec["family"].is_null()) {
    if (!rec["family"].is_string()) throw std::invalid_argument("'family' must be a string");
    s.family = rec["family"].get<std::string>();
  }
  if (rec.contains("tasks") && !rec["tasks"].is_null()) {
    s.tasks = make_task_set(string_array(rec["tasks"], "tasks"));
  }
  if (s.family && s.tasks) {
    auto it = families.find(*s.family);
    if (it != families.end() && it->second != *s.tasks) {
      throw std::invalid_argument("tasks of '" + s.id + "' differ from family '" + *s.family + "'");
    }
  }
  return s;
}

json record_json(const Sample& s) {
  json rec;
  rec["id"] = s.id;
  rec["family"] = s.family ? json(*s.family) : json(nullptr);
  rec["tasks"] = s.tasks ? json(*s.tasks) : json(nullptr);
  rec["attributes"] = s.attribs;
  return rec;
}

}  // namespace

CorpusRecords read_records(std::istream& in) {
  CorpusRecords out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const json node = json::parse(line);
      if (!have_header) {
        out.families = parse_header(node);
        have_header = true;
        continue;
      }
      Sample s = parse_record(node, out.families);
      if (!ids.insert(s.id).second) throw std::invalid_argument("duplicate sample id '" + s.id + "'");
      out.samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw CorpusError("corpus file has no header record");
  return out;
}

CorpusRecords load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open '" + path.string() + "'");
  try {
    return read_records(in);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

void write_records(std::ostream& out, const CorpusRecords& records) {
  json header;
  header["families"] = json::object();
  for (const auto& [name, tasks] : records.families) header["families"][name] = tasks;
  out << header.dump() << '\n';
  for (const auto& s : records.samples) out << record_json(s).dump() << '\n';
}

void save_records(const CorpusRecords& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write '" + path.string() + "'");
  write_records(out, records);
}

Corpus read_corpus(std::istream& in) {
  auto records = read_records(in);
  return Corpus::build(std::move(records.samples), std::move(records.families));
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto records = load_records(path);
  try {
    return Corpus::build(std::move(records.samples), std::move(records.families));
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  CorpusRecords records{corpus.families(), {corpus.samples().begin(), corpus.samples().end()}};
  write_records(out, records);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write '" + path.string() + "'");
  write_corpus(out, corpus);
}

}  // namespace taskid
