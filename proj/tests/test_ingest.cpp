#include <doctest.h>

#include <fstream>
#include <sstream>

#include "taskid/ingest.hpp"

using namespace taskid;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string report_with(const std::string& behavior) {
  return R"({"target":{"file":{"sha256":"abc"}},"behavior":)" + behavior + "}";
}

bool contains(const AttributeSet& s, const std::string& token) {
  return std::find(s.begin(), s.end(), token) != s.end();
}

}  // namespace

TEST_CASE("golden report") {
  const Sample s = parse_report_file(std::string(TASKID_TEST_DATA) + "/cuckoo_report_golden.json");
  std::string joined;
  for (const auto& t : s.attribs) joined += t + "\n";
  CHECK(joined == read_file(std::string(TASKID_TEST_DATA) + "/cuckoo_report_golden.tokens"));
  CHECK(s.id == "5e1c0f3a8b7d6c2e9f4a1b0c3d5e7f9a2b4c6d8e0f1a3b5c7d9e1f2a4b6c8d0e");
  CHECK_FALSE(s.family.has_value());
  for (const auto& t : s.attribs) CHECK(is_valid_attribute_token(t));
}

TEST_CASE("dll loads") {
  const auto s = parse_report(report_with(R"({"summary":{"dll_loaded":["C:\\Windows\\System32\\KERNEL32.dll","kernel32.dll"]}})"));
  CHECK(s.attribs == AttributeSet{"usesDLL:kernel32.dll"});
}

TEST_CASE("process spawning") {
  const auto tree = parse_report(report_with(
      R"({"processtree":[{"pid":1,"children":[{"pid":2,"children":[]}]}],"summary":{"dll_loaded":["a.dll"]}})"));
  CHECK(contains(tree.attribs, "proAct"));
  const auto lone = parse_report(report_with(R"({"processes":[{"pid":1}],"summary":{"dll_loaded":["a.dll"]}})"));
  CHECK_FALSE(contains(lone.attribs, "proAct"));
}

TEST_CASE("malformed reports") {
  CHECK_THROWS_AS(parse_report(R"({"target":{"file":{"sha256":"abc"}}})"), IngestError);
  CHECK_THROWS_AS(parse_report("{not json"), IngestError);
  CHECK_THROWS_AS(parse_report(R"({"behavior":{"summary":{"dll_loaded":["a.dll"]}}})"), IngestError);
  CHECK_THROWS_AS(parse_report(report_with(R"({"summary":{}})")), IngestError);
  CHECK_THROWS_AS(parse_report(report_with(R"({"summary":{"dll_loaded":"a.dll"}})")), IngestError);
  CHECK_THROWS_AS(parse_report_file("/nonexistent/report.json"), IngestError);
}

TEST_CASE("path normalization") {
  CHECK(normalize_path("C:\\Users\\bob\\x.exe") == "c:\\users\\<user>\\x.exe");
  CHECK(normalize_path("C:\\Documents and Settings\\Alice\\a.txt") == "c:\\documents and settings\\<user>\\a.txt");
  CHECK(normalize_path("c:\\programdata\\{0A1B2C3D-4E5F-6071-8293-A4B5C6D7E8F9}\\x") == "c:\\programdata\\{<guid>}\\x");
  CHECK(normalize_path("c:\\temp\\~DF3A91C.tmp") == "c:\\temp\\<tmp>.tmp");
  CHECK(normalize_path("c:\\temp\\report.tmp") == "c:\\temp\\report.tmp");
  CHECK(normalize_path("C:\\WINDOWS\\x.DLL") == normalize_path("c:\\windows\\x.dll"));

  for (const char* raw : {"C:\\Users\\bob\\x.exe", "c:\\temp\\~DF3A91C.tmp", "hklm\\s-1-5-21-1-2-3\\k"}) {
    const auto once = normalize_path(raw);
    CHECK(normalize_path(once) == once);
  }

  PathRules keep_case;
  keep_case.fold_case = false;
  keep_case.scrub_user_dirs = false;
  CHECK(normalize_path("C:\\Users\\bob\\X.exe", keep_case) == "C:\\Users\\bob\\X.exe");
}

TEST_CASE("extraction config") {
  const auto cfg = parse_extraction_config(R"({"regAct":false,"include_static":true,"max_attributes":2})");
  CHECK_FALSE(cfg.reg_act);
  CHECK(cfg.include_static);
  CHECK(cfg.max_attributes == 2);
  CHECK_THROWS_AS(parse_extraction_config(R"({"usesDLL":"yes"})"), IngestError);
  CHECK_THROWS_AS(parse_extraction_config("[]"), IngestError);
  CHECK_THROWS_AS(parse_extraction_config(R"({"usesDLL":false,"regAct":false,"fileAct":false,"proAct":false})"),
                  std::invalid_argument);

  const auto golden = std::string(TASKID_TEST_DATA) + "/cuckoo_report_golden.json";
  ExtractionConfig dll_only;
  dll_only.reg_act = dll_only.file_act = dll_only.pro_act = false;
  const auto s = parse_report_file(golden, dll_only);
  for (const auto& t : s.attribs) CHECK(t.rfind("usesDLL:", 0) == 0);

  ExtractionConfig capped;
  capped.max_attributes = 3;
  CHECK(parse_report_file(golden, capped).attribs.size() == 3);

  ExtractionConfig with_static;
  with_static.include_static = true;
  const auto base = parse_report_file(golden);
  const auto more = parse_report_file(golden, with_static);
  CHECK(more.attribs.size() >= base.attribs.size());
}
