#include "taskid/report.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace taskid {

using nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json summary_json(const TrialReport& r, bool timing) {
  ordered_json j;
  j["method"] = r.method;
  j["mode"] = r.mode;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["n_tested"] = r.samples.size();
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["family_accuracy"] = optional_number(r.family_accuracy);
  if (timing) {
    j["train_seconds"] = r.train_seconds;
    j["predict_seconds"] = r.predict_seconds;
  }
  ordered_json trials = ordered_json::array();
  for (const auto& t : r.trials) {
    ordered_json tj;
    tj["trial"] = t.trial;
    if (t.held_out_family) tj["held_out_family"] = *t.held_out_family;
    tj["n_train"] = t.n_train;
    tj["n_test"] = t.n_test;
    tj["precision"] = t.precision;
    tj["recall"] = t.recall;
    tj["f1"] = t.f1;
    tj["family_accuracy"] = optional_number(t.family_accuracy);
    if (timing) {
      tj["train_seconds"] = t.train_seconds;
      tj["predict_seconds"] = t.predict_seconds;
    }
    trials.push_back(std::move(tj));
  }
  j["trials"] = std::move(trials);
  return j;
}

ordered_json sample_json(const TrialReport& r, const ScoredSample& s) {
  ordered_json j;
  j["method"] = r.method;
  j["trial"] = s.trial;
  j["id"] = s.id;
  j["precision"] = s.score.precision;
  j["recall"] = s.score.recall;
  j["f1"] = s.score.f1;
  j["family_correct"] = s.score.family_correct ? ordered_json(*s.score.family_correct) : ordered_json(nullptr);
  j["predicted_family"] = s.predicted_family ? ordered_json(*s.predicted_family) : ordered_json(nullptr);
  j["predicted_tasks"] = s.predicted_tasks;
  return j;
}

std::string fmt(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

}  // namespace

void write_report(std::ostream& out, const TrialReport& report, bool include_timing) {
  out << summary_json(report, include_timing).dump() << '\n';
  for (const auto& s : report.samples) out << sample_json(report, s).dump() << '\n';
}

std::string format_table(std::span<const TrialReport> reports, bool include_timing) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-7s %-8s %9s %9s %9s %9s", "method", "mode", "protocol",
                "precision", "recall", "f1", "family");
  os << line << (include_timing ? "   train_s" : "") << '\n';
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-10s %-7s %-8s %9s %9s %9s %9s", r.method.c_str(), r.mode.c_str(),
                  r.protocol.c_str(), fmt(r.precision).c_str(), fmt(r.recall).c_str(), fmt(r.f1).c_str(),
                  fmt(r.family_accuracy).c_str());
    os << line;
    if (include_timing) {
      std::snprintf(line, sizeof line, " %9s", fmt(r.train_seconds, 4).c_str());
      os << line;
    }
    os << '\n';
  }
  return os.str();
}

void write_metric_table(std::ostream& out, std::span<const TrialReport> reports) {
  out << "method,mode,protocol,metric,value\n";
  for (const auto& r : reports) {
    const std::pair<const char*, std::optional<double>> rows[] = {
        {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"family_accuracy", r.family_accuracy}};
    for (const auto& [metric, value] : rows) {
      out << r.method << ',' << r.mode << ',' << r.protocol << ',' << metric << ','
          << (value ? fmt(*value, 6) : std::string("NA")) << '\n';
    }
  }
}

Comparison compare_reports(std::vector<TrialReport> reports) {
  Comparison out;
  out.reports = std::move(reports);

  using Key = std::pair<std::size_t, std::string>;
  std::vector<std::map<Key, const ScoredSample*>> index(out.reports.size());
  for (std::size_t m = 0; m < out.reports.size(); ++m) {
    for (const auto& s : out.reports[m].samples) index[m][{s.trial, s.id}] = &s;
  }

  for (std::size_t a = 0; a < out.reports.size(); ++a) {
    for (std::size_t b = a + 1; b < out.reports.size(); ++b) {
      for (const char* metric : {"f1", "family_accuracy"}) {
        PairwiseTest cell;
        cell.method_a = out.reports[a].method;
        cell.method_b = out.reports[b].method;
        cell.metric = metric;
        std::vector<double> xs, ys;
        for (const auto& [key, sa] : index[a]) {
          auto it = index[b].find(key);
          if (it == index[b].end()) continue;
          const ScoredSample* sb = it->second;
          if (cell.metric == "f1") {
            xs.push_back(sa->score.f1);
            ys.push_back(sb->score.f1);
          } else if (sa->score.family_correct && sb->score.family_correct) {
            xs.push_back(*sa->score.family_correct ? 1.0 : 0.0);
            ys.push_back(*sb->score.family_correct ? 1.0 : 0.0);
          }
        }
        cell.pairs = xs.size();
        if (cell.metric == "family_accuracy" && xs.empty()) continue;
        try {
          cell.test = paired_ttest(xs, ys);
        } catch (const DegenerateTestError&) {
          cell.note = "degenerate: zero variance of differences";
        } catch (const std::invalid_argument& e) {
          cell.note = e.what();
        }
        out.tests.push_back(std::move(cell));
      }
    }
  }
  return out;
}

void write_comparison(std::ostream& out, const Comparison& comparison, bool include_timing) {
  for (const auto& r : comparison.reports) {
    ordered_json j = summary_json(r, include_timing);
    j.erase("trials");
    j["kind"] = "summary";
    out << j.dump() << '\n';
  }
  for (const auto& t : comparison.tests) {
    ordered_json j;
    j["kind"] = "ttest";
    j["a"] = t.method_a;
    j["b"] = t.method_b;
    j["metric"] = t.metric;
    j["pairs"] = t.pairs;
    if (t.test) {
      j["t"] = t.test->t;
      j["df"] = t.test->df;
      j["p"] = t.test->p_value;
    } else {
      j["t"] = nullptr;
      j["df"] = nullptr;
      j["p"] = nullptr;
      j["note"] = t.note;
    }
    out << j.dump() << '\n';
  }
  for (const auto& r : comparison.reports) {
    for (const auto& s : r.samples) out << sample_json(r, s).dump() << '\n';
  }
}

std::string format_comparison(const Comparison& comparison, bool include_timing) {
  std::ostringstream os;
  os << format_table(comparison.reports, include_timing) << '\n';
  for (const auto& t : comparison.tests) {
    os << t.method_a << " vs " << t.method_b << " [" << t.metric << "]: ";
    if (t.test) {
      os << "t(" << t.test->df << ") = " << fmt(t.test->t, 2) << ", p = " << fmt(t.test->p_value, 4);
    } else {
      os << t.note;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace taskid
