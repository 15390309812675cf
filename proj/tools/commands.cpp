#include "commands.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "taskid/classifier.hpp"
#include "taskid/corpus_io.hpp"
#include "taskid/eval.hpp"
#include "taskid/ingest.hpp"
#include "taskid/report.hpp"
#include "taskid/synthgen.hpp"

namespace taskid::cli {

namespace {

const std::vector<std::string> kMethods = {"actr-ib", "actr-r", "nb", "dt", "rf", "logreg"};
const std::vector<std::string> kProtocols = {"loocv", "split", "lofo", "holdout"};
const std::vector<std::string> kModes = {"family", "direct"};

// Flags shared by eval, compare and predict.
struct ModelFlags {
  std::string corpus;
  std::string mode = "family";
  std::uint64_t seed = 0;
  MethodConfig config;
  std::string partial_match = "overlap";
};

struct EvalFlags {
  ModelFlags model;
  std::vector<std::string> methods;
  std::string protocol = "split";
  double train_frac = 0.6;
  std::size_t trials = 10;
  std::string test_corpus;
  std::string out;
  std::string table_out;
  bool timing = false;
};

void add_model_flags(CLI::App& cmd, ModelFlags& f) {
  cmd.add_option("--corpus", f.corpus, "Labeled training corpus")->required();
  cmd.add_option("--mode", f.mode, "family | direct")->check(CLI::IsMember(kModes));
  cmd.add_option("--seed", f.seed, "Seed for every random stream");
  auto& p = f.config.actr;
  cmd.add_option("--beta", p.beta, "Base-level constant (instance model)");
  cmd.add_option("--noise", p.noise, "Softmax temperature s");
  cmd.add_option("--tau", p.tau, "Retrieval threshold");
  cmd.add_option("--mp", p.mp, "Mismatch penalty");
  cmd.add_option("--w", p.w, "Spreading weight (rule model)");
  cmd.add_option("--task-threshold", p.task_threshold, "Minimum probability of a predicted task");
  cmd.add_option("--partial-match", f.partial_match, "overlap | mismatch")
      ->check(CLI::IsMember({"overlap", "mismatch"}));
  cmd.add_option("--smoothing", f.config.smoothing, "Additive smoothing (rule model, naive Bayes)");
  cmd.add_option("--trees", f.config.forest.n_trees, "Random forest size");
  cmd.add_option("--epochs", f.config.logreg.epochs, "Logistic regression epochs");
  cmd.add_option("--lr", f.config.logreg.learning_rate, "Logistic regression learning rate");
  cmd.add_option("--l2", f.config.logreg.l2, "Logistic regression L2 penalty");
}

void add_eval_flags(CLI::App& cmd, EvalFlags& f) {
  add_model_flags(cmd, f.model);
  cmd.add_option("--protocol", f.protocol, "loocv | split | lofo | holdout")->check(CLI::IsMember(kProtocols));
  cmd.add_option("--train-frac", f.train_frac, "Training fraction per family (split)")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--trials", f.trials, "Number of split trials")->check(CLI::PositiveNumber);
  cmd.add_option("--test-corpus", f.test_corpus, "Test corpus (holdout)");
  cmd.add_option("--out", f.out, "Report file");
  cmd.add_option("--table-out", f.table_out, "CSV metric table");
  cmd.add_flag("--timing", f.timing, "Include wall-clock timings in the report file");
}

EvalSpec make_spec(const ModelFlags& f, const std::string& method) {
  EvalSpec spec;
  spec.method = parse_method(method);
  spec.mode = parse_mode(f.mode);
  spec.config = f.config;
  spec.config.actr.partial_match = f.partial_match == "mismatch" ? PartialMatch::Mismatch : PartialMatch::Overlap;
  spec.config.actr.validate();
  return spec;
}

TrialReport evaluate(const EvalFlags& f, const Corpus& corpus, const std::string& method) {
  const EvalSpec spec = make_spec(f.model, method);
  if (f.protocol == "loocv") return loocv(corpus, spec, f.model.seed);
  if (f.protocol == "split") return split_trials(corpus, spec, f.train_frac, f.trials, f.model.seed);
  if (f.protocol == "lofo") return merge_reports(leave_one_family_out(corpus, spec, f.model.seed));
  return holdout(corpus, load_corpus(f.test_corpus), spec, f.model.seed);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

int cmd_eval(const EvalFlags& f, std::ostream& out) {
  const Corpus corpus = load_corpus(f.model.corpus);
  std::vector<TrialReport> reports{evaluate(f, corpus, f.methods.front())};
  if (!f.out.empty()) {
    auto file = open_output(f.out);
    write_report(file, reports.front(), f.timing);
  }
  if (!f.table_out.empty()) {
    auto file = open_output(f.table_out);
    write_metric_table(file, reports);
  }
  out << format_table(reports);
  return kOk;
}

int cmd_compare(const EvalFlags& f, std::ostream& out) {
  const Corpus corpus = load_corpus(f.model.corpus);
  std::vector<TrialReport> reports;
  for (const auto& m : f.methods) reports.push_back(evaluate(f, corpus, m));
  const Comparison comparison = compare_reports(std::move(reports));
  if (!f.out.empty()) {
    auto file = open_output(f.out);
    write_comparison(file, comparison, f.timing);
  }
  if (!f.table_out.empty()) {
    auto file = open_output(f.table_out);
    write_metric_table(file, comparison.reports);
  }
  out << format_comparison(comparison);
  return kOk;
}

int cmd_predict(const ModelFlags& f, const std::string& method, const std::string& query_path,
                const std::string& out_path, std::ostream& out) {
  const Corpus corpus = load_corpus(f.corpus);
  const EvalSpec spec = make_spec(f, method);
  const CorpusRecords queries = load_records(query_path);
  const auto model = train_classifier(spec.method, spec.mode, corpus, spec.config, f.seed);

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& sink = out_path.empty() ? out : file;
  for (const auto& q : queries.samples) {
    const Prediction p = model->predict(q.attribs);
    nlohmann::ordered_json j;
    j["id"] = q.id;
    j["predicted_family"] = p.predicted_family ? nlohmann::ordered_json(*p.predicted_family) : nullptr;
    j["predicted_tasks"] = p.predicted_tasks;
    j["probs"] = p.class_probs;
    j["retained_chunks"] = p.retained_chunks;
    j["degenerate"] = p.degenerate;
    sink << j.dump() << '\n';
  }
  return kOk;
}

int cmd_ingest(const std::vector<std::string>& reports, const std::string& config_path,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
  const ExtractionConfig config = config_path.empty() ? ExtractionConfig{} : load_extraction_config(config_path);
  CorpusRecords records;
  std::size_t failures = 0;
  for (const auto& path : reports) {
    try {
      Sample s = parse_report_file(path, config);
      const bool duplicate = std::any_of(records.samples.begin(), records.samples.end(),
                                         [&](const Sample& o) { return o.id == s.id; });
      if (duplicate) throw IngestError("duplicate sample id '" + s.id + "'");
      records.samples.push_back(std::move(s));
    } catch (const IngestError& e) {
      err << "error: " << path << ": " << e.what() << '\n';
      ++failures;
    }
  }
  save_records(records, out_path);
  out << "ingested " << records.samples.size() << " of " << reports.size() << " reports into " << out_path;
  if (failures > 0) out << " (" << failures << " failed)";
  out << '\n';
  return failures == 0 ? kOk : kFailure;
}

struct GenFlags {
  std::string regime = "distinct";
  std::optional<std::size_t> carriers, tasks_per_carrier, task_pool, samples, carrier_pool, carrier_attrs,
      payload_attrs;
  std::optional<double> overlap, encrypt_fraction;
  bool encrypt = false;
  std::uint32_t batch = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  GenSpec spec = f.regime == "single-task" ? single_task_spec() : GenSpec{};
  auto set = [](auto& field, const auto& flag) {
    if (flag) field = *flag;
  };
  set(spec.n_carriers, f.carriers);
  set(spec.tasks_per_carrier, f.tasks_per_carrier);
  set(spec.task_pool, f.task_pool);
  set(spec.samples_per_family, f.samples);
  set(spec.carrier_attr_pool, f.carrier_pool);
  set(spec.carrier_attrs_per_sample, f.carrier_attrs);
  set(spec.payload_attrs_per_task, f.payload_attrs);
  set(spec.overlap_target, f.overlap);
  set(spec.encrypt_fraction, f.encrypt_fraction);
  spec.encrypted = f.encrypt;
  spec.batch = f.batch;
  spec.seed = f.seed;

  const GeneratedCorpus g = f.regime == "single-task" ? generate_single_task(spec) : generate(spec);
  save_corpus(g.corpus, f.out);
  auto sidecar = open_output(f.out + ".genreport.json");
  write_gen_report(sidecar, g.report);
  out << "generated " << g.corpus.size() << " samples in " << g.corpus.family_names().size()
      << " families into " << f.out << "; within-family overlap " << g.report.within_family_overlap
      << ", cross-family " << g.report.cross_family_overlap << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Malware task identification with ACT-R models and baselines", "taskid"};
  app.require_subcommand(1, 1);

  // ingest
  std::vector<std::string> reports;
  std::string report_config, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Extract attribute sets from sandbox reports");
  ingest->add_option("reports", reports, "Report files")->required();
  ingest->add_option("--report-config", report_config, "Extraction config (JSON)");
  ingest->add_option("--out", ingest_out, "Corpus file to write")->required();

  // gen
  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic carrier/payload corpus");
  gen->add_option("--regime", gen_flags.regime, "distinct | single-task")
      ->check(CLI::IsMember({"distinct", "single-task"}));
  gen->add_option("--carriers", gen_flags.carriers, "Number of carriers");
  gen->add_option("--tasks-per-carrier", gen_flags.tasks_per_carrier, "Tasks per carrier family");
  gen->add_option("--task-pool", gen_flags.task_pool, "Number of distinct tasks");
  gen->add_option("--samples", gen_flags.samples, "Samples per family");
  gen->add_option("--overlap", gen_flags.overlap, "Target within-family overlap in (0, 1]");
  gen->add_option("--carrier-pool", gen_flags.carrier_pool, "Attributes per carrier pool");
  gen->add_option("--carrier-attrs", gen_flags.carrier_attrs, "Carrier attributes per sample");
  gen->add_option("--payload-attrs", gen_flags.payload_attrs, "Payload attributes per task");
  gen->add_flag("--encrypt", gen_flags.encrypt, "Obfuscate payload attributes");
  gen->add_option("--encrypt-fraction", gen_flags.encrypt_fraction, "Fraction of payload attributes replaced");
  gen->add_option("--batch", gen_flags.batch, "Fresh samples of the same carriers");
  gen->add_option("--seed", gen_flags.seed, "Seed");
  gen->add_option("--out", gen_flags.out, "Corpus file to write")->required();

  // predict
  ModelFlags predict_flags;
  std::string predict_method = "actr-ib", query_path, predict_out;
  auto* predict = app.add_subcommand("predict", "Predict families and tasks of query samples");
  add_model_flags(*predict, predict_flags);
  predict->add_option("--method", predict_method, "Classifier")->check(CLI::IsMember(kMethods));
  predict->add_option("--query", query_path, "Corpus-format file of query samples")->required();
  predict->add_option("--out", predict_out, "Prediction file (default: standard output)");

  // eval
  EvalFlags eval_flags;
  std::string eval_method = "actr-ib";
  auto* eval = app.add_subcommand("eval", "Evaluate one method under a protocol");
  add_eval_flags(*eval, eval_flags);
  eval->add_option("--method", eval_method, "Classifier")->check(CLI::IsMember(kMethods));

  // compare
  EvalFlags compare_flags;
  auto* compare = app.add_subcommand("compare", "Evaluate several methods and test their differences");
  add_eval_flags(*compare, compare_flags);
  compare->add_option("--method", compare_flags.methods, "Classifiers (comma separated or repeated)")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethods))
      ->required();

  std::vector<const char*> argv{"taskid"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (ingest->parsed() && reports.empty()) throw CLI::ValidationError("ingest", "no report files given");
    if (compare->parsed() && compare_flags.methods.size() < 2) {
      throw CLI::ValidationError("--method", "compare needs at least two methods");
    }
    eval_flags.methods = {eval_method};
    const EvalFlags* active = eval->parsed() ? &eval_flags : compare->parsed() ? &compare_flags : nullptr;
    if (active && active->protocol == "holdout" && active->test_corpus.empty()) {
      throw CLI::ValidationError("--test-corpus", "the holdout protocol needs a test corpus");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(reports, report_config, ingest_out, out, err);
    if (gen->parsed()) return cmd_gen(gen_flags, out);
    if (predict->parsed()) return cmd_predict(predict_flags, predict_method, query_path, predict_out, out);
    if (eval->parsed()) return cmd_eval(eval_flags, out);
    return cmd_compare(compare_flags, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace taskid::cli
