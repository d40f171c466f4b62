// fairaudit: group-fairness audits of binary classifiers from partially
// labeled data, plus the simulation study.
//
//   fairaudit audit --data FILE --outcome COL --score COL --group COL ...
//   fairaudit simulate --scenario 1|2 [--reps 500] [--out DIR] [--plots]
//   fairaudit generate --scenario 1|2 [--n 1000] [--unlabeled 20000] --out FILE
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 estimation error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairaudit/audit.hpp"
#include "fairaudit/basis.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/simulation.hpp"
#include "fairaudit/study_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitEstimation = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

struct AuditArgs {
  std::string data, outcome, score, group, covariates;
  std::string group_values = "0,1";
  std::string missing = "NA,null";
  double cutoff = 0.5;
  std::string methods = "supervised,infairness";
  std::string metrics = "all";
  std::string basis = "auto";
  std::string lambda = "cv";
  int folds = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

fairaudit::AuditConfig to_config(const AuditArgs& args) {
  using namespace fairaudit;
  AuditConfig cfg;
  cfg.data_path = args.data;
  cfg.outcome_column = args.outcome;
  cfg.score_column = args.score;
  cfg.group_column = args.group;
  try {
    cfg.covariates = parse_covariates(args.covariates);
  } catch (const InputError& e) {
    throw UsageError(std::string("--covariates: ") + e.what());
  }
  const auto groups = split(args.group_values);
  if (groups.size() != 2 || groups[0] == groups[1]) {
    throw UsageError("--group-values needs two distinct values, e.g. 'F,M'");
  }
  cfg.group_values = {groups[0], groups[1]};
  cfg.missing_aliases = split(args.missing);
  if (!(args.cutoff > 0.0 && args.cutoff < 1.0)) {
    throw UsageError("--cutoff must lie in (0, 1)");
  }
  cfg.cutoff = args.cutoff;

  cfg.methods.clear();
  for (const std::string& name : split(args.methods)) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "'");
    if (std::find(cfg.methods.begin(), cfg.methods.end(), *m) ==
        cfg.methods.end()) {
      cfg.methods.push_back(*m);
    }
  }
  if (cfg.methods.empty()) throw UsageError("--methods is empty");

  if (args.metrics != "all") {
    cfg.metrics.clear();
    for (const std::string& name : split(args.metrics)) {
      const auto m = parse_metric(name);
      if (!m) throw UsageError("unknown metric '" + name + "'");
      cfg.metrics.push_back(*m);
    }
    if (cfg.metrics.empty()) throw UsageError("--metrics is empty");
  }

  if (args.basis != "auto") {
    try {
      std::size_t used = 0;
      const int k = std::stoi(args.basis, &used);
      if (used != args.basis.size()) throw std::invalid_argument("");
      if (k < 1 || k > kMaxBasisOrder) throw std::out_of_range("");
      cfg.basis_order = k;
    } catch (const std::logic_error&) {
      throw UsageError("--basis must be 'auto' or an integer in 1.." +
                       std::to_string(kMaxBasisOrder));
    }
  }
  if (args.lambda != "cv") {
    try {
      std::size_t used = 0;
      const double v = std::stod(args.lambda, &used);
      if (used != args.lambda.size() || !(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("");
      }
      cfg.lambda = v;
    } catch (const std::logic_error&) {
      throw UsageError("--lambda must be 'cv' or a nonnegative number");
    }
  }
  if (args.folds < 2) throw UsageError("--folds must be at least 2");
  cfg.folds = args.folds;
  cfg.seed = args.seed;
  cfg.out_path = args.out;
  if (args.format == "json") {
    cfg.format = ReportFormat::Json;
  } else if (args.format == "table") {
    cfg.format = ReportFormat::Table;
  } else {
    throw UsageError("--format must be json or table");
  }
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fairaudit::InputError("cannot write '" + path + "'");
  out << text;
}

int run_audit_command(const AuditArgs& args) {
  using namespace fairaudit;
  const AuditConfig cfg = to_config(args);
  IngestResult ingest = ingest_csv(cfg.data_path, cfg);
  const AuditReport report =
      run_audit(ingest.dataset, cfg, std::move(ingest.warnings));
  emit(cfg.out_path, cfg.format == ReportFormat::Json ? report_to_json(report)
                                                      : report_to_table(report));
  for (const std::string& w : report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (!report.ok()) {
    for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
    for (const MetricReport& m : report.metrics) {
      for (const MethodResult& r : m.methods) {
        if (!r.estimate) {
          std::cerr << "error: " << to_string(m.metric) << " "
                    << to_string(r.method) << ": " << r.error << "\n";
        }
      }
    }
    return kExitEstimation;
  }
  return kExitOk;
}

struct SimArgs {
  int scenario = 1;
  int reps = 500;
  std::size_t n = 1000;
  std::size_t unlabeled = 20000;
  std::size_t train = 3000;
  std::uint64_t seed = 1;
  std::size_t oracle = 1'000'000;
  int threads = 1;
  bool retrain = false;
  std::string out = "simulation";
  bool plots = false;
};

fairaudit::sim::ScenarioConfig to_scenario(const SimArgs& args) {
  auto cfg = fairaudit::sim::ScenarioConfig::defaults(args.scenario);
  cfg.replications = args.reps;
  cfg.n = args.n;
  cfg.N = args.unlabeled;
  cfg.n_train = args.train;
  cfg.seed = args.seed;
  cfg.oracle_size = args.oracle;
  cfg.threads = args.threads;
  cfg.freeze_score_model = !args.retrain;
  try {
    cfg.validate();
  } catch (const fairaudit::InputError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int run_simulate_command(const SimArgs& args) {
  using namespace fairaudit::sim;
  const ScenarioConfig cfg = to_scenario(args);
  const std::vector<StudyMethod> methods(kAllStudyMethods.begin(),
                                         kAllStudyMethods.end());
  const SimulationSummary summary = run_study(cfg, methods);
  write_study_outputs(args.out, summary, args.plots);
  std::cerr << "scenario " << summary.scenario << ": "
            << summary.replications << " replications, "
            << summary.failed_replications << " failed; outputs in "
            << args.out << "\n";
  return kExitOk;
}

int run_generate_command(const SimArgs& args) {
  using namespace fairaudit::sim;
  const ScenarioConfig cfg = to_scenario(args);
  fairaudit::Rng train_rng = fairaudit::Rng::derive(cfg.seed, 1, 0);
  const ScoreModel model =
      train_score_model(gen_population(cfg, cfg.n_train, train_rng));
  fairaudit::Rng rng = fairaudit::Rng::derive(cfg.seed, 2, 0);
  const fairaudit::AuditDataset data =
      make_audit_dataset(cfg, model, cfg.n, cfg.N, rng);
  std::ostringstream out;
  fairaudit::write_dataset_csv(out, data);
  emit(args.out == "simulation" ? std::string() : args.out, out.str());
  return kExitOk;
}

void add_sim_options(CLI::App* cmd, SimArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Outcome scenario")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--n", args.n, "Labeled records per replication")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--unlabeled", args.unlabeled, "Unlabeled records")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--train", args.train, "Score-model training records")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "Master seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-fairness audits of binary classifiers"};
  app.require_subcommand(1);

  AuditArgs audit_args;
  CLI::App* audit = app.add_subcommand("audit", "Estimate fairness metrics");
  audit->add_option("--data", audit_args.data, "Input CSV")->required();
  audit->add_option("--outcome", audit_args.outcome, "Outcome column")->required();
  audit->add_option("--score", audit_args.score, "Score column")->required();
  audit->add_option("--group", audit_args.group, "Group column")->required();
  audit->add_option("--covariates", audit_args.covariates,
                    "Auxiliary covariates: COL[:continuous|categorical],...");
  audit->add_option("--group-values", audit_args.group_values,
                    "Raw group values mapped to 0 and 1")
      ->capture_default_str();
  audit->add_option("--missing", audit_args.missing,
                    "Outcome markers meaning unlabeled (besides empty)")
      ->capture_default_str();
  audit->add_option("--cutoff", audit_args.cutoff, "Classification cutoff")
      ->capture_default_str();
  audit->add_option("--methods", audit_args.methods,
                    "supervised,infairness,ji")
      ->capture_default_str();
  audit->add_option("--metrics", audit_args.metrics,
                    "TPR,FPR,PPV,NPV,F1,ACC,BS or all")
      ->capture_default_str();
  audit->add_option("--basis", audit_args.basis, "auto or order K")
      ->capture_default_str();
  audit->add_option("--lambda", audit_args.lambda, "cv or a fixed penalty")
      ->capture_default_str();
  audit->add_option("--folds", audit_args.folds, "Cross-validation folds")
      ->capture_default_str();
  audit->add_option("--seed", audit_args.seed, "Fold-assignment seed")
      ->capture_default_str();
  audit->add_option("--out", audit_args.out, "Report path (default stdout)");
  audit->add_option("--format", audit_args.format, "json or table")
      ->capture_default_str();

  SimArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the simulation study");
  add_sim_options(simulate, sim_args);
  simulate->add_option("--reps", sim_args.reps, "Replications")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--oracle", sim_args.oracle, "Oracle Monte Carlo size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", sim_args.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--retrain", sim_args.retrain,
                     "Retrain the score model in every replication");
  simulate->add_option("--out", sim_args.out, "Output directory")
      ->capture_default_str();
  simulate->add_flag("--plots", sim_args.plots, "Write SVG charts");

  SimArgs gen_args;
  CLI::App* generate =
      app.add_subcommand("generate", "Write one simulated audit dataset as CSV");
  add_sim_options(generate, gen_args);
  generate->add_option("--out", gen_args.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*audit) return run_audit_command(audit_args);
    if (*simulate) return run_simulate_command(sim_args);
    return run_generate_command(gen_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fairaudit::InputError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fairaudit::Error& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEstimation;
  }
}
