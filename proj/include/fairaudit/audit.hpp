#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

struct CovariateBinding {
  std::string column;
  CovariateKind kind = CovariateKind::Continuous;
};

enum class ReportFormat { Json, Table };

struct AuditConfig {
  std::string data_path;
  std::string outcome_column;
  std::string score_column;
  std::string group_column;
  std::vector<CovariateBinding> covariates;
  // raw group values mapped to 0 and 1
  std::array<std::string, 2> group_values = {"0", "1"};
  // outcome markers besides the empty field that designate unlabeled rows
  std::vector<std::string> missing_aliases = {"NA", "null"};
  double cutoff = 0.5;
  std::vector<Method> methods = {Method::Supervised, Method::Infairness};
  std::vector<Metric> metrics = {kAllMetrics.begin(), kAllMetrics.end()};
  std::optional<int> basis_order;  // nullopt: GBIC
  std::optional<double> lambda;    // nullopt: cross-validation
  int folds = 10;
  std::uint64_t seed = 0;
  std::string out_path;  // empty: stdout
  ReportFormat format = ReportFormat::Json;
};

// Parses "name[:kind]" lists such as "age:continuous,site:categorical".
std::vector<CovariateBinding> parse_covariates(std::string_view spec);

struct IngestResult {
  AuditDataset dataset;
  std::vector<std::string> warnings;
};

// Empty (or aliased) outcomes mark unlabeled rows. Errors cite the physical
// line of the offending record. Every group needs labeled records; when any
// unlabeled rows exist every group needs some too. A fully labeled file is
// accepted with a warning.
IngestResult ingest_csv(const std::string& path, const AuditConfig& config);
IngestResult ingest_csv_text(std::string_view text, const AuditConfig& config);

// Writes y, s, a and w1..wq with round-trip precision; unlabeled rows get an
// empty outcome.
void write_dataset_csv(std::ostream& out, const AuditDataset& data);

struct ModelDiagnostics {
  int group = 0;
  int order = 0;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::vector<std::string> warnings;
};

struct CalibrationDiagnostics {
  int group = 0;
  std::array<double, 3> zeta{};
  bool ridge_fallback = false;
};

struct MethodResult {
  Method method = Method::Supervised;
  std::optional<GroupedEstimate> estimate;
  std::string error;           // set when estimate is empty
  std::optional<double> re;    // infairness only: (se_sup / se_ss)^2
};

struct MetricReport {
  Metric metric = Metric::TPR;
  std::vector<MethodResult> methods;
};

struct AuditReport {
  double cutoff = 0.5;
  std::array<std::size_t, 2> labeled{};
  std::array<std::size_t, 2> unlabeled{};
  std::vector<Method> methods;
  std::vector<std::string> warnings;
  std::vector<ModelDiagnostics> models;
  std::vector<CalibrationDiagnostics> calibrations;
  std::vector<std::string> errors;  // model-level failures
  std::vector<MetricReport> metrics;

  bool ok() const;
};

// Runs every requested method for every requested metric. Failures are
// recorded per metric (or per method when model fitting fails) and the run
// continues.
AuditReport run_audit(const AuditDataset& data, const AuditConfig& config,
                      std::vector<std::string> warnings = {});

inline constexpr std::string_view kReportSchemaVersion = "1.0";

// Canonical rendering.
std::string report_to_json(const AuditReport& report);
// Aligned text table projected from the JSON rendering.
std::string report_to_table(const AuditReport& report);

}  // namespace fairaudit
