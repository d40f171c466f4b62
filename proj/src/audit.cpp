#include "fairaudit/audit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fairaudit/beta_calibration.hpp"
#include "fairaudit/csv.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/semisupervised.hpp"
#include "fairaudit/supervised.hpp"
#include "json.hpp"

namespace fairaudit {

using nlohmann::ordered_json;

std::vector<CovariateBinding> parse_covariates(std::string_view spec) {
  std::vector<CovariateBinding> out;
  while (!spec.empty()) {
    const std::size_t comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{}
                                           : spec.substr(comma + 1);
    if (item.empty()) throw InputError("empty covariate in list");
    CovariateBinding b;
    const std::size_t colon = item.rfind(':');
    if (colon == std::string_view::npos) {
      b.column = std::string(item);
    } else {
      b.column = std::string(item.substr(0, colon));
      const std::string_view kind = item.substr(colon + 1);
      if (kind == "continuous" || kind == "cont") {
        b.kind = CovariateKind::Continuous;
      } else if (kind == "categorical" || kind == "cat") {
        b.kind = CovariateKind::Categorical;
      } else {
        throw InputError("covariate kind must be continuous or categorical, "
                         "got '" + std::string(kind) + "'");
      }
    }
    if (b.column.empty()) throw InputError("empty covariate name");
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

std::string at_line(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

double parse_number(const std::string& text, std::size_t line,
                    const std::string& column) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && end[-1] == ' ') --end;
  const auto res = std::from_chars(begin, end, v);
  if (begin == end || res.ec != std::errc{} || res.ptr != end ||
      !std::isfinite(v)) {
    throw InputError(at_line(line) + "column '" + column +
                     "' is not a finite number: '" + text + "'");
  }
  return v;
}

}  // namespace

IngestResult ingest_csv_text(std::string_view text, const AuditConfig& config) {
  const csv::Table table = csv::parse(text);
  const std::size_t y_col = table.column(config.outcome_column);
  const std::size_t s_col = table.column(config.score_column);
  const std::size_t a_col = table.column(config.group_column);
  std::vector<std::size_t> w_cols;
  std::vector<CovariateKind> kinds;
  for (const CovariateBinding& b : config.covariates) {
    w_cols.push_back(table.column(b.column));
    kinds.push_back(b.kind);
  }

  std::vector<AuditRecord> records;
  records.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    AuditRecord r;
    const std::string& y = row.fields[y_col];
    const bool missing =
        y.empty() || std::find(config.missing_aliases.begin(),
                               config.missing_aliases.end(),
                               y) != config.missing_aliases.end();
    if (!missing) {
      const double v = parse_number(y, row.line, config.outcome_column);
      if (v != 0.0 && v != 1.0) {
        throw InputError(at_line(row.line) + "outcome must be 0 or 1, got '" +
                         y + "'");
      }
      r.y = static_cast<int>(v);
    }
    r.s = parse_number(row.fields[s_col], row.line, config.score_column);
    if (!(r.s >= 0.0 && r.s <= 1.0)) {
      throw InputError(at_line(row.line) + "score " + row.fields[s_col] +
                       " outside [0,1]");
    }
    const std::string& g = row.fields[a_col];
    if (g == config.group_values[0]) {
      r.a = 0;
    } else if (g == config.group_values[1]) {
      r.a = 1;
    } else {
      throw InputError(at_line(row.line) + "group value '" + g +
                       "' is not one of '" + config.group_values[0] + "', '" +
                       config.group_values[1] + "'");
    }
    for (std::size_t k = 0; k < w_cols.size(); ++k) {
      r.w.push_back(parse_number(row.fields[w_cols[k]], row.line,
                                 config.covariates[k].column));
    }
    records.push_back(std::move(r));
  }

  IngestResult out{AuditDataset(std::move(records), config.cutoff, kinds), {}};
  const AuditDataset& data = out.dataset;
  for (int a = 0; a < 2; ++a) {
    if (data.labeled_count(a) == 0) {
      throw InputError("group " + std::to_string(a) + " has no labeled rows");
    }
  }
  if (data.unlabeled_count() == 0) {
    out.warnings.push_back(
        "no unlabeled rows; Infairness reduces toward supervised (labeled "
        "covariates stand in for the unlabeled pool)");
  } else {
    for (int a = 0; a < 2; ++a) {
      if (data.unlabeled_count(a) == 0) {
        throw InputError("group " + std::to_string(a) + " has no unlabeled rows");
      }
    }
  }
  return out;
}

IngestResult ingest_csv(const std::string& path, const AuditConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ingest_csv_text(buffer.str(), config);
}

void write_dataset_csv(std::ostream& out, const AuditDataset& data) {
  std::vector<std::string> header = {"y", "s", "a"};
  for (std::size_t k = 0; k < data.covariate_count(); ++k) {
    header.push_back("w" + std::to_string(k + 1));
  }
  csv::write_row(out, header);
  for (const AuditRecord& r : data.records()) {
    std::vector<std::string> fields;
    fields.push_back(r.y ? std::to_string(*r.y) : std::string());
    fields.push_back(csv::format_double(r.s));
    fields.push_back(std::to_string(r.a));
    for (double v : r.w) fields.push_back(csv::format_double(v));
    csv::write_row(out, fields);
  }
}

bool AuditReport::ok() const {
  if (!errors.empty()) return false;
  for (const MetricReport& m : metrics) {
    for (const MethodResult& r : m.methods) {
      if (!r.estimate) return false;
    }
  }
  return true;
}

namespace {

// Labeled records reused as the unlabeled pool for fully labeled inputs.
AuditDataset with_labeled_pool(const AuditDataset& data) {
  std::vector<AuditRecord> records = data.records();
  for (const AuditRecord& r : data.records()) {
    AuditRecord copy = r;
    copy.y.reset();
    records.push_back(std::move(copy));
  }
  return AuditDataset(std::move(records), data.cutoff(), data.covariate_kinds());
}

ImputationConfig imputation_config(const AuditDataset& data,
                                   const AuditConfig& config) {
  ImputationConfig ic;
  for (std::size_t k = 0; k < data.covariate_count(); ++k) {
    if (data.covariate_kinds()[k] == CovariateKind::Continuous) {
      ic.continuous.push_back(k);
    } else {
      ic.categorical.push_back(k);
    }
  }
  ic.order = config.basis_order;
  ic.lambda = config.lambda;
  ic.folds = config.folds;
  ic.seed = config.seed;
  return ic;
}

template <typename F>
MethodResult attempt(Method method, F&& estimate) {
  MethodResult r;
  r.method = method;
  try {
    r.estimate = estimate();
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

AuditReport run_audit(const AuditDataset& input, const AuditConfig& config,
                      std::vector<std::string> warnings) {
  AuditReport report;
  report.cutoff = input.cutoff();
  report.methods = config.methods;
  report.warnings = std::move(warnings);
  for (int a = 0; a < 2; ++a) {
    report.labeled[a] = input.labeled_count(a);
    report.unlabeled[a] = input.unlabeled_count(a);
  }
  const bool pooled = input.unlabeled_count() == 0;
  const AuditDataset pooled_data = pooled ? with_labeled_pool(input) : input;
  const AuditDataset& data = pooled ? pooled_data : input;

  auto wants = [&](Method m) {
    return std::find(config.methods.begin(), config.methods.end(), m) !=
           config.methods.end();
  };

  std::optional<InfairnessFit> ss_fit;
  std::string ss_error;
  if (wants(Method::Infairness)) {
    try {
      ss_fit = fit_infairness(data, imputation_config(data, config));
      for (int a = 0; a < 2; ++a) {
        const ImputationModel& m = ss_fit->models[a];
        report.models.push_back({a, m.basis.order, m.lambda, m.iterations,
                                 m.residual, data.labeled_count(a),
                                 data.unlabeled_count(a), m.warnings});
      }
    } catch (const Error& e) {
      ss_error = std::string("infairness model fit failed: ") + e.what();
      report.errors.push_back(ss_error);
    }
  }
  std::optional<std::array<BetaCalibration, 2>> calibration;
  std::string ji_error;
  if (wants(Method::Ji)) {
    try {
      calibration = std::array<BetaCalibration, 2>{beta_calibrate(data, 0),
                                                   beta_calibrate(data, 1)};
      for (const BetaCalibration& c : *calibration) {
        report.calibrations.push_back(
            {c.group, {c.zeta[0], c.zeta[1], c.zeta[2]}, c.ridge_fallback});
        report.warnings.insert(report.warnings.end(), c.warnings.begin(),
                               c.warnings.end());
      }
    } catch (const Error& e) {
      ji_error = std::string("Beta calibration failed: ") + e.what();
      report.errors.push_back(ji_error);
    }
  }

  for (Metric metric : config.metrics) {
    MetricReport mr;
    mr.metric = metric;
    std::optional<GroupedEstimate> sup;
    try {
      sup = estimate_supervised(data, metric);
    } catch (const Error&) {
    }
    for (Method method : config.methods) {
      MethodResult r;
      switch (method) {
        case Method::Supervised:
          r = attempt(method, [&] { return estimate_supervised(data, metric); });
          break;
        case Method::Infairness:
          if (!ss_fit) {
            r.method = method;
            r.error = ss_error;
            break;
          }
          r = attempt(method,
                      [&] { return estimate_infairness(*ss_fit, metric); });
          if (r.estimate && sup) {
            r.re = efficiency_comparison(*sup, *r.estimate).re;
          }
          break;
        case Method::Ji:
          if (!calibration) {
            r.method = method;
            r.error = ji_error;
            break;
          }
          r = attempt(method,
                      [&] { return estimate_ji(data, metric, *calibration); });
          break;
      }
      mr.methods.push_back(std::move(r));
    }
    report.metrics.push_back(std::move(mr));
  }
  return report;
}

namespace {

ordered_json number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json estimate_json(const MetricEstimate& e, bool with_p) {
  ordered_json j;
  j["point"] = number(e.point);
  j["se"] = number(e.se);
  j["ci_low"] = number(e.ci_low);
  j["ci_high"] = number(e.ci_high);
  if (with_p) j["p_value"] = number(e.p_value());
  return j;
}

ordered_json to_json(const AuditReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["cutoff"] = report.cutoff;
  j["counts"] = {{"labeled", report.labeled}, {"unlabeled", report.unlabeled}};
  ordered_json methods = ordered_json::array();
  for (Method m : report.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["warnings"] = report.warnings;
  j["errors"] = report.errors;

  ordered_json models = ordered_json::object();
  if (!report.models.empty()) {
    ordered_json list = ordered_json::array();
    for (const ModelDiagnostics& m : report.models) {
      list.push_back({{"group", m.group},
                      {"order", m.order},
                      {"lambda", number(m.lambda)},
                      {"iterations", m.iterations},
                      {"score_residual", number(m.residual)},
                      {"n", m.labeled},
                      {"N", m.unlabeled},
                      {"warnings", m.warnings}});
    }
    models["infairness"] = list;
  }
  if (!report.calibrations.empty()) {
    ordered_json list = ordered_json::array();
    for (const CalibrationDiagnostics& c : report.calibrations) {
      list.push_back({{"group", c.group},
                      {"zeta", {number(c.zeta[0]), number(c.zeta[1]),
                                number(c.zeta[2])}},
                      {"ridge_fallback", c.ridge_fallback}});
    }
    models["ji"] = list;
  }
  j["models"] = models;

  ordered_json metrics = ordered_json::array();
  for (const MetricReport& mr : report.metrics) {
    ordered_json entry;
    entry["metric"] = to_string(mr.metric);
    entry["criterion"] = criterion_name(mr.metric);
    ordered_json results = ordered_json::array();
    for (const MethodResult& r : mr.methods) {
      ordered_json rj;
      rj["method"] = to_string(r.method);
      if (r.estimate) {
        rj["group0"] = estimate_json(r.estimate->group0, false);
        rj["group1"] = estimate_json(r.estimate->group1, false);
        rj["delta"] = estimate_json(r.estimate->delta, true);
        if (r.method == Method::Infairness) {
          rj["re"] = r.re ? number(*r.re) : ordered_json(nullptr);
        }
      } else {
        rj["error"] = r.error;
      }
      results.push_back(rj);
    }
    entry["results"] = results;
    metrics.push_back(entry);
  }
  j["metrics"] = metrics;
  return j;
}

std::string cell(const ordered_json& v) {
  if (v.is_null()) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v.get<double>();
  return os.str();
}

}  // namespace

std::string report_to_json(const AuditReport& report) {
  return to_json(report).dump(2) + "\n";
}

std::string report_to_table(const AuditReport& report) {
  const ordered_json j = to_json(report);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"metric", "method", "group0", "group1", "delta", "se",
                  "ci_low", "ci_high", "p_value", "re"});
  std::vector<std::string> notes;
  for (const auto& m : j["metrics"]) {
    for (const auto& r : m["results"]) {
      std::vector<std::string> row = {m["metric"].get<std::string>(),
                                      r["method"].get<std::string>()};
      if (r.contains("error")) {
        notes.push_back(row[0] + " " + row[1] + ": " +
                        r["error"].get<std::string>());
        row.insert(row.end(), {"error", "", "", "", "", "", "", ""});
      } else {
        const auto& d = r["delta"];
        row.push_back(cell(r["group0"]["point"]));
        row.push_back(cell(r["group1"]["point"]));
        row.push_back(cell(d["point"]));
        row.push_back(cell(d["se"]));
        row.push_back(cell(d["ci_low"]));
        row.push_back(cell(d["ci_high"]));
        row.push_back(cell(d["p_value"]));
        row.push_back(r.contains("re") ? cell(r["re"]) : "-");
      }
      rows.push_back(std::move(row));
    }
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream os;
  const auto& counts = j["counts"];
  os << "cutoff " << j["cutoff"].get<double>() << "; labeled n0="
     << counts["labeled"][0] << " n1=" << counts["labeled"][1]
     << "; unlabeled N0=" << counts["unlabeled"][0]
     << " N1=" << counts["unlabeled"][1] << "\n";
  for (const auto& m : j["models"].value("infairness", ordered_json::array())) {
    os << "infairness model group " << m["group"] << ": order " << m["order"]
       << ", lambda " << cell(m["lambda"]) << ", iterations "
       << m["iterations"] << "\n";
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      if (c < 2) {
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    os << "\n";
  }
  for (const auto& w : j["warnings"]) {
    os << "warning: " << w.get<std::string>() << "\n";
  }
  for (const auto& e : j["errors"]) {
    os << "error: " << e.get<std::string>() << "\n";
  }
  for (const std::string& n : notes) os << "error: " << n << "\n";
  return os.str();
}

}  // namespace fairaudit
