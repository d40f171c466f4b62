#include <cmath>
#include <iomanip>
#include <sstream>

#include "doctest.h"
#include "fairaudit/audit.hpp"
#include "fairaudit/beta_calibration.hpp"
#include "fairaudit/csv.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/semisupervised.hpp"
#include "fairaudit/simulation.hpp"
#include "fairaudit/study_io.hpp"
#include "fairaudit/supervised.hpp"
#include "json.hpp"

using namespace fairaudit;

namespace {

AuditConfig basic_config() {
  AuditConfig cfg;
  cfg.outcome_column = "y";
  cfg.score_column = "s";
  cfg.group_column = "a";
  return cfg;
}

std::string error_of(const std::string& text, const AuditConfig& cfg) {
  try {
    ingest_csv_text(text, cfg);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

AuditDataset simulated(std::size_t n, std::size_t N, std::uint64_t seed) {
  const auto cfg = sim::ScenarioConfig::defaults(1);
  Rng train(seed);
  const auto model =
      sim::train_score_model(sim::gen_population(cfg, cfg.n_train, train));
  Rng rng(seed + 1);
  return sim::make_audit_dataset(cfg, model, n, N, rng);
}

}  // namespace

TEST_CASE("CSV parsing") {
  const csv::Table t = csv::parse(
      "\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"he said \"\"hi\"\"\"\r\n\r\n2,,\"multi\nline\"\n3,z,w");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].fields[1] == "x, y");
  CHECK(t.rows[0].fields[2] == "he said \"hi\"");
  CHECK(t.rows[0].line == 2);
  CHECK(t.rows[1].fields[1].empty());
  CHECK(t.rows[1].fields[2] == "multi\nline");
  CHECK(t.rows[1].line == 4);
  CHECK(t.rows[2].line == 6);
  CHECK_THROWS_AS(t.column("missing"), InputError);

  CHECK_THROWS_WITH_AS(csv::parse("a,b\n1,2\n3\n"), "line 3: expected 2 fields, found 1",
                       InputError);
  CHECK_THROWS_AS(csv::parse("a\n\"open"), InputError);
  CHECK_THROWS_AS(csv::parse(""), InputError);
}

TEST_CASE("CSV writing round-trips fields and doubles") {
  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "quote\"d", ""});
  const csv::Table t = csv::parse("h1,h2,h3,h4\n" + out.str());
  CHECK(t.rows[0].fields ==
        std::vector<std::string>{"plain", "with,comma", "quote\"d", ""});
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
  CHECK(csv::format_double(std::nan("")) == "NaN");
}

TEST_CASE("ingestion") {
  const AuditConfig cfg = basic_config();
  const IngestResult r =
      ingest_csv_text("y,s,a\n1,0.8,0\n,0.3,0\n0,0.6,1\n,0.2,1\n", cfg);
  CHECK(r.dataset.labeled_count() == 2);
  CHECK(r.dataset.unlabeled_count() == 2);
  CHECK(r.warnings.empty());

  const std::string bad =
      "y,s,a\n1,0.8,0\n,0.3,0\n0,0.6,1\n,0.2,1\n1,0.5,0\n0,1.2,1\n";
  const std::string msg = error_of(bad, cfg);
  CHECK(msg.find("line 7") != std::string::npos);
  CHECK(msg.find("1.2") != std::string::npos);

  const IngestResult full = ingest_csv_text("y,s,a\n1,0.8,0\n0,0.6,1\n", cfg);
  REQUIRE(full.warnings.size() == 1);
  CHECK(full.warnings[0].rfind(
            "no unlabeled rows; Infairness reduces toward supervised", 0) == 0);

  AuditConfig mapped = cfg;
  mapped.group_values = {"F", "M"};
  const IngestResult g = ingest_csv_text(
      "y,s,a\n1,0.8,F\nNA,0.3,F\n0,0.6,M\nnull,0.2,M\n", mapped);
  CHECK(g.dataset.labeled_count(0) == 1);
  CHECK(g.dataset.unlabeled_count(1) == 1);
  CHECK(error_of("y,s,a\n1,0.8,F\n0,0.6,X\n", mapped).find("line 3") !=
        std::string::npos);

  CHECK(error_of("y,score,a\n1,0.8,0\n", cfg).find("'s'") != std::string::npos);
  CHECK(error_of("y,s,a\n2,0.8,0\n", cfg).find("line 2") != std::string::npos);
  CHECK(error_of("y,s,a\n1,abc,0\n", cfg).find("line 2") != std::string::npos);
  CHECK(error_of("y,s,a\n,0.8,0\n,0.6,1\n", cfg).find("no labeled") !=
        std::string::npos);
  CHECK(error_of("y,s,a\n1,0.8,0\n,0.3,0\n0,0.6,1\n", cfg)
            .find("no unlabeled") != std::string::npos);
}

TEST_CASE("covariate lists") {
  const auto c = parse_covariates("age:continuous,site:categorical,bmi");
  REQUIRE(c.size() == 3);
  CHECK(c[0].column == "age");
  CHECK(c[1].kind == CovariateKind::Categorical);
  CHECK(c[2].kind == CovariateKind::Continuous);
  CHECK(parse_covariates("").empty());
  CHECK_THROWS_AS(parse_covariates("age:ordinal"), InputError);
  CHECK_THROWS_AS(parse_covariates("a,,b"), InputError);
}

TEST_CASE("exported datasets re-ingest to identical estimates") {
  const AuditDataset data = simulated(500, 3000, 77);
  std::ostringstream out;
  write_dataset_csv(out, data);
  AuditConfig cfg = basic_config();
  cfg.covariates = parse_covariates("w1,w2,w3,w4,w5");
  const AuditDataset back = ingest_csv_text(out.str(), cfg).dataset;
  REQUIRE(back.records().size() == data.records().size());

  ImputationConfig ic;
  ic.continuous = {0, 1, 2, 3, 4};
  ic.seed = 1;
  const InfairnessFit f1 = fit_infairness(data, ic);
  const InfairnessFit f2 = fit_infairness(back, ic);
  for (Metric m : kAllMetrics) {
    const auto s1 = estimate_supervised(data, m), s2 = estimate_supervised(back, m);
    CHECK(std::abs(s1.delta.point - s2.delta.point) <= 1e-12);
    CHECK(std::abs(s1.delta.se - s2.delta.se) <= 1e-12);
    const auto i1 = estimate_infairness(f1, m), i2 = estimate_infairness(f2, m);
    CHECK(std::abs(i1.delta.point - i2.delta.point) <= 1e-12);
    CHECK(std::abs(i1.delta.se - i2.delta.se) <= 1e-12);
    const auto j1 = estimate_ji(data, m), j2 = estimate_ji(back, m);
    CHECK(std::abs(j1.delta.point - j2.delta.point) <= 1e-12);
  }
}

TEST_CASE("audit report") {
  const AuditDataset data = simulated(600, 4000, 5);
  AuditConfig cfg = basic_config();
  cfg.covariates = parse_covariates("w1,w2,w3,w4,w5");
  cfg.seed = 9;
  const AuditReport report = run_audit(data, cfg);
  CHECK(report.ok());
  REQUIRE(report.metrics.size() == 7);
  int estimates = 0;
  for (const MetricReport& m : report.metrics) {
    REQUIRE(m.methods.size() == 2);
    for (const MethodResult& r : m.methods) estimates += r.estimate ? 3 : 0;
    const auto& sup = *m.methods[0].estimate;
    const auto& ss = *m.methods[1].estimate;
    REQUIRE(m.methods[1].re.has_value());
    CHECK(*m.methods[1].re ==
          doctest::Approx(std::pow(sup.delta.se / ss.delta.se, 2)));
  }
  CHECK(estimates == 7 * 3 * 2);

  const std::string json = report_to_json(report);
  CHECK(json == report_to_json(run_audit(data, cfg)));
  const auto parsed = nlohmann::json::parse(json);
  CHECK(parsed["schema_version"] == "1.0");
  CHECK(parsed["metrics"].size() == 7);
  CHECK(parsed["models"]["infairness"].size() == 2);

  // Every number of the table appears, at printed precision, in the JSON.
  const std::string table = report_to_table(report);
  for (const auto& m : parsed["metrics"]) {
    for (const auto& r : m["results"]) {
      for (const char* key : {"point", "se", "ci_low", "ci_high", "p_value"}) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(6) << r["delta"][key].get<double>();
        CHECK(table.find(os.str()) != std::string::npos);
      }
    }
  }
}

TEST_CASE("audit continues past per-metric failures") {
  // Group 1 never flagged: PPV undefined there, the rest still reported.
  std::vector<AuditRecord> records;
  Rng rng(3);
  for (int i = 0; i < 400; ++i) {
    const int a = i % 2;
    const double s = a == 0 ? rng.uniform() : 0.4 * rng.uniform();
    AuditRecord r{std::nullopt, s, a, {}};
    if (i < 200) r.y = rng.bernoulli(s);
    records.push_back(r);
  }
  const AuditDataset data(records, 0.5);
  AuditConfig cfg = basic_config();
  cfg.methods = {Method::Supervised, Method::Infairness, Method::Ji};
  const AuditReport report = run_audit(data, cfg);
  CHECK_FALSE(report.ok());
  int failures = 0, successes = 0;
  for (const MetricReport& m : report.metrics) {
    for (const MethodResult& r : m.methods) {
      (r.estimate ? successes : failures) += 1;
      if (!r.estimate) CHECK_FALSE(r.error.empty());
    }
  }
  CHECK(failures > 0);
  CHECK(successes > 0);
  const auto parsed = nlohmann::json::parse(report_to_json(report));
  CHECK(parsed["metrics"][2]["results"][0].contains("error"));
}

TEST_CASE("fully labeled input falls back to the labeled pool") {
  const AuditConfig cfg = basic_config();
  std::ostringstream text;
  text << "y,s,a\n";
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform();
    text << rng.bernoulli(s) << "," << s << "," << i % 2 << "\n";
  }
  IngestResult in = ingest_csv_text(text.str(), cfg);
  const AuditReport report = run_audit(in.dataset, cfg, in.warnings);
  CHECK(report.ok());
  CHECK(report.unlabeled[0] == 0);
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("study outputs") {
  auto cfg = sim::ScenarioConfig::defaults(2);
  cfg.replications = 3;
  cfg.oracle_size = 50'000;
  cfg.n = 300;
  cfg.N = 3000;
  const auto summary = sim::run_study(
      cfg, {sim::StudyMethod::Supervised, sim::StudyMethod::Ji});
  std::ostringstream rows;
  sim::write_replications_csv(rows, summary);
  const csv::Table t = csv::parse(rows.str());
  CHECK(t.header == std::vector<std::string>{"rep", "scenario", "method", "metric",
                                             "estimate", "se", "covered"});
  CHECK(t.rows.size() == 3 * 2 * 7);
  const auto j = nlohmann::json::parse(sim::summary_to_json(summary));
  CHECK(j["cells"].size() == 2 * 7);
  CHECK(j["truth"]["TPR"]["delta"].is_number());
  CHECK(sim::re_chart_svg(summary).rfind("<svg", 0) == 0);
  CHECK(sim::bias_chart_svg(summary).find("</svg>") != std::string::npos);
}
