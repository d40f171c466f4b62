#include "fairaudit/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "fairaudit/beta_calibration.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/semisupervised.hpp"
#include "fairaudit/solver.hpp"
#include "fairaudit/supervised.hpp"

namespace fairaudit::sim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t metric_index(Metric metric) {
  return static_cast<std::size_t>(metric);
}

// Random stream tags.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kOracleStream = 2;
constexpr std::uint64_t kReplicationStream = 1000;

}  // namespace

ScenarioConfig ScenarioConfig::defaults(int scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  if (scenario == 1) {
    cfg.beta0 = {1, 1, 0.5, 0.5, 0, 0, 0, 0, 0, 0};
    cfg.beta1 = {0.9, 0.9, 0.4, 0.4, 0, 0, 0, 0, 0, 0};
    cfg.gamma0 = {0.4, 0.4, 0.4, 0, 0};
    cfg.gamma1 = {0.3, 0.3, 0.3, 0, 0};
  } else if (scenario == 2) {
    cfg.beta0 = {0.4, -0.3, 0.15, -0.15, 0, 0, 0, 0, 0, 0};
    cfg.beta1 = {0.35, -0.25, 0.2, -0.2, 0, 0, 0, 0, 0, 0};
    cfg.gamma0 = {0.25, -0.2, 0.2, 0, 0};
    cfg.gamma1 = {0.15, -0.15, 0.2, 0, 0};
  } else {
    throw InputError("scenario must be 1 or 2");
  }
  return cfg;
}

void ScenarioConfig::validate() const {
  if (scenario != 1 && scenario != 2) throw InputError("scenario must be 1 or 2");
  if (n < 2 || N < 1 || n_train < 2) {
    throw InputError("sample sizes too small");
  }
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InputError("cutoff must lie in (0,1)");
  if (replications < 1) throw InputError("replications must be positive");
  if (oracle_size < 2) throw InputError("oracle sample too small");
  if (folds < 2) throw InputError("need at least 2 folds");
}

Eigen::MatrixXd ar1_covariance() {
  Eigen::MatrixXd cov(kLatent, kLatent);
  for (int k = 0; k < kLatent; ++k) {
    for (int l = 0; l < kLatent; ++l) {
      cov(k, l) = 3.0 * std::pow(0.4, std::abs(k - l));
    }
  }
  return cov;
}

double outcome_probability(const ScenarioConfig& cfg,
                           std::span<const double> x,
                           std::span<const double> w, int a) {
  const auto& beta = a == 0 ? cfg.beta0 : cfg.beta1;
  const auto& gamma = a == 0 ? cfg.gamma0 : cfg.gamma1;
  double lin = 0.0;
  for (int k = 0; k < kFeatures; ++k) lin += beta[k] * x[k];
  for (int k = 0; k < kAuxiliary; ++k) lin += gamma[k] * w[k];
  if (cfg.scenario == 1) {
    return expit(-2.3 + lin + 0.2 * x[1] * x[1] - 0.1 * x[2] * x[2] +
                 0.1 * x[4] * x[5]);
  }
  const double h = 1.3 + lin;
  return std::exp(-h * h);
}

Population gen_population(const ScenarioConfig& cfg, std::size_t count,
                          Rng& rng) {
  static const Eigen::MatrixXd chol = ar1_covariance().llt().matrixL();
  Population pop;
  const auto rows = static_cast<Eigen::Index>(count);
  pop.x.resize(rows, kFeatures);
  pop.w.resize(rows, kAuxiliary);
  pop.a.resize(count);
  pop.y.resize(count);
  Eigen::VectorXd z(kLatent);
  std::array<double, kFeatures> x{};
  std::array<double, kAuxiliary> w{};
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int k = 0; k < kLatent; ++k) z[k] = rng.normal();
    const Eigen::VectorXd v = chol.triangularView<Eigen::Lower>() * z;
    for (int k = 0; k < kFeatures; ++k) x[k] = pop.x(i, k) = v[k];
    for (int k = 0; k < kAuxiliary; ++k) w[k] = pop.w(i, k) = v[kFeatures + k];
    const int a = v[kLatent - 1] > kGroupThreshold ? 1 : 0;
    pop.a[static_cast<std::size_t>(i)] = a;
    pop.y[static_cast<std::size_t>(i)] =
        rng.bernoulli(outcome_probability(cfg, x, w, a));
  }
  return pop;
}

Eigen::VectorXd ScoreModel::score(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd eta =
      (x * coef.tail(coef.size() - 1)).array() + coef[0];
  return eta.unaryExpr([](double v) { return expit(v); });
}

ScoreModel train_score_model(const Population& training) {
  const auto n = static_cast<Eigen::Index>(training.size());
  Eigen::MatrixXd design(n, kFeatures + 1);
  design.col(0).setOnes();
  design.rightCols(kFeatures) = training.x;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = training.y[static_cast<std::size_t>(i)];
  }
  ScoreModel model;
  model.coef = fit_theta(design, y, 0.0).theta;
  return model;
}

double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  const auto n = static_cast<std::size_t>(scores.size());
  if (labels.size() != n) throw InputError("scores and labels differ in length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return scores[static_cast<Eigen::Index>(l)] <
           scores[static_cast<Eigen::Index>(r)];
  });
  double rank_sum = 0.0;
  double positives = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    const double v = scores[static_cast<Eigen::Index>(order[i])];
    while (j < n && scores[static_cast<Eigen::Index>(order[j])] == v) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid_rank;
        positives += 1.0;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw InputError("AUC needs both outcome classes");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

AuditDataset make_audit_dataset(const ScenarioConfig& cfg,
                                const ScoreModel& model, std::size_t n,
                                std::size_t N, Rng& rng) {
  const Population pop = gen_population(cfg, n + N, rng);
  const Eigen::VectorXd s = model.score(pop.x);
  std::vector<AuditRecord> records(n + N);
  for (std::size_t i = 0; i < n + N; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    AuditRecord& r = records[i];
    r.s = s[row];
    r.a = pop.a[i];
    r.w.resize(kAuxiliary);
    for (int k = 0; k < kAuxiliary; ++k) r.w[k] = pop.w(row, k);
    int y = pop.y[i];
    if (cfg.outcome_override) {
      y = rng.bernoulli(
          (*cfg.outcome_override)(r.s, r.s >= cfg.cutoff ? 1 : 0, r.w, r.a));
    }
    if (i < n) r.y = y;
  }
  return AuditDataset(std::move(records), cfg.cutoff,
                      std::vector<CovariateKind>(kAuxiliary,
                                                 CovariateKind::Continuous));
}

double OracleTruth::of(Metric metric) const {
  return delta[metric_index(metric)];
}

OracleTruth oracle_truth(const ScenarioConfig& cfg, const ScoreModel& model,
                         Rng& rng) {
  constexpr std::size_t kChunk = 100'000;
  std::array<std::vector<double>, 2> ys, ss, ds;
  for (std::size_t done = 0; done < cfg.oracle_size;) {
    const std::size_t count = std::min(kChunk, cfg.oracle_size - done);
    const Population pop = gen_population(cfg, count, rng);
    const Eigen::VectorXd s = model.score(pop.x);
    for (std::size_t i = 0; i < count; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const int a = pop.a[i];
      const int d = s[row] >= cfg.cutoff ? 1 : 0;
      int y = pop.y[i];
      if (cfg.outcome_override) {
        std::array<double, kAuxiliary> w{};
        for (int k = 0; k < kAuxiliary; ++k) w[k] = pop.w(row, k);
        y = rng.bernoulli((*cfg.outcome_override)(s[row], d, w, a));
      }
      ys[a].push_back(y);
      ss[a].push_back(s[row]);
      ds[a].push_back(d);
    }
    done += count;
  }
  OracleTruth truth;
  std::array<GroupSample, 2> groups;
  std::array<GroupMoments, 2> moments;
  for (int a = 0; a < 2; ++a) {
    GroupSample& g = groups[a];
    g.y = Eigen::Map<const Eigen::VectorXd>(ys[a].data(),
                                            static_cast<Eigen::Index>(ys[a].size()));
    g.s = Eigen::Map<const Eigen::VectorXd>(ss[a].data(),
                                            static_cast<Eigen::Index>(ss[a].size()));
    g.d = Eigen::Map<const Eigen::VectorXd>(ds[a].data(),
                                            static_cast<Eigen::Index>(ds[a].size()));
    g.w.resize(g.s.size(), 0);
    moments[a] = group_moments_supervised(g, a);
  }
  for (Metric metric : kAllMetrics) {
    const std::size_t k = metric_index(metric);
    truth.group0[k] = metric_from_moments(metric, moments[0]);
    truth.group1[k] = metric_from_moments(metric, moments[1]);
    truth.delta[k] = truth.group0[k] - truth.group1[k];
    truth.delta_se[k] = variance_from_influence(
        influence_supervised(groups[0], metric, 0, moments[0], truth.group0[k]),
        influence_supervised(groups[1], metric, 1, moments[1], truth.group1[k]));
  }
  return truth;
}

double oracle_truth(const ScenarioConfig& cfg, const ScoreModel& model,
                    Metric metric, Rng& rng) {
  return oracle_truth(cfg, model, rng).of(metric);
}

std::string_view to_string(StudyMethod method) {
  switch (method) {
    case StudyMethod::Supervised: return "supervised";
    case StudyMethod::InfairnessS: return "infairness-S";
    case StudyMethod::InfairnessSW: return "infairness-SW";
    case StudyMethod::Ji: return "ji";
  }
  return "?";
}

std::optional<StudyMethod> parse_study_method(std::string_view name) {
  for (StudyMethod m : kAllStudyMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

const CellSummary& SimulationSummary::cell(StudyMethod method,
                                           Metric metric) const {
  for (const CellSummary& c : cells) {
    if (c.method == method && c.metric == metric) return c;
  }
  throw InputError("method not part of this study");
}

namespace {

struct ReplicationResult {
  std::vector<ReplicationRow> rows;
  std::vector<std::string> failures;
};

ImputationConfig imputation_config(const ScenarioConfig& cfg, bool with_w,
                                   std::uint64_t seed) {
  ImputationConfig ic;
  if (with_w) {
    for (std::size_t k = 0; k < kAuxiliary; ++k) ic.continuous.push_back(k);
  }
  ic.folds = cfg.folds;
  ic.seed = seed;
  return ic;
}

void record(ReplicationResult& out, int rep, StudyMethod method,
            const GroupedEstimate& est, double truth) {
  ReplicationRow row;
  row.rep = rep;
  row.method = method;
  row.metric = est.delta.metric;
  row.estimate = est.delta.point;
  row.se = est.delta.se;
  row.truth = truth;
  row.covered = est.delta.has_interval()
                    ? (est.delta.ci_low <= truth && truth <= est.delta.ci_high)
                    : -1;
  out.rows.push_back(row);
}

ReplicationResult run_replication(const ScenarioConfig& cfg,
                                  const ScoreModel& frozen_model,
                                  const OracleTruth& frozen_truth,
                                  const std::vector<StudyMethod>& methods,
                                  int rep) {
  ReplicationResult out;
  const auto stream = kReplicationStream + static_cast<std::uint64_t>(rep);
  ScoreModel model = frozen_model;
  OracleTruth truth = frozen_truth;
  if (!cfg.freeze_score_model) {
    Rng train_rng = Rng::derive(cfg.seed, stream, kTrainStream);
    model = train_score_model(gen_population(cfg, cfg.n_train, train_rng));
    Rng oracle_rng = Rng::derive(cfg.seed, stream, kOracleStream);
    truth = oracle_truth(cfg, model, oracle_rng);
  }
  Rng rng = Rng::derive(cfg.seed, stream);
  const AuditDataset data = make_audit_dataset(cfg, model, cfg.n, cfg.N, rng);
  const std::uint64_t fit_seed = Rng::mix(cfg.seed ^ Rng::mix(stream));

  for (StudyMethod method : methods) {
    std::function<GroupedEstimate(Metric)> estimate;
    InfairnessFit ss_fit;
    std::array<BetaCalibration, 2> calibration;
    try {
      switch (method) {
        case StudyMethod::Supervised:
          estimate = [&](Metric m) { return estimate_supervised(data, m); };
          break;
        case StudyMethod::InfairnessS:
        case StudyMethod::InfairnessSW:
          ss_fit = fit_infairness(
              data, imputation_config(cfg, method == StudyMethod::InfairnessSW,
                                      fit_seed));
          estimate = [&](Metric m) { return estimate_infairness(ss_fit, m); };
          break;
        case StudyMethod::Ji:
          calibration = {beta_calibrate(data, 0), beta_calibrate(data, 1)};
          estimate = [&](Metric m) {
            return estimate_ji(data, m, calibration);
          };
          break;
      }
    } catch (const Error& e) {
      out.failures.push_back("rep " + std::to_string(rep) + " " +
                             std::string(to_string(method)) + ": " + e.what());
      continue;
    }
    for (Metric metric : kAllMetrics) {
      try {
        record(out, rep, method, estimate(metric), truth.of(metric));
      } catch (const Error& e) {
        out.failures.push_back("rep " + std::to_string(rep) + " " +
                               std::string(to_string(method)) + " " +
                               std::string(to_string(metric)) + ": " + e.what());
      }
    }
  }
  return out;
}

CellSummary summarize(StudyMethod method, Metric metric,
                      const std::vector<ReplicationRow>& rows) {
  CellSummary c;
  c.method = method;
  c.metric = metric;
  double sum = 0.0, sum_truth = 0.0, sq_err = 0.0, se_sum = 0.0;
  int covered = 0, with_interval = 0;
  std::vector<double> values;
  for (const ReplicationRow& r : rows) {
    if (r.method != method || r.metric != metric) continue;
    values.push_back(r.estimate);
    sum += r.estimate;
    sum_truth += r.truth;
    sq_err += (r.estimate - r.truth) * (r.estimate - r.truth);
    if (r.covered >= 0) {
      ++with_interval;
      covered += r.covered;
      se_sum += r.se;
    }
  }
  c.count = static_cast<int>(values.size());
  if (c.count == 0) {
    c.mean_estimate = c.truth = c.bias = c.mc_se = c.empirical_sd = c.mse =
        c.re = c.coverage = c.mean_se = kNaN;
    return c;
  }
  const double n = c.count;
  c.mean_estimate = sum / n;
  c.truth = sum_truth / n;
  c.bias = c.mean_estimate - c.truth;
  double ss = 0.0;
  for (double v : values) ss += (v - c.mean_estimate) * (v - c.mean_estimate);
  c.empirical_sd = c.count > 1 ? std::sqrt(ss / (n - 1.0)) : kNaN;
  c.mc_se = c.empirical_sd / std::sqrt(n);
  c.mse = sq_err / n;
  c.coverage = with_interval > 0 ? static_cast<double>(covered) / with_interval
                                 : kNaN;
  c.mean_se = with_interval > 0 ? se_sum / with_interval : kNaN;
  c.re = kNaN;
  return c;
}

}  // namespace

SimulationSummary run_study(const ScenarioConfig& cfg,
                            const std::vector<StudyMethod>& methods) {
  cfg.validate();
  if (methods.empty()) throw InputError("no methods requested");

  SimulationSummary summary;
  summary.scenario = cfg.scenario;
  summary.replications = cfg.replications;
  summary.seed = cfg.seed;
  summary.methods = methods;

  Rng train_rng = Rng::derive(cfg.seed, kTrainStream);
  summary.score_model =
      train_score_model(gen_population(cfg, cfg.n_train, train_rng));
  if (cfg.freeze_score_model) {
    Rng oracle_rng = Rng::derive(cfg.seed, kOracleStream);
    summary.truth = oracle_truth(cfg, summary.score_model, oracle_rng);
  }

  const int reps = cfg.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> crashes(static_cast<std::size_t>(reps));
  auto work = [&](int begin, int step) {
    for (int r = begin; r < reps; r += step) {
      try {
        results[static_cast<std::size_t>(r)] = run_replication(
            cfg, summary.score_model, summary.truth, methods, r);
      } catch (...) {
        crashes[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(cfg.threads, reps));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& crash : crashes) {
    if (crash) std::rethrow_exception(crash);
  }

  for (int r = 0; r < reps; ++r) {
    auto& res = results[static_cast<std::size_t>(r)];
    if (!res.failures.empty()) ++summary.failed_replications;
    summary.rows.insert(summary.rows.end(), res.rows.begin(), res.rows.end());
    summary.failures.insert(summary.failures.end(), res.failures.begin(),
                            res.failures.end());
  }
  if (summary.failed_replications * 100 > reps) {
    throw Error("simulation study failed: " +
                std::to_string(summary.failed_replications) + " of " +
                std::to_string(reps) + " replications raised errors; first: " +
                summary.failures.front());
  }

  const bool has_sup =
      std::find(methods.begin(), methods.end(), StudyMethod::Supervised) !=
      methods.end();
  for (StudyMethod method : methods) {
    for (Metric metric : kAllMetrics) {
      summary.cells.push_back(summarize(method, metric, summary.rows));
    }
  }
  for (CellSummary& c : summary.cells) {
    if (!has_sup) continue;
    const double sup = summarize(StudyMethod::Supervised, c.metric,
                                 summary.rows).mse;
    c.re = c.method == StudyMethod::Supervised ? 1.0 : sup / c.mse;
  }
  if (!cfg.freeze_score_model) {
    for (Metric metric : kAllMetrics) {
      const std::size_t k = metric_index(metric);
      double total = 0.0;
      int count = 0;
      for (const ReplicationRow& r : summary.rows) {
        if (r.metric == metric && r.method == methods.front()) {
          total += r.truth;
          ++count;
        }
      }
      summary.truth.delta[k] = count > 0 ? total / count : kNaN;
      summary.truth.delta_se[k] = kNaN;
    }
  }
  return summary;
}

}  // namespace fairaudit::sim
