#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit::sim {

inline constexpr int kFeatures = 10;
inline constexpr int kAuxiliary = 5;
inline constexpr int kLatent = 16;  // X (10), W (5), latent for A (1)
inline constexpr double kGroupThreshold = 0.253;

// Replaces the scenario's outcome model on validation records:
// P(Y = 1 | S, D, W, A).
using OutcomeModel =
    std::function<double(double s, int d, std::span<const double> w, int a)>;

struct ScenarioConfig {
  int scenario = 1;
  std::array<double, kFeatures> beta0{};
  std::array<double, kFeatures> beta1{};
  std::array<double, kAuxiliary> gamma0{};
  std::array<double, kAuxiliary> gamma1{};
  std::size_t n = 1000;       // labeled
  std::size_t N = 20000;      // unlabeled
  std::size_t n_train = 3000;
  double cutoff = 0.5;
  std::uint64_t seed = 1;
  int replications = 500;
  std::size_t oracle_size = 1'000'000;
  int folds = 10;
  int threads = 1;
  // One score model trained once for the whole study; otherwise every
  // replication retrains it and gets its own oracle truth.
  bool freeze_score_model = true;
  std::optional<OutcomeModel> outcome_override;

  // Table-of-parameters defaults for scenario 1 or 2.
  static ScenarioConfig defaults(int scenario);
  void validate() const;
};

// Sigma_kl = 3 * 0.4^|k - l| over the 16 latent dimensions.
Eigen::MatrixXd ar1_covariance();

struct Population {
  Eigen::MatrixXd x;  // count x 10
  Eigen::MatrixXd w;  // count x 5
  std::vector<int> a;
  std::vector<int> y;

  std::size_t size() const noexcept { return a.size(); }
};

// P(Y = 1 | X, W, A = a) under the configured scenario.
double outcome_probability(const ScenarioConfig& cfg,
                           std::span<const double> x,
                           std::span<const double> w, int a);

Population gen_population(const ScenarioConfig& cfg, std::size_t count,
                          Rng& rng);

// Logistic regression of Y on (1, X); coefficients intercept first.
struct ScoreModel {
  Eigen::VectorXd coef;

  Eigen::VectorXd score(const Eigen::MatrixXd& x) const;
};

ScoreModel train_score_model(const Population& training);

// Area under the ROC curve (Mann-Whitney, ties counted one half).
double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels);

// Validation records: the first n labeled, the remaining N unlabeled. With
// an outcome override, Y is redrawn from it after scoring.
AuditDataset make_audit_dataset(const ScenarioConfig& cfg,
                                const ScoreModel& model, std::size_t n,
                                std::size_t N, Rng& rng);

struct OracleTruth {
  std::array<double, 7> group0{};
  std::array<double, 7> group1{};
  std::array<double, 7> delta{};
  std::array<double, 7> delta_se{};  // Monte Carlo standard error

  double of(Metric metric) const;
};

// Supervised evaluation on one fully labeled Monte Carlo sample of
// cfg.oracle_size records scored by `model`.
OracleTruth oracle_truth(const ScenarioConfig& cfg, const ScoreModel& model,
                         Rng& rng);
double oracle_truth(const ScenarioConfig& cfg, const ScoreModel& model,
                    Metric metric, Rng& rng);

enum class StudyMethod { Supervised, InfairnessS, InfairnessSW, Ji };

inline constexpr std::array<StudyMethod, 4> kAllStudyMethods = {
    StudyMethod::Supervised, StudyMethod::InfairnessS,
    StudyMethod::InfairnessSW, StudyMethod::Ji};

std::string_view to_string(StudyMethod method);
std::optional<StudyMethod> parse_study_method(std::string_view name);

struct ReplicationRow {
  int rep = 0;
  StudyMethod method = StudyMethod::Supervised;
  Metric metric = Metric::TPR;
  double estimate = 0.0;
  double se = 0.0;    // NaN for ji
  double truth = 0.0;
  int covered = -1;   // -1 when the method has no interval
};

struct CellSummary {
  StudyMethod method = StudyMethod::Supervised;
  Metric metric = Metric::TPR;
  int count = 0;
  double mean_estimate = 0.0;
  double truth = 0.0;
  double bias = 0.0;
  double mc_se = 0.0;         // sd(estimate) / sqrt(count)
  double empirical_sd = 0.0;
  double mse = 0.0;
  double re = 0.0;            // MSE_supervised / MSE_method
  double coverage = 0.0;      // NaN without intervals
  double mean_se = 0.0;       // NaN without intervals
};

struct SimulationSummary {
  int scenario = 1;
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<StudyMethod> methods;
  OracleTruth truth;
  ScoreModel score_model;
  int failed_replications = 0;
  std::vector<std::string> failures;
  std::vector<ReplicationRow> rows;
  std::vector<CellSummary> cells;

  const CellSummary& cell(StudyMethod method, Metric metric) const;
};

// Runs every replication (each with its own derived random stream, so the
// result does not depend on the thread count) and summarizes bias, MSE,
// relative efficiency and coverage against the oracle truth. Fails when
// more than 1% of replications raise estimator errors.
SimulationSummary run_study(const ScenarioConfig& cfg,
                            const std::vector<StudyMethod>& methods);

}  // namespace fairaudit::sim
