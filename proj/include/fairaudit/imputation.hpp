#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairaudit/basis.hpp"
#include "fairaudit/dataset.hpp"

namespace fairaudit {

struct ImputationConfig {
  std::vector<std::size_t> continuous;   // covariate indices entering powers
  std::vector<std::size_t> categorical;  // entered once, as given
  std::optional<int> order;              // nullopt: select by GBIC
  std::optional<double> lambda;          // nullopt: select by cross-validation
  int folds = 10;
  std::uint64_t seed = 0;
  int max_order = kMaxBasisOrder;
  double pilot_lambda = 1e-4;  // penalty of the order-1 fits inside GBIC
  bool gbic_unscaled_fit_term = false;
};

// Working model E(Y | S, W, A = a) = expit(theta' B_a(S, W)) for one group.
struct ImputationModel {
  int group = 0;
  BasisSpec basis;
  Eigen::VectorXd theta;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> gbic;          // per order, empty when order was fixed
  std::vector<double> cv_deviance;   // per candidate, empty when lambda fixed
  std::vector<std::string> warnings;
};

// Selects the order (GBIC, at the pilot penalty) and then the penalty for
// that order (CV), and fits theta on all labeled records of group a.
ImputationModel fit_imputation_model(const AuditDataset& data, int a,
                                     const ImputationConfig& config);
ImputationModel fit_imputation_model(const GroupSample& labeled, int a,
                                     const ImputationConfig& config);

// expit(theta' B(record)); always strictly inside (0, 1) for finite theta.
double impute(const ImputationModel& model, const AuditRecord& record,
              double cutoff);

// Imputations for every record of a sample.
Eigen::VectorXd impute(const ImputationModel& model, const GroupSample& sample);

}  // namespace fairaudit
