#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fairaudit/basis.hpp"
#include "fairaudit/dataset.hpp"

namespace fairaudit {

struct GbicOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  int max_order = kMaxBasisOrder;
  double pilot_lambda = 1e-4;
  // Use sum(eps^2 / sigma^2) for the first fit term instead of its n^{-1}
  // scaled form.
  bool unscaled_fit_term = false;
};

struct GbicTerms {
  double fit = 0.0;
  double log_variance = 0.0;
  double complexity = 0.0;
  double trace = 0.0;
  double neg_log_det = 0.0;

  double total() const noexcept {
    return fit + log_variance + complexity + trace + neg_log_det;
  }
};

// GBIC of one candidate order on one sample. Each score component
// r_i * B1_ij (r_i = y_i - expit(theta1' B1_i)) is projected onto the
// columns of basis_alpha by least squares; `complexity_columns` is
// (q + 1) * alpha. Rank-deficient Gram matrices get a 1e-8 ridge and a
// warning appended to `warnings`.
GbicTerms gbic_criterion(const Eigen::MatrixXd& basis_alpha,
                         const Eigen::MatrixXd& basis_one,
                         const Eigen::VectorXd& y,
                         const Eigen::VectorXd& theta_one,
                         int complexity_columns, bool unscaled_fit_term,
                         std::vector<std::string>* warnings = nullptr);

struct OrderSelection {
  int order = 1;
  // fold-averaged GBIC indexed by order - 1; NaN for infeasible orders
  std::vector<double> mean_gbic;
  std::vector<std::string> warnings;
};

// Cross-validated GBIC order selection. For every fold the order-1 model is
// fitted (at the pilot penalty) on the remaining folds and the criterion is
// evaluated on the held-out fold. Orders with m - (q+1)alpha - 1 <= 0 or
// m <= dim(B^alpha) in the smallest held-out fold are skipped. `shape`
// supplies the covariate layout; its order is ignored.
OrderSelection select_order_gbic(const GroupSample& labeled,
                                 const BasisSpec& shape,
                                 const GbicOptions& options = {});

}  // namespace fairaudit
