#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

inline constexpr int kMaxBasisOrder = 10;

// Polynomial basis of T = (S, W_continuous) without cross products:
//   (1, T, T^2, ..., T^order, W_categorical, D)
// Powers are taken componentwise. Continuous inputs are standardized before
// raising to powers, and every power column is standardized again, so the
// ridge penalty acts on comparable scales. Empty standardization vectors mean
// the identity map. The intercept, categorical entries and D are never
// transformed.
struct BasisSpec {
  int order = 1;
  std::vector<std::size_t> continuous;
  std::vector<std::size_t> categorical;

  Eigen::VectorXd input_center;
  Eigen::VectorXd input_scale;
  Eigen::VectorXd column_center;
  Eigen::VectorXd column_scale;

  std::size_t polynomial_inputs() const noexcept {
    return 1 + continuous.size();
  }
  std::size_t dimension() const noexcept {
    return 1 + polynomial_inputs() * static_cast<std::size_t>(order) +
           categorical.size() + 1;
  }
  // Column index of D (always last).
  std::size_t d_column() const noexcept { return dimension() - 1; }
  bool standardized() const noexcept { return input_scale.size() > 0; }
};

// Unstandardized spec; validates the order and covariate indices.
BasisSpec make_basis_spec(int order, std::vector<std::size_t> continuous,
                          std::vector<std::size_t> categorical = {});

// Learns the standardization from a (labeled) group sample. Zero-variance
// inputs or columns are centered but not rescaled.
BasisSpec standardize_on(BasisSpec spec, const GroupSample& sample);

Eigen::VectorXd build_basis(const BasisSpec& spec, const AuditRecord& record,
                            double cutoff);

// One basis row per record of the sample.
Eigen::MatrixXd build_basis_matrix(const BasisSpec& spec,
                                   const GroupSample& sample);

}  // namespace fairaudit
