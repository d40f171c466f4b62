#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

// logit P(Y = 1 | S, A = a) = z0 + z1 ln S + z2 ln(1 - S), with S clipped
// to [clip, 1 - clip] before taking logs.
struct BetaCalibration {
  int group = 0;
  Eigen::Vector3d zeta = Eigen::Vector3d::Zero();
  double clip = 1e-6;
  bool ridge_fallback = false;  // fitted with the 1e-4 penalty
  std::vector<std::string> warnings;

  double calibrate(double s) const noexcept;
  Eigen::VectorXd calibrate(const Eigen::VectorXd& s) const;
};

inline constexpr double kBetaClip = 1e-6;
inline constexpr double kBetaFallbackPenalty = 1e-4;

// Unpenalized logistic MLE on the labeled group. Separation (non-convergence,
// a singular Jacobian, or a fitted linear predictor beyond +-30) triggers a
// refit with penalty 1e-4 and a warning. Requires n_a >= 3.
BetaCalibration beta_calibrate(const GroupSample& labeled, int a,
                               double clip = kBetaClip);
BetaCalibration beta_calibrate(const AuditDataset& data, int a,
                               double clip = kBetaClip);

// Point estimates only: Y is replaced by the calibrated score on the
// unlabeled records and the unified moment formulas are applied. The
// returned estimates carry NaN standard errors.
GroupedEstimate estimate_ji(const AuditDataset& data, Metric metric,
                            const std::array<BetaCalibration, 2>& calibrations);
GroupedEstimate estimate_ji(const AuditDataset& data, Metric metric);

}  // namespace fairaudit
