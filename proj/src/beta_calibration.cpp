#include "fairaudit/beta_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairaudit/error.hpp"
#include "fairaudit/semisupervised.hpp"
#include "fairaudit/solver.hpp"

namespace fairaudit {

namespace {

constexpr double kSeparationBound = 30.0;

Eigen::MatrixXd beta_design(const Eigen::VectorXd& s, double clip) {
  Eigen::MatrixXd x(s.size(), 3);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double v = std::clamp(s[i], clip, 1.0 - clip);
    x(i, 0) = 1.0;
    x(i, 1) = std::log(v);
    x(i, 2) = std::log(1.0 - v);
  }
  return x;
}

}  // namespace

double BetaCalibration::calibrate(double s) const noexcept {
  const double v = std::clamp(s, clip, 1.0 - clip);
  return expit(zeta[0] + zeta[1] * std::log(v) + zeta[2] * std::log(1.0 - v));
}

Eigen::VectorXd BetaCalibration::calibrate(const Eigen::VectorXd& s) const {
  Eigen::VectorXd eta = beta_design(s, clip) * zeta;
  return eta.unaryExpr([](double v) { return expit(v); });
}

BetaCalibration beta_calibrate(const GroupSample& labeled, int a, double clip) {
  if (labeled.size() < 3) {
    throw InsufficientDataError("Beta calibration needs at least 3 labeled "
                                "records in group " + std::to_string(a));
  }
  BetaCalibration cal;
  cal.group = a;
  cal.clip = clip;
  const Eigen::MatrixXd x = beta_design(labeled.s, clip);

  // A constant outcome is separated by any score; Newton would stop on a
  // vanishing score long before |eta| grows past the bound.
  bool separated = labeled.y.minCoeff() == labeled.y.maxCoeff();
  if (!separated) {
    try {
      const FitResult fit = fit_theta(x, labeled.y, 0.0);
      const double max_eta = (x * fit.theta).cwiseAbs().maxCoeff();
      if (max_eta > kSeparationBound || !fit.theta.allFinite()) {
        separated = true;
      } else {
        cal.zeta = fit.theta;
      }
    } catch (const SolverError&) {
      separated = true;
    }
  }
  if (separated) {
    cal.ridge_fallback = true;
    cal.warnings.push_back("group " + std::to_string(a) +
                           ": separation or singular design in Beta calibration; "
                           "refitted with "
                           "penalty 1e-4");
    cal.zeta = fit_theta(x, labeled.y, kBetaFallbackPenalty).theta;
  }
  return cal;
}

BetaCalibration beta_calibrate(const AuditDataset& data, int a, double clip) {
  return beta_calibrate(data.labeled(a), a, clip);
}

GroupedEstimate estimate_ji(const AuditDataset& data, Metric metric,
                            const std::array<BetaCalibration, 2>& calibrations) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double point[2];
  for (int a = 0; a < 2; ++a) {
    const GroupSample unlabeled = data.unlabeled(a);
    const Eigen::VectorXd imputations =
        calibrations[static_cast<std::size_t>(a)].calibrate(unlabeled.s);
    point[a] = metric_from_moments(
        metric, imputed_moments(unlabeled, imputations, a).moments);
  }
  return {
      MetricEstimate::make(metric, Scope::Group0, Method::Ji, point[0], nan),
      MetricEstimate::make(metric, Scope::Group1, Method::Ji, point[1], nan),
      MetricEstimate::make(metric, Scope::Disparity, Method::Ji,
                           point[0] - point[1], nan),
  };
}

GroupedEstimate estimate_ji(const AuditDataset& data, Metric metric) {
  return estimate_ji(data, metric,
                     {beta_calibrate(data, 0), beta_calibrate(data, 1)});
}

}  // namespace fairaudit
