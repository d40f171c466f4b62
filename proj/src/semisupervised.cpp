#include "fairaudit/semisupervised.hpp"

#include <cmath>
#include <string>

#include "fairaudit/error.hpp"

namespace fairaudit {

SSMoments imputed_moments(const GroupSample& unlabeled,
                          const Eigen::VectorXd& imputations, int a) {
  const Eigen::Index n = unlabeled.size();
  if (n == 0) {
    throw DegenerateGroupError(
        a, "N_a", "group " + std::to_string(a) + " has no unlabeled records");
  }
  if (imputations.size() != n) {
    throw InputError("one imputation per unlabeled record is required");
  }
  const double inv = 1.0 / static_cast<double>(n);
  SSMoments out;
  GroupMoments& m = out.moments;
  m.group = a;
  m.mu_y = imputations.sum() * inv;
  m.mu_d = unlabeled.d.sum() * inv;
  m.mu_s2 = unlabeled.s.squaredNorm() * inv;
  m.mu_sy = unlabeled.s.dot(imputations) * inv;
  m.mu_dy = unlabeled.d.dot(imputations) * inv;
  return out;
}

SSMoments ss_moments(const AuditDataset& data, const ImputationModel& model,
                     int a) {
  const GroupSample unlabeled = data.unlabeled(a);
  if (unlabeled.size() == 0) {
    throw DegenerateGroupError(
        a, "N_a", "group " + std::to_string(a) + " has no unlabeled records");
  }
  return imputed_moments(unlabeled, impute(model, unlabeled), a);
}

InfluenceVector influence_ss(const GroupSample& labeled,
                             const Eigen::VectorXd& labeled_imputations,
                             Metric metric, int a, const GroupMoments& m,
                             double point) {
  InfluenceVector out;
  out.group = a;
  out.metric = metric;
  out.values.resize(static_cast<std::size_t>(labeled.size()));
  for (Eigen::Index i = 0; i < labeled.size(); ++i) {
    const double r = labeled.y[i] - labeled_imputations[i];
    const double d = labeled.d[i];
    double v = 0.0;
    switch (metric) {
      case Metric::TPR:
        v = r * (d - point) / m.mu_y;
        break;
      case Metric::FPR:
        v = r * (point - d) / (1.0 - m.mu_y);
        break;
      case Metric::PPV:
        v = d * r / m.mu_d;
        break;
      case Metric::NPV:
        v = (d - 1.0) * r / (1.0 - m.mu_d);
        break;
      case Metric::F1:
        v = r * (2.0 * d - point) / (m.mu_d + m.mu_y);
        break;
      case Metric::ACC:
        v = r * (2.0 * d - 1.0);
        break;
      case Metric::BS:
        v = r * (1.0 - 2.0 * labeled.s[i]);
        break;
    }
    out.values[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

InfluenceVector influence_ss(const AuditDataset& data, Metric metric, int a,
                             const ImputationModel& model,
                             const SSMoments& moments, double point) {
  const GroupSample labeled = data.labeled(a);
  return influence_ss(labeled, impute(model, labeled), metric, a,
                      moments.moments, point);
}

InfairnessFit fit_infairness(const AuditDataset& data,
                             const ImputationConfig& config) {
  InfairnessFit fit;
  for (int a = 0; a < 2; ++a) {
    const auto k = static_cast<std::size_t>(a);
    fit.labeled[k] = data.labeled(a);
    fit.models[k] = fit_imputation_model(fit.labeled[k], a, config);
    fit.moments[k] = ss_moments(data, fit.models[k], a);
    fit.labeled_imputations[k] = impute(fit.models[k], fit.labeled[k]);
  }
  return fit;
}

GroupedEstimate estimate_infairness(const InfairnessFit& fit, Metric metric) {
  double point[2];
  double var[2];
  for (int a = 0; a < 2; ++a) {
    const auto k = static_cast<std::size_t>(a);
    const GroupMoments& m = fit.moments[k].moments;
    point[a] = metric_from_moments(metric, m);
    var[a] = group_variance(influence_ss(fit.labeled[k],
                                         fit.labeled_imputations[k], metric, a,
                                         m, point[a]));
  }
  return {
      MetricEstimate::make(metric, Scope::Group0, Method::Infairness, point[0],
                           std::sqrt(var[0])),
      MetricEstimate::make(metric, Scope::Group1, Method::Infairness, point[1],
                           std::sqrt(var[1])),
      MetricEstimate::make(metric, Scope::Disparity, Method::Infairness,
                           point[0] - point[1], std::sqrt(var[0] + var[1])),
  };
}

GroupedEstimate estimate_infairness(const AuditDataset& data, Metric metric,
                                    const ImputationConfig& config) {
  return estimate_infairness(fit_infairness(data, config), metric);
}

EfficiencyComparison efficiency_comparison(const GroupedEstimate& supervised,
                                           const GroupedEstimate& infairness) {
  EfficiencyComparison out;
  out.se_sup = supervised.delta.se;
  out.se_ss = infairness.delta.se;
  if (out.se_sup == out.se_ss) {
    out.re = 1.0;
  } else {
    const double ratio = out.se_sup / out.se_ss;
    out.re = ratio * ratio;
  }
  return out;
}

EfficiencyComparison efficiency_comparison(const AuditDataset& data,
                                           Metric metric,
                                           const ImputationConfig& config) {
  return efficiency_comparison(estimate_supervised(data, metric),
                               estimate_infairness(data, metric, config));
}

}  // namespace fairaudit
