#include "fairaudit/supervised.hpp"

#include <cmath>
#include <string>

#include "fairaudit/error.hpp"

namespace fairaudit {

GroupMoments group_moments_supervised(const GroupSample& labeled, int a) {
  const Eigen::Index n = labeled.size();
  if (n == 0) {
    throw DegenerateGroupError(
        a, "n_a", "group " + std::to_string(a) + " has no labeled records");
  }
  const double inv = 1.0 / static_cast<double>(n);
  GroupMoments m;
  m.group = a;
  m.mu_y = labeled.y.sum() * inv;
  m.mu_d = labeled.d.sum() * inv;
  m.mu_s2 = labeled.s.squaredNorm() * inv;
  m.mu_sy = labeled.s.dot(labeled.y) * inv;
  m.mu_dy = labeled.d.dot(labeled.y) * inv;
  return m;
}

GroupMoments group_moments_supervised(const AuditDataset& data, int a) {
  return group_moments_supervised(data.labeled(a), a);
}

InfluenceVector influence_supervised(const GroupSample& labeled, Metric metric,
                                     int a, const GroupMoments& m,
                                     double point) {
  InfluenceVector out;
  out.group = a;
  out.metric = metric;
  out.values.resize(static_cast<std::size_t>(labeled.size()));
  for (Eigen::Index i = 0; i < labeled.size(); ++i) {
    const double y = labeled.y[i];
    const double d = labeled.d[i];
    const double s = labeled.s[i];
    double v = 0.0;
    switch (metric) {
      case Metric::TPR:
        v = y * (d - point) / m.mu_y;
        break;
      case Metric::FPR:
        v = (1.0 - y) * (d - point) / (1.0 - m.mu_y);
        break;
      case Metric::PPV:
        v = d * (y - point) / m.mu_d;
        break;
      case Metric::NPV:
        v = (1.0 - d) * (1.0 - y - point) / (1.0 - m.mu_d);
        break;
      case Metric::F1:
        v = (d * (y - point) + y * (d - point)) / (m.mu_d + m.mu_y);
        break;
      case Metric::ACC:
        v = 1.0 - (y - d) * (y - d) - point;
        break;
      case Metric::BS:
        v = (s - y) * (s - y) - point;
        break;
    }
    out.values[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

InfluenceVector influence_supervised(const AuditDataset& data, Metric metric,
                                     int a, const GroupMoments& moments,
                                     double point) {
  return influence_supervised(data.labeled(a), metric, a, moments, point);
}

double group_variance(const InfluenceVector& influence) {
  const std::size_t n = influence.size();
  if (n < 2) {
    throw InsufficientDataError("group " + std::to_string(influence.group) +
                                " needs at least 2 labeled records for a "
                                "standard error, has " +
                                std::to_string(n));
  }
  double sum_sq = 0.0;
  for (double v : influence.values) sum_sq += v * v;
  const double nd = static_cast<double>(n);
  return sum_sq / nd / nd;
}

double variance_from_influence(const InfluenceVector& if0,
                               const InfluenceVector& if1) {
  return std::sqrt(group_variance(if0) + group_variance(if1));
}

GroupedEstimate estimate_supervised(const AuditDataset& data, Metric metric) {
  const GroupSample l0 = data.labeled(0);
  const GroupSample l1 = data.labeled(1);
  const GroupMoments m0 = group_moments_supervised(l0, 0);
  const GroupMoments m1 = group_moments_supervised(l1, 1);
  const double p0 = metric_from_moments(metric, m0);
  const double p1 = metric_from_moments(metric, m1);
  const InfluenceVector if0 = influence_supervised(l0, metric, 0, m0, p0);
  const InfluenceVector if1 = influence_supervised(l1, metric, 1, m1, p1);
  const double v0 = group_variance(if0);
  const double v1 = group_variance(if1);
  return {
      MetricEstimate::make(metric, Scope::Group0, Method::Supervised, p0,
                           std::sqrt(v0)),
      MetricEstimate::make(metric, Scope::Group1, Method::Supervised, p1,
                           std::sqrt(v1)),
      MetricEstimate::make(metric, Scope::Disparity, Method::Supervised,
                           p0 - p1, std::sqrt(v0 + v1)),
  };
}

}  // namespace fairaudit
