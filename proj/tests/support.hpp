#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit::testing {

struct Row {
  std::optional<int> y;
  double s;
  int a;
  std::vector<double> w = {};
};

inline AuditDataset dataset(const std::vector<Row>& rows, double cutoff = 0.5,
                            std::vector<CovariateKind> kinds = {}) {
  std::vector<AuditRecord> records;
  for (const Row& r : rows) records.push_back({r.y, r.s, r.a, r.w});
  if (kinds.empty() && !rows.empty()) {
    kinds.assign(rows.front().w.size(), CovariateKind::Continuous);
  }
  return AuditDataset(std::move(records), cutoff, std::move(kinds));
}

inline GroupSample sample(const std::vector<double>& y,
                          const std::vector<double>& s, double cutoff = 0.5) {
  GroupSample g;
  const auto n = static_cast<Eigen::Index>(s.size());
  g.y.resize(static_cast<Eigen::Index>(y.size()));
  g.s.resize(n);
  g.d.resize(n);
  g.w.resize(n, 0);
  for (Eigen::Index i = 0; i < g.y.size(); ++i) g.y[i] = y[i];
  for (Eigen::Index i = 0; i < n; ++i) {
    g.s[i] = s[i];
    g.d[i] = s[i] >= cutoff ? 1.0 : 0.0;
  }
  return g;
}

// Labeled records in both groups; Y depends on S and one covariate.
inline AuditDataset random_dataset(Rng& rng, std::size_t n, std::size_t N,
                                   double cutoff = 0.5) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n + N; ++i) {
    const int a = static_cast<int>(i % 2);
    const double w = rng.normal();
    const double s = 1.0 / (1.0 + std::exp(-(0.8 * rng.normal() + 0.5 * w +
                                              0.3 * a - 0.4)));
    const double p = 1.0 / (1.0 + std::exp(-(3.0 * (s - 0.4) + 0.6 * w)));
    Row r{std::nullopt, s, a, {w}};
    const int y = rng.bernoulli(p);
    if (i < n) r.y = y;
    rows.push_back(r);
  }
  return dataset(rows, cutoff);
}

}  // namespace fairaudit::testing
