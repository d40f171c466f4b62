#pragma once

#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

// Per-record influence-function contributions for one group's metric,
// evaluated over that group's labeled records.
struct InfluenceVector {
  std::vector<double> values;
  int group = 0;
  Metric metric = Metric::TPR;

  std::size_t size() const noexcept { return values.size(); }
};

// Labeled-sample means of Y, D, S^2, SY, DY within group a.
GroupMoments group_moments_supervised(const AuditDataset& data, int a);
GroupMoments group_moments_supervised(const GroupSample& labeled, int a);

InfluenceVector influence_supervised(const GroupSample& labeled, Metric metric,
                                     int a, const GroupMoments& moments,
                                     double point);
InfluenceVector influence_supervised(const AuditDataset& data, Metric metric,
                                     int a, const GroupMoments& moments,
                                     double point);

// n_a^{-1} * mean(IF^2); the variance of one group's estimate.
double group_variance(const InfluenceVector& influence);

// Standard error of M_0 - M_1: sqrt(sum_a n_a^{-1} mean_a(IF^2)).
// Requires at least two records per group.
double variance_from_influence(const InfluenceVector& if0,
                               const InfluenceVector& if1);

GroupedEstimate estimate_supervised(const AuditDataset& data, Metric metric);

}  // namespace fairaudit
