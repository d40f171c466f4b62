#pragma once

#include <Eigen/Dense>
#include <array>

#include "fairaudit/dataset.hpp"
#include "fairaudit/imputation.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/supervised.hpp"

namespace fairaudit {

enum class MomentSource { EmpiricalUnlabeled, ImputedUnlabeled };

// Moments averaged over a group's unlabeled records: D and S^2 directly,
// Y, SY and DY through the imputations m, S*m and D*m.
struct SSMoments {
  GroupMoments moments;
  // in the order mu_y, mu_d, mu_s2, mu_sy, mu_dy
  static constexpr std::array<MomentSource, 5> source = {
      MomentSource::ImputedUnlabeled, MomentSource::EmpiricalUnlabeled,
      MomentSource::EmpiricalUnlabeled, MomentSource::ImputedUnlabeled,
      MomentSource::ImputedUnlabeled};
};

// Imputation-based moments from any vector of imputations over the unlabeled
// sample (shared with the Beta-calibration baseline).
SSMoments imputed_moments(const GroupSample& unlabeled,
                          const Eigen::VectorXd& imputations, int a);

SSMoments ss_moments(const AuditDataset& data, const ImputationModel& model,
                     int a);

// Influence contributions over the labeled records of group a given their
// imputations; every row carries the factor (Y - m).
InfluenceVector influence_ss(const GroupSample& labeled,
                             const Eigen::VectorXd& labeled_imputations,
                             Metric metric, int a, const GroupMoments& moments,
                             double point);
InfluenceVector influence_ss(const AuditDataset& data, Metric metric, int a,
                             const ImputationModel& model,
                             const SSMoments& moments, double point);

// Both groups' fitted working models plus everything the per-metric
// estimates reuse.
struct InfairnessFit {
  std::array<ImputationModel, 2> models;
  std::array<SSMoments, 2> moments;
  std::array<GroupSample, 2> labeled;
  std::array<Eigen::VectorXd, 2> labeled_imputations;
};

InfairnessFit fit_infairness(const AuditDataset& data,
                             const ImputationConfig& config);

GroupedEstimate estimate_infairness(const InfairnessFit& fit, Metric metric);
GroupedEstimate estimate_infairness(const AuditDataset& data, Metric metric,
                                    const ImputationConfig& config);

struct EfficiencyComparison {
  double se_sup = 0.0;
  double se_ss = 0.0;
  double re = 0.0;  // (se_sup / se_ss)^2
};

EfficiencyComparison efficiency_comparison(const GroupedEstimate& supervised,
                                           const GroupedEstimate& infairness);
EfficiencyComparison efficiency_comparison(const AuditDataset& data,
                                           Metric metric,
                                           const ImputationConfig& config);

}  // namespace fairaudit
