#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace fairaudit {

enum class CovariateKind { Continuous, Categorical };

// One observation. D is not stored; it is derived from s and the audit cutoff.
struct AuditRecord {
  std::optional<int> y;  // present iff the record is labeled
  double s = 0.0;
  int a = 0;
  std::vector<double> w;

  bool labeled() const noexcept { return y.has_value(); }
};

// Column-oriented copy of the labeled or unlabeled records of one group.
// y is empty for unlabeled samples.
struct GroupSample {
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  Eigen::VectorXd d;
  Eigen::MatrixXd w;  // rows = records, cols = covariates

  Eigen::Index size() const noexcept { return s.size(); }
};

class AuditDataset {
 public:
  // Validates every record (s in [0,1], y and a binary, covariate arity) and
  // the cutoff. Group counts are not constrained here; estimators check the
  // partitions they need.
  AuditDataset(std::vector<AuditRecord> records, double cutoff,
               std::vector<CovariateKind> covariate_kinds = {});

  const std::vector<AuditRecord>& records() const noexcept { return records_; }
  double cutoff() const noexcept { return cutoff_; }
  const std::vector<CovariateKind>& covariate_kinds() const noexcept {
    return kinds_;
  }
  std::size_t covariate_count() const noexcept { return kinds_.size(); }

  std::size_t labeled_count(int a) const { return labeled_[index(a)]; }
  std::size_t unlabeled_count(int a) const { return unlabeled_[index(a)]; }
  std::size_t labeled_count() const { return labeled_[0] + labeled_[1]; }
  std::size_t unlabeled_count() const { return unlabeled_[0] + unlabeled_[1]; }

  // n_a / n
  double labeled_proportion(int a) const;

  GroupSample labeled(int a) const { return sample(a, true); }
  GroupSample unlabeled(int a) const { return sample(a, false); }

  int classify(double s) const noexcept { return s >= cutoff_ ? 1 : 0; }

 private:
  static std::size_t index(int a);
  GroupSample sample(int a, bool labeled) const;

  std::vector<AuditRecord> records_;
  double cutoff_;
  std::vector<CovariateKind> kinds_;
  std::array<std::size_t, 2> labeled_{};
  std::array<std::size_t, 2> unlabeled_{};
};

}  // namespace fairaudit
