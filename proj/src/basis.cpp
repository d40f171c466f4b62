#include "fairaudit/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairaudit/error.hpp"

namespace fairaudit {

BasisSpec make_basis_spec(int order, std::vector<std::size_t> continuous,
                          std::vector<std::size_t> categorical) {
  if (order < 1 || order > kMaxBasisOrder) {
    throw InputError("basis order must lie in 1.." +
                     std::to_string(kMaxBasisOrder) + ", got " +
                     std::to_string(order));
  }
  for (std::size_t c : continuous) {
    if (std::find(categorical.begin(), categorical.end(), c) !=
        categorical.end()) {
      throw InputError("covariate " + std::to_string(c) +
                       " declared both continuous and categorical");
    }
  }
  BasisSpec spec;
  spec.order = order;
  spec.continuous = std::move(continuous);
  spec.categorical = std::move(categorical);
  return spec;
}

namespace {

void check_schema(const BasisSpec& spec, Eigen::Index covariates) {
  auto too_big = [covariates](std::size_t j) {
    return static_cast<Eigen::Index>(j) >= covariates;
  };
  if (std::any_of(spec.continuous.begin(), spec.continuous.end(), too_big) ||
      std::any_of(spec.categorical.begin(), spec.categorical.end(), too_big)) {
    throw InputError("basis references covariate beyond the record's " +
                     std::to_string(covariates) + " covariates");
  }
}

// Raw polynomial inputs (S, W_cont...) of every sample row.
Eigen::MatrixXd polynomial_inputs(const BasisSpec& spec,
                                  const GroupSample& sample) {
  Eigen::MatrixXd t(sample.size(), static_cast<Eigen::Index>(
                                       spec.polynomial_inputs()));
  t.col(0) = sample.s;
  for (std::size_t k = 0; k < spec.continuous.size(); ++k) {
    t.col(static_cast<Eigen::Index>(k + 1)) =
        sample.w.col(static_cast<Eigen::Index>(spec.continuous[k]));
  }
  return t;
}

void fill_rows(const BasisSpec& spec, const Eigen::MatrixXd& t,
               const GroupSample& sample, bool apply_columns,
               Eigen::MatrixXd& out) {
  const Eigen::Index n = sample.size();
  const auto q1 = static_cast<Eigen::Index>(spec.polynomial_inputs());
  out.resize(n, static_cast<Eigen::Index>(spec.dimension()));
  out.col(0).setOnes();

  Eigen::MatrixXd z = t;
  if (spec.standardized()) {
    z = (t.rowwise() - spec.input_center.transpose()).array().rowwise() /
        spec.input_scale.transpose().array();
  }
  Eigen::MatrixXd power = z;
  for (int p = 0; p < spec.order; ++p) {
    if (p > 0) power.array() *= z.array();
    out.middleCols(1 + p * q1, q1) = power;
  }
  if (apply_columns && spec.column_scale.size() > 0) {
    auto block = out.middleCols(1, q1 * spec.order);
    block = (block.rowwise() - spec.column_center.transpose()).array().rowwise() /
            spec.column_scale.transpose().array();
  }
  Eigen::Index col = 1 + q1 * spec.order;
  for (std::size_t j : spec.categorical) {
    out.col(col++) = sample.w.col(static_cast<Eigen::Index>(j));
  }
  out.col(col) = sample.d;
}

void center_and_scale(const Eigen::MatrixXd& m, Eigen::VectorXd& center,
                      Eigen::VectorXd& scale) {
  const double n = static_cast<double>(m.rows());
  center = m.colwise().sum().transpose() / n;
  scale.resize(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double var = (m.col(j).array() - center[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    scale[j] = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
  }
}

}  // namespace

BasisSpec standardize_on(BasisSpec spec, const GroupSample& sample) {
  if (sample.size() == 0) {
    throw InsufficientDataError("cannot standardize a basis on an empty sample");
  }
  check_schema(spec, sample.w.cols());
  spec.input_center.resize(0);
  spec.input_scale.resize(0);
  spec.column_center.resize(0);
  spec.column_scale.resize(0);

  const Eigen::MatrixXd t = polynomial_inputs(spec, sample);
  Eigen::VectorXd in_center, in_scale;
  center_and_scale(t, in_center, in_scale);
  spec.input_center = in_center;
  spec.input_scale = in_scale;

  Eigen::MatrixXd rows;
  fill_rows(spec, t, sample, false, rows);
  const auto q1 = static_cast<Eigen::Index>(spec.polynomial_inputs());
  Eigen::VectorXd col_center, col_scale;
  center_and_scale(rows.middleCols(1, q1 * spec.order), col_center, col_scale);
  spec.column_center = col_center;
  spec.column_scale = col_scale;
  return spec;
}

Eigen::MatrixXd build_basis_matrix(const BasisSpec& spec,
                                   const GroupSample& sample) {
  check_schema(spec, sample.w.cols());
  Eigen::MatrixXd out;
  fill_rows(spec, polynomial_inputs(spec, sample), sample, true, out);
  return out;
}

Eigen::VectorXd build_basis(const BasisSpec& spec, const AuditRecord& record,
                            double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw InputError("cutoff must lie in (0,1)");
  }
  GroupSample one;
  one.s = Eigen::VectorXd::Constant(1, record.s);
  one.d = Eigen::VectorXd::Constant(1, record.s >= cutoff ? 1.0 : 0.0);
  one.w.resize(1, static_cast<Eigen::Index>(record.w.size()));
  for (std::size_t j = 0; j < record.w.size(); ++j) {
    one.w(0, static_cast<Eigen::Index>(j)) = record.w[j];
  }
  return build_basis_matrix(spec, one).row(0).transpose();
}

}  // namespace fairaudit
