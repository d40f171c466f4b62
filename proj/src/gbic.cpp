#include "fairaudit/gbic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairaudit/error.hpp"
#include "fairaudit/solver.hpp"

namespace fairaudit {

namespace {

constexpr double kRidge = 1e-8;

// Cholesky of a symmetric PSD matrix, adding kRidge * I when it is not
// numerically positive definite.
Eigen::LLT<Eigen::MatrixXd> regularized_llt(const Eigen::MatrixXd& m,
                                            const char* what,
                                            std::vector<std::string>* warnings) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    ok = diag.minCoeff() > diag.maxCoeff() * 1e-7;
  }
  if (ok) return llt;
  if (warnings) {
    warnings->push_back(std::string("rank-deficient ") + what +
                        "; regularized with 1e-8 I");
  }
  Eigen::MatrixXd ridged = m;
  ridged.diagonal().array() += kRidge;
  llt.compute(ridged);
  if (llt.info() != Eigen::Success) {
    throw SolverError(std::string(what) + " is not positive semi-definite",
                      std::numeric_limits<double>::quiet_NaN());
  }
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

GbicTerms gbic_criterion(const Eigen::MatrixXd& basis_alpha,
                         const Eigen::MatrixXd& basis_one,
                         const Eigen::VectorXd& y,
                         const Eigen::VectorXd& theta_one,
                         int complexity_columns, bool unscaled_fit_term,
                         std::vector<std::string>* warnings) {
  const Eigen::Index m = basis_alpha.rows();
  const Eigen::Index p = basis_alpha.cols();
  const double dof = static_cast<double>(m - complexity_columns - 1);
  if (!(dof > 0.0)) {
    throw InsufficientDataError("GBIC residual degrees of freedom not positive");
  }
  const double md = static_cast<double>(m);

  Eigen::VectorXd residual = basis_one * theta_one;
  residual = y - residual.unaryExpr([](double v) { return expit(v); });

  const Eigen::MatrixXd gram = basis_alpha.transpose() * basis_alpha;
  const auto gram_llt = regularized_llt(gram, "projection Gram matrix", warnings);
  const double gram_log_det = log_det(gram_llt);

  GbicTerms terms;
  for (Eigen::Index j = 0; j < basis_one.cols(); ++j) {
    const Eigen::VectorXd score = residual.cwiseProduct(basis_one.col(j));
    const Eigen::VectorXd gamma =
        gram_llt.solve(basis_alpha.transpose() * score);
    const Eigen::VectorXd eps = score - basis_alpha * gamma;
    const Eigen::VectorXd eps2 = eps.array().square();
    double sigma2 = eps2.sum() / dof;
    if (!(sigma2 > 0.0)) sigma2 = std::numeric_limits<double>::min();

    const double fit = eps2.sum() / sigma2;
    terms.fit += unscaled_fit_term ? fit : fit / md;
    terms.log_variance += md * std::log(sigma2);
    terms.complexity += std::log(md) * complexity_columns;

    // H = (sigma2 G)^{-1} M with M = sum_i eps_i^2 B_i B_i^T
    const Eigen::MatrixXd meat =
        basis_alpha.transpose() * eps2.asDiagonal() * basis_alpha;
    const Eigen::MatrixXd h = gram_llt.solve(meat) / sigma2;
    terms.trace += h.trace();
    const auto meat_llt =
        regularized_llt(meat, "residual-weighted Gram matrix", warnings);
    terms.neg_log_det -= log_det(meat_llt) - gram_log_det -
                         static_cast<double>(p) * std::log(sigma2);
  }
  return terms;
}

OrderSelection select_order_gbic(const GroupSample& labeled,
                                 const BasisSpec& shape,
                                 const GbicOptions& options) {
  const auto n = static_cast<std::size_t>(labeled.size());
  if (options.folds < 2 || n < 2 * static_cast<std::size_t>(options.folds)) {
    throw InsufficientDataError("GBIC order selection needs at least " +
                                std::to_string(2 * options.folds) +
                                " labeled records, have " + std::to_string(n));
  }
  const int max_order = std::clamp(options.max_order, 1, kMaxBasisOrder);
  const std::vector<int> fold = fold_assignment(n, options.folds, options.seed);
  std::vector<std::vector<Eigen::Index>> train(options.folds), test(options.folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < options.folds; ++f) {
      (fold[i] == f ? test : train)[f].push_back(static_cast<Eigen::Index>(i));
    }
  }
  std::size_t smallest = n;
  for (const auto& t : test) smallest = std::min(smallest, t.size());

  const BasisSpec spec_one = standardize_on(
      make_basis_spec(1, shape.continuous, shape.categorical), labeled);
  const Eigen::MatrixXd b_one = build_basis_matrix(spec_one, labeled);

  std::vector<Eigen::VectorXd> theta(options.folds);
  for (int f = 0; f < options.folds; ++f) {
    theta[f] = fit_theta(take_rows(b_one, train[f]), take_rows(labeled.y, train[f]),
                         options.pilot_lambda)
                   .theta;
  }

  OrderSelection out;
  out.mean_gbic.assign(static_cast<std::size_t>(max_order),
                       std::numeric_limits<double>::quiet_NaN());
  const int q1 = static_cast<int>(spec_one.polynomial_inputs());
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int alpha = 1; alpha <= max_order; ++alpha) {
    const int complexity = q1 * alpha;
    const BasisSpec spec =
        make_basis_spec(alpha, shape.continuous, shape.categorical);
    const auto m = static_cast<long>(smallest);
    if (m - complexity - 1 <= 0 || m <= static_cast<long>(spec.dimension())) {
      continue;
    }
    const Eigen::MatrixXd b_alpha =
        build_basis_matrix(standardize_on(spec, labeled), labeled);
    double total = 0.0;
    for (int f = 0; f < options.folds; ++f) {
      total += gbic_criterion(take_rows(b_alpha, test[f]),
                              take_rows(b_one, test[f]),
                              take_rows(labeled.y, test[f]), theta[f],
                              complexity, options.unscaled_fit_term,
                              &out.warnings)
                   .total();
    }
    const double mean = total / options.folds;
    out.mean_gbic[static_cast<std::size_t>(alpha - 1)] = mean;
    if (std::isfinite(mean) && mean < best) {
      best = mean;
      out.order = alpha;
      any = true;
    }
  }
  if (!any) {
    throw InsufficientDataError(
        "no feasible basis order: held-out folds are too small");
  }
  std::sort(out.warnings.begin(), out.warnings.end());
  out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()),
                     out.warnings.end());
  return out;
}

}  // namespace fairaudit
