#include "fairaudit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>

#include "fairaudit/error.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit {

double expit(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

namespace {

Eigen::VectorXd fitted(const Eigen::MatrixXd& basis,
                       const Eigen::VectorXd& theta) {
  Eigen::VectorXd eta = basis * theta;
  return eta.unaryExpr([](double v) { return expit(v); });
}

}  // namespace

Eigen::VectorXd penalized_score(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& y,
                                const Eigen::VectorXd& theta, double lambda) {
  const double n = static_cast<double>(basis.rows());
  return basis.transpose() * (y - fitted(basis, theta)) / n - lambda * theta;
}

Eigen::MatrixXd penalized_score_jacobian(const Eigen::MatrixXd& basis,
                                         const Eigen::VectorXd& theta,
                                         double lambda) {
  const double n = static_cast<double>(basis.rows());
  const Eigen::VectorXd m = fitted(basis, theta);
  const Eigen::VectorXd weight = (m.array() * (1.0 - m.array())).matrix();
  Eigen::MatrixXd info = basis.transpose() * weight.asDiagonal() * basis / n;
  info.diagonal().array() += lambda;
  return -info;
}

FitResult fit_theta(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y,
                    double lambda, const SolverOptions& options) {
  if (basis.rows() == 0) {
    throw InsufficientDataError("fit_theta needs at least one row");
  }
  if (basis.rows() != y.size()) {
    throw InputError("basis rows and outcome length differ");
  }
  if (!(lambda >= 0.0)) throw InputError("penalty must be non-negative");

  const Eigen::Index p = basis.cols();
  FitResult out;
  out.theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd q = penalized_score(basis, y, out.theta, lambda);
  double qnorm = q.norm();

  for (int it = 0; it < options.max_iterations; ++it) {
    out.residual = q.lpNorm<Eigen::Infinity>();
    if (out.residual <= options.tolerance) {
      out.iterations = it;
      return out;
    }
    const Eigen::MatrixXd info =
        -penalized_score_jacobian(basis, out.theta, lambda);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    const auto& pivots = ldlt.vectorD();
    const double largest = pivots.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(largest > 0.0) ||
        pivots.minCoeff() <= largest * 1e-14) {
      throw SolverError(
          lambda == 0.0
              ? "singular Jacobian at lambda = 0; use a positive penalty"
              : "singular Jacobian",
          out.residual);
    }
    const Eigen::VectorXd step = ldlt.solve(q);

    double t = 1.0;
    bool improved = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const Eigen::VectorXd candidate = out.theta + t * step;
      Eigen::VectorXd cq = penalized_score(basis, y, candidate, lambda);
      const double cnorm = cq.norm();
      if (std::isfinite(cnorm) && cnorm < qnorm) {
        out.theta = candidate;
        q = std::move(cq);
        qnorm = cnorm;
        improved = true;
        break;
      }
    }
    if (!improved) {
      out.iterations = it + 1;
      break;
    }
    out.iterations = it + 1;
  }
  out.residual = q.lpNorm<Eigen::Infinity>();
  if (out.residual <= options.tolerance) return out;
  throw SolverError("Newton solver did not converge after " +
                        std::to_string(out.iterations) +
                        " iterations; max-norm of score " +
                        std::to_string(out.residual),
                    out.residual);
}

double mean_binomial_deviance(const Eigen::MatrixXd& basis,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& theta) {
  constexpr double kClip = 1e-15;
  const Eigen::VectorXd m = fitted(basis, theta);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double p = std::clamp(m[i], kClip, 1.0 - kClip);
    total -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
  }
  return total / static_cast<double>(y.size());
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("need at least 2 folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) {
    fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return fold;
}

double lambda_scale(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(basis.rows());
  const Eigen::VectorXd centered = y.array() - y.mean();
  double best = 0.0;
  for (Eigen::Index j = 1; j < basis.cols(); ++j) {
    best = std::max(best, std::fabs(basis.col(j).dot(centered) / n));
  }
  return best;
}

std::vector<double> lambda_grid(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& y,
                                const LambdaGridOptions& options) {
  if (options.grid_size < 1) throw InputError("lambda grid must be non-empty");
  double scale = lambda_scale(basis, y);
  // A constant outcome has no score signal; fall back to a unit scale.
  if (!(scale > 0.0)) scale = 1.0;
  const double n = static_cast<double>(basis.rows());
  std::vector<double> grid(static_cast<std::size_t>(options.grid_size));
  for (int k = 0; k < options.grid_size; ++k) {
    const double eta =
        options.grid_size == 1
            ? options.eta_min
            : options.eta_min + (options.eta_max - options.eta_min) * k /
                                    (options.grid_size - 1);
    grid[static_cast<std::size_t>(k)] = scale * std::pow(n, -eta);
  }
  return grid;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& idx) {
  return m(idx, Eigen::all);
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v,
                          const std::vector<Eigen::Index>& idx) {
  return v(idx);
}

LambdaSelection select_lambda_cv(const Eigen::MatrixXd& basis,
                                 const Eigen::VectorXd& y,
                                 const LambdaGridOptions& options) {
  const auto n = static_cast<std::size_t>(basis.rows());
  if (options.folds < 2 || n < 2 * static_cast<std::size_t>(options.folds)) {
    throw InsufficientDataError(
        "lambda cross-validation needs at least 2k = " +
        std::to_string(2 * options.folds) + " rows, have " + std::to_string(n));
  }
  LambdaSelection out;
  out.candidates = lambda_grid(basis, y, options);
  out.cv_deviance.assign(out.candidates.size(),
                         std::numeric_limits<double>::quiet_NaN());

  const std::vector<int> fold = fold_assignment(n, options.folds, options.seed);
  std::vector<std::vector<Eigen::Index>> train(options.folds), test(options.folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < options.folds; ++f) {
      (fold[i] == f ? test : train)[f].push_back(static_cast<Eigen::Index>(i));
    }
  }
  std::vector<Eigen::MatrixXd> train_b, test_b;
  std::vector<Eigen::VectorXd> train_y, test_y;
  for (int f = 0; f < options.folds; ++f) {
    train_b.push_back(take_rows(basis, train[f]));
    train_y.push_back(take_rows(y, train[f]));
    test_b.push_back(take_rows(basis, test[f]));
    test_y.push_back(take_rows(y, test[f]));
  }

  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t c = 0; c < out.candidates.size(); ++c) {
    double total = 0.0;
    bool ok = true;
    for (int f = 0; f < options.folds && ok; ++f) {
      try {
        const FitResult fit = fit_theta(train_b[f], train_y[f], out.candidates[c]);
        total += mean_binomial_deviance(test_b[f], test_y[f], fit.theta) *
                 static_cast<double>(test_y[f].size());
      } catch (const SolverError&) {
        ok = false;
      }
    }
    if (!ok) continue;
    const double dev = total / static_cast<double>(n);
    out.cv_deviance[c] = dev;
    // candidates run from largest to smallest, so strict < keeps ties large
    if (dev < best) {
      best = dev;
      out.lambda = out.candidates[c];
      any = true;
    }
  }
  if (!any) {
    throw SolverError("no lambda candidate converged in every fold",
                      std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace fairaudit
