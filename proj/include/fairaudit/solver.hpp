#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace fairaudit {

double expit(double x) noexcept;
double logit(double p) noexcept;

// Q(theta; lambda) = n^{-1} B^T {y - expit(B theta)} - lambda theta
Eigen::VectorXd penalized_score(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& y,
                                const Eigen::VectorXd& theta, double lambda);

// dQ/dtheta = -(n^{-1} B^T diag(g'(B theta)) B + lambda I)
Eigen::MatrixXd penalized_score_jacobian(const Eigen::MatrixXd& basis,
                                         const Eigen::VectorXd& theta,
                                         double lambda);

struct SolverOptions {
  double tolerance = 1e-8;  // on the max-norm of Q
  int max_iterations = 200;
  int max_halvings = 60;
};

struct FitResult {
  Eigen::VectorXd theta;
  int iterations = 0;
  double residual = 0.0;  // max-norm of Q at theta
};

// Root of the penalized score by damped Newton from theta = 0. Each step is
// halved until the Euclidean norm of Q decreases (the Newton direction is a
// descent direction for that norm). Throws SolverError on non-convergence or
// a singular Jacobian.
FitResult fit_theta(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y,
                    double lambda, const SolverOptions& options = {});

// Mean binomial deviance of probabilities expit(B theta) against y.
double mean_binomial_deviance(const Eigen::MatrixXd& basis,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& theta);

// fold[i] in [0, folds); sizes differ by at most one; fixed by the seed.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

// max_j |n^{-1} sum_i B_ij (y_i - ybar)| over the non-intercept columns.
double lambda_scale(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y);

struct LambdaGridOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  int grid_size = 20;
  double eta_min = 1.05;
  double eta_max = 2.5;
};

// Candidates are lambda_scale * n^{-eta} for eta on an even grid, stored in
// decreasing order.
std::vector<double> lambda_grid(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& y,
                                const LambdaGridOptions& options);

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> candidates;    // decreasing
  std::vector<double> cv_deviance;   // NaN where a fold failed to converge
};

// k-fold CV over lambda_grid minimizing held-out deviance; exact ties go to
// the larger penalty. Requires n >= 2k.
LambdaSelection select_lambda_cv(const Eigen::MatrixXd& basis,
                                 const Eigen::VectorXd& y,
                                 const LambdaGridOptions& options = {});

// Rows of m listed in idx.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& idx);
Eigen::VectorXd take_rows(const Eigen::VectorXd& v,
                          const std::vector<Eigen::Index>& idx);

}  // namespace fairaudit
