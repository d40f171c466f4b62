#include "fairaudit/imputation.hpp"

#include <string>

#include "fairaudit/error.hpp"
#include "fairaudit/gbic.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/solver.hpp"

namespace fairaudit {

ImputationModel fit_imputation_model(const GroupSample& labeled, int a,
                                     const ImputationConfig& config) {
  if (labeled.size() == 0) {
    throw DegenerateGroupError(
        a, "n_a", "group " + std::to_string(a) + " has no labeled records");
  }
  ImputationModel model;
  model.group = a;

  const BasisSpec shape =
      make_basis_spec(1, config.continuous, config.categorical);
  int order = 1;
  if (config.order) {
    order = *config.order;
  } else {
    GbicOptions gbic;
    gbic.folds = config.folds;
    gbic.seed = Rng::mix(config.seed ^ (0xb1c0ULL + static_cast<unsigned>(a)));
    gbic.max_order = config.max_order;
    gbic.pilot_lambda = config.pilot_lambda;
    gbic.unscaled_fit_term = config.gbic_unscaled_fit_term;
    OrderSelection sel = select_order_gbic(labeled, shape, gbic);
    order = sel.order;
    model.gbic = std::move(sel.mean_gbic);
    model.warnings = std::move(sel.warnings);
  }
  model.basis = standardize_on(
      make_basis_spec(order, config.continuous, config.categorical), labeled);
  const Eigen::MatrixXd b = build_basis_matrix(model.basis, labeled);

  if (config.lambda) {
    model.lambda = *config.lambda;
  } else {
    LambdaGridOptions cv;
    cv.folds = config.folds;
    cv.seed = Rng::mix(config.seed ^ (0x1a3bdaULL + static_cast<unsigned>(a)));
    LambdaSelection sel = select_lambda_cv(b, labeled.y, cv);
    model.lambda = sel.lambda;
    model.cv_deviance = std::move(sel.cv_deviance);
  }
  const FitResult fit = fit_theta(b, labeled.y, model.lambda);
  model.theta = fit.theta;
  model.iterations = fit.iterations;
  model.residual = fit.residual;
  return model;
}

ImputationModel fit_imputation_model(const AuditDataset& data, int a,
                                     const ImputationConfig& config) {
  return fit_imputation_model(data.labeled(a), a, config);
}

double impute(const ImputationModel& model, const AuditRecord& record,
              double cutoff) {
  const Eigen::VectorXd b = build_basis(model.basis, record, cutoff);
  if (b.size() != model.theta.size()) {
    throw InputError("record does not match the imputation model's basis");
  }
  return expit(b.dot(model.theta));
}

Eigen::VectorXd impute(const ImputationModel& model, const GroupSample& sample) {
  const Eigen::MatrixXd b = build_basis_matrix(model.basis, sample);
  if (b.cols() != model.theta.size()) {
    throw InputError("sample does not match the imputation model's basis");
  }
  Eigen::VectorXd eta = b * model.theta;
  return eta.unaryExpr([](double v) { return expit(v); });
}

}  // namespace fairaudit
