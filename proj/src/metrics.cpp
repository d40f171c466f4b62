#include "fairaudit/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fairaudit/error.hpp"

namespace fairaudit {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::TPR: return "TPR";
    case Metric::FPR: return "FPR";
    case Metric::PPV: return "PPV";
    case Metric::NPV: return "NPV";
    case Metric::F1: return "F1";
    case Metric::ACC: return "ACC";
    case Metric::BS: return "BS";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view criterion_name(Metric metric) {
  switch (metric) {
    case Metric::TPR: return "equal opportunity";
    case Metric::FPR: return "predictive equality";
    case Metric::PPV: return "positive predictive parity";
    case Metric::NPV: return "negative predictive parity";
    case Metric::F1: return "F1 score parity";
    case Metric::ACC: return "overall accuracy equality";
    case Metric::BS: return "Brier score parity";
  }
  return "?";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Supervised: return "supervised";
    case Method::Infairness: return "infairness";
    case Method::Ji: return "ji";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Supervised, Method::Infairness, Method::Ji}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Scope scope) {
  switch (scope) {
    case Scope::Group0: return "group0";
    case Scope::Group1: return "group1";
    case Scope::Disparity: return "delta";
  }
  return "?";
}

int classify(double s, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw InputError("cutoff must lie in (0,1), got " + std::to_string(cutoff));
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InputError("score must lie in [0,1], got " + std::to_string(s));
  }
  return s >= cutoff ? 1 : 0;
}

namespace {

double checked_ratio(double num, double den, const GroupMoments& m,
                     Metric metric, const char* moment) {
  if (den == 0.0 || !std::isfinite(den)) {
    throw DegenerateGroupError(
        m.group, moment,
        std::string(to_string(metric)) + " undefined in group " +
            std::to_string(m.group) + ": denominator " + moment + " is zero");
  }
  return num / den;
}

}  // namespace

double metric_from_moments(Metric metric, const GroupMoments& m) {
  switch (metric) {
    case Metric::TPR:
      return checked_ratio(m.mu_dy, m.mu_y, m, metric, "mu_y");
    case Metric::FPR:
      return checked_ratio(m.mu_d - m.mu_dy, 1.0 - m.mu_y, m, metric,
                           "1 - mu_y");
    case Metric::PPV:
      return checked_ratio(m.mu_dy, m.mu_d, m, metric, "mu_d");
    case Metric::NPV:
      return checked_ratio(1.0 - m.mu_d - m.mu_y + m.mu_dy, 1.0 - m.mu_d, m,
                           metric, "1 - mu_d");
    case Metric::F1:
      return checked_ratio(2.0 * m.mu_dy, m.mu_d + m.mu_y, m, metric,
                           "mu_d + mu_y");
    case Metric::ACC:
      return 1.0 - m.mu_y - m.mu_d + 2.0 * m.mu_dy;
    case Metric::BS:
      return m.mu_s2 - 2.0 * m.mu_sy + m.mu_y;
  }
  throw InputError("unknown metric");
}

double disparity(Metric metric, const GroupMoments& m0,
                 const GroupMoments& m1) {
  return metric_from_moments(metric, m0) - metric_from_moments(metric, m1);
}

MetricEstimate MetricEstimate::make(Metric metric, Scope scope, Method method,
                                    double point, double se) {
  MetricEstimate e;
  e.metric = metric;
  e.scope = scope;
  e.method = method;
  e.point = point;
  e.se = se;
  if (std::isfinite(se)) {
    e.ci_low = point - kNormalQuantile975 * se;
    e.ci_high = point + kNormalQuantile975 * se;
  } else {
    e.ci_low = e.ci_high = std::numeric_limits<double>::quiet_NaN();
  }
  return e;
}

bool MetricEstimate::has_interval() const noexcept {
  return std::isfinite(se);
}

double MetricEstimate::p_value() const noexcept {
  if (!std::isfinite(se)) return std::numeric_limits<double>::quiet_NaN();
  if (se == 0.0) return point == 0.0 ? 1.0 : 0.0;
  return std::erfc(std::fabs(point / se) / std::sqrt(2.0));
}

}  // namespace fairaudit
