#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fairaudit {

// Group-specific performance metrics. Each disparity is M_0 - M_1.
enum class Metric { TPR, FPR, PPV, NPV, F1, ACC, BS };

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::TPR, Metric::FPR, Metric::PPV, Metric::NPV,
    Metric::F1,  Metric::ACC, Metric::BS};

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);

// Name of the fairness criterion satisfied when the disparity is zero.
std::string_view criterion_name(Metric metric);

enum class Method { Supervised, Infairness, Ji };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

// Conditional means E(Z | A = a) for Z in {Y, D, S^2, SY, DY}.
struct GroupMoments {
  double mu_y = 0.0;
  double mu_d = 0.0;
  double mu_s2 = 0.0;
  double mu_sy = 0.0;
  double mu_dy = 0.0;
  int group = 0;
};

// D = I(s >= c). Throws InputError unless s in [0,1] and c in (0,1).
int classify(double s, double cutoff);

// Unified-notation formula for one group. Throws DegenerateGroupError when
// the metric's denominator vanishes.
double metric_from_moments(Metric metric, const GroupMoments& m);

// M_0 - M_1; the error from a degenerate group names that group.
double disparity(Metric metric, const GroupMoments& m0, const GroupMoments& m1);

// 97.5% standard normal quantile.
inline constexpr double kNormalQuantile975 = 1.96;

enum class Scope { Group0, Group1, Disparity };

std::string_view to_string(Scope scope);

struct MetricEstimate {
  Metric metric = Metric::TPR;
  Scope scope = Scope::Disparity;
  Method method = Method::Supervised;
  double point = 0.0;
  double se = 0.0;  // NaN when the method carries no variance theory
  double ci_low = 0.0;
  double ci_high = 0.0;

  // point +/- 1.96 se; a non-finite se yields NaN bounds.
  static MetricEstimate make(Metric metric, Scope scope, Method method,
                             double point, double se);

  bool has_interval() const noexcept;
  // Two-sided normal-theory p-value for point == 0; NaN without an se.
  double p_value() const noexcept;
};

// Estimates for both groups and their disparity from one method.
struct GroupedEstimate {
  MetricEstimate group0;
  MetricEstimate group1;
  MetricEstimate delta;
};

}  // namespace fairaudit
