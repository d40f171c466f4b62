#include <cmath>

#include "doctest.h"
#include "fairaudit/error.hpp"
#include "fairaudit/metrics.hpp"

using namespace fairaudit;

TEST_CASE("classify uses an inclusive cutoff") {
  CHECK(classify(0.7, 0.5) == 1);
  CHECK(classify(0.5, 0.5) == 1);
  CHECK(classify(0.49, 0.5) == 0);
  CHECK_THROWS_AS(classify(1.2, 0.5), InputError);
  CHECK_THROWS_AS(classify(0.3, 1.0), InputError);
}

TEST_CASE("metric_from_moments") {
  GroupMoments m;
  m.mu_y = 0.5;
  m.mu_dy = 0.4;
  m.mu_d = 0.6;
  CHECK(metric_from_moments(Metric::TPR, m) == doctest::Approx(0.8));

  GroupMoments perfect;
  perfect.mu_y = perfect.mu_d = perfect.mu_dy = 0.3;
  CHECK(metric_from_moments(Metric::ACC, perfect) == doctest::Approx(1.0));

  GroupMoments flat;
  flat.mu_s2 = 0.25;
  flat.mu_sy = 0.25;
  flat.mu_y = 0.5;
  CHECK(metric_from_moments(Metric::BS, flat) == doctest::Approx(0.25));

  // 10 records: 2 TP, 1 FP, 1 FN, 6 TN.
  GroupMoments toy;
  toy.mu_dy = 0.2;
  toy.mu_d = 0.3;
  toy.mu_y = 0.3;
  const double tp = 2, fp = 1, fn = 1;
  const double f1 = 2 * tp / (2 * tp + fp + fn);
  CHECK(metric_from_moments(Metric::F1, toy) == doctest::Approx(f1).epsilon(1e-12));
  CHECK(f1 == doctest::Approx(0.666667).epsilon(1e-6));
}

TEST_CASE("zero denominators raise a degenerate-group error") {
  GroupMoments m;
  m.mu_y = 0.0;
  m.group = 1;
  CHECK_THROWS_AS(metric_from_moments(Metric::TPR, m), DegenerateGroupError);
  m.mu_y = 1.0;
  CHECK_THROWS_AS(metric_from_moments(Metric::FPR, m), DegenerateGroupError);
  m.mu_d = 0.0;
  CHECK_THROWS_AS(metric_from_moments(Metric::PPV, m), DegenerateGroupError);
  m.mu_d = 1.0;
  CHECK_THROWS_AS(metric_from_moments(Metric::NPV, m), DegenerateGroupError);
  try {
    GroupMoments z;
    z.group = 1;
    metric_from_moments(Metric::TPR, z);
  } catch (const DegenerateGroupError& e) {
    CHECK(e.group() == 1);
  }
}

TEST_CASE("disparity is group 0 minus group 1") {
  GroupMoments m0, m1;
  m0.mu_y = m1.mu_y = 0.5;
  m0.mu_dy = m1.mu_dy = 0.4;
  CHECK(disparity(Metric::TPR, m0, m1) == 0.0);

  GroupMoments perfect, worse;
  perfect.mu_y = perfect.mu_d = perfect.mu_dy = 0.3;
  worse.mu_y = 0.3;
  worse.mu_d = 0.3;
  worse.mu_dy = 0.25;  // ACC 0.9
  CHECK(disparity(Metric::ACC, perfect, worse) == doctest::Approx(0.1));

  GroupMoments b0, b1;
  b0.mu_s2 = 0.10;  // BS 0.10
  b1.mu_s2 = 0.25;  // BS 0.25
  CHECK(disparity(Metric::BS, b0, b1) == doctest::Approx(-0.15));
  CHECK(disparity(Metric::BS, b1, b0) == -disparity(Metric::BS, b0, b1));
}

TEST_CASE("names round-trip") {
  for (Metric m : kAllMetrics) CHECK(parse_metric(to_string(m)) == m);
  for (Method m : {Method::Supervised, Method::Infairness, Method::Ji}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_metric("AUC").has_value());
  CHECK(criterion_name(Metric::TPR) == "equal opportunity");
}

TEST_CASE("intervals and p-values") {
  const auto e =
      MetricEstimate::make(Metric::TPR, Scope::Disparity, Method::Supervised,
                           0.1, 0.05);
  CHECK(e.ci_low == doctest::Approx(0.1 - 1.96 * 0.05));
  CHECK(e.ci_high == doctest::Approx(0.1 + 1.96 * 0.05));
  CHECK(e.p_value() == doctest::Approx(std::erfc(2.0 / std::sqrt(2.0))));
  const auto point_only = MetricEstimate::make(
      Metric::TPR, Scope::Disparity, Method::Ji, 0.1, std::nan(""));
  CHECK_FALSE(point_only.has_interval());
  CHECK(std::isnan(point_only.p_value()));
}
