#include "ldp/environment.hpp"
#include "ldp/error.hpp"
#include "ldp/field_library.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ldp;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

ConstPoint pt(const double& v) { return {&v, 1}; }

fields::TrigPolynomial cos_diff() {
  // 1.5 + 0.5 cos(2 pi (xi - eta))
  return {1, 1.5, {{0.5, {1}, {-1}, false}}};
}

}  // namespace

TEST_CASE("constant field ignores its arguments") {
  const auto f = RateField::constant(1, 2.0);
  const double x = 0.3, y = -4.0;
  CHECK(f.eval_scaled(pt(x), pt(y), 0.01) == 2.0);
  CHECK(f.freeze(pt(x)).is_constant());
  CHECK(f.freeze(pt(x))(pt(x), pt(y)) == 2.0);
}

TEST_CASE("periodic field evaluated at scaled points") {
  const auto f = fields::periodic_trig(cos_diff());
  const double x = 0.3;
  for (double eps : {1.0, 0.1, 0.013}) CHECK(f.eval_scaled(pt(x), pt(x), eps) == doctest::Approx(2.0));
  for (double eps : {0.5, 0.1, 0.02}) {
    const double zero = 0.0, y = eps / 2.0;
    const double oracle = 1.5 + 0.5 * std::cos(kTwoPi * (zero / eps - y / eps));
    CHECK(f.eval_scaled(pt(zero), pt(y), eps) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(f.eval_scaled(pt(zero), pt(y), eps) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("freeze of slow and locally periodic fields") {
  const auto slow = RateField::slow(
      2, [](ConstPoint x, ConstPoint) { return 1.0 + x[0] * x[0]; }, 1.0, 10.0, "1+x1^2");
  const Vector x{{1.0, 0.0}};
  const auto frozen = slow.freeze(view(x));
  CHECK(frozen.is_constant());
  const Vector xi{{0.2, 0.7}};
  CHECK(frozen(view(xi), view(xi)) == doctest::Approx(2.0));

  const fields::TrigPolynomial g{2, 1.0, {{0.3, {1, 0}, {0, 1}, false}, {0.2, {0, 2}, {}, true}}};
  const auto lp = RateField::locally_periodic(
      2, [g](ConstPoint x, ConstPoint, ConstPoint a, ConstPoint b) { return (1.0 + x[0] * x[0]) * g(a, b); }, 0.5,
      3.0, "(1+x1^2) g");
  const auto fl = lp.freeze(view(x));
  double worst = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int k = 0; k < 16; ++k)
        for (int l = 0; l < 16; ++l) {
          const Vector a{{i / 16.0, j / 16.0}}, b{{k / 16.0, l / 16.0}};
          worst = std::max(worst, std::abs(fl(view(a), view(b)) - 2.0 * g(view(a), view(b))));
        }
  CHECK(worst < 1e-14);
}

TEST_CASE("bounds violations surface as validation errors") {
  const auto bad = RateField::periodic(
      1, [](ConstPoint xi, ConstPoint) { return 1.0 + std::cos(kTwoPi * xi[0]); }, 0.5, 2.0, "bad");
  const double zero = 0.0, half = 0.5;
  CHECK(bad.eval_scaled(pt(zero), pt(zero), 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(bad.eval_scaled(pt(half), pt(zero), 1.0), Error);
  CHECK_FALSE(bad.validate().all_passed());
}

TEST_CASE("validation suite on library fields") {
  CHECK(fields::periodic_trig(cos_diff()).validate().all_passed());
  CHECK(fields::diag_quadratic(1, 1.0, 1.0, 10.0).validate().all_passed());
  const fields::TrigPolynomial g{1, 1.0, {{0.4, {1}, {}, false}}};
  CHECK(fields::quadratic_times_trig(1.0, 1.0, 10.0, g).validate().all_passed());
  const auto sep = fields::separable(fields::CuspProfile(1, 0.05, 0.25, {0.5}),
                                     fields::PeakProfile(1, 0.01, 0.1, {0.25}));
  CHECK(sep.validate().all_passed());
}

TEST_CASE("non-periodic closure fails the periodicity check") {
  const auto f = RateField::periodic(
      1, [](ConstPoint xi, ConstPoint) { return 1.5 + 0.4 * std::sin(xi[0]); }, 1.0, 2.0, "aperiodic");
  CHECK_FALSE(f.validate().all_passed());
}

TEST_CASE("discontinuous slow field trips the continuity probe") {
  const auto f = RateField::slow(
      1, [](ConstPoint x, ConstPoint) { return std::fmod(std::abs(x[0]) / 1.5e-3, 1.0) < 0.5 ? 1.0 : 3.0; }, 1.0,
      3.0, "jumpy");
  CHECK_FALSE(f.validate().all_passed());
}

TEST_CASE("peak profile has unit integral and requested plateau") {
  const fields::PeakProfile p(1, 0.01, 0.1, {0.25});
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = -0.5 + (i + 0.5) / n;
    s += p(pt(z)) / n;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  const double centre = 0.25, floor_pt = -0.3;
  CHECK(p(pt(centre)) == doctest::Approx(p.alpha2()));
  CHECK(p(pt(floor_pt)) == doctest::Approx(0.01));
}

TEST_CASE("cusp ratio norm in one dimension") {
  const fields::CuspProfile b(1, 0.05, 0.25, {0.5});
  // Midpoint-rule oracle of ||b / (b - b_min)||_2 on [0, 1).
  double s = 0.0;
  const int n = 4000000;
  for (int i = 0; i < n; ++i) {
    const double xi = (i + 0.5) / n;
    const double v = b(pt(xi));
    s += std::pow(v / (v - 0.05), 2) / n;
  }
  CHECK(b.ratio_l2_norm() == doctest::Approx(std::sqrt(s)).epsilon(1e-3));
  CHECK(b.ratio_l2_norm() < 2.0);
}
