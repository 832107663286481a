#include "ldp/error.hpp"
#include "ldp/field_library.hpp"
#include "ldp/legendre.hpp"

#include <doctest.h>

#include <cmath>

using namespace ldp;

namespace {

JumpKernel gaussian(int d = 1) { return JumpKernel::generalized_gaussian(d, 0.5, 2.0); }

double L1(const Lagrangian& L, double z, ConstPoint x = {}) { return L.value(x, ConstPoint(&z, 1)); }

// Dense grid search of max_lambda (lambda zeta - exp(lambda^2/2) + 1) over [-4, 4], step 1e-5,
// refined by a parabola through the best three points.
double gaussian_oracle(double zeta) {
  auto g = [&](double l) { return l * zeta - std::exp(0.5 * l * l) + 1.0; };
  double best = -INFINITY, arg = 0.0;
  for (long i = -400000; i <= 400000; ++i) {
    const double l = 1e-5 * static_cast<double>(i);
    const double v = g(l);
    if (v > best) best = v, arg = l;
  }
  const double h = 1e-5, a = g(arg - h), b = g(arg), c = g(arg + h);
  return b - (a - c) * (a - c) / (8.0 * (a - 2.0 * b + c));
}

fields::TrigPolynomial skew() { return {1, 1.0, {{0.3, {1}, {}, true}, {0.2, {1}, {-1}, false}, {0.1, {2}, {1}, false}}}; }

}  // namespace

TEST_CASE("Gaussian Lagrangian matches the grid-search oracle") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  const double oracle = gaussian_oracle(1.0);
  CHECK(oracle == doctest::Approx(0.4252251530).epsilon(1e-9));
  const double one = 1.0;
  const auto v = L({}, ConstPoint(&one, 1));
  CHECK(std::abs(v.value - oracle) < 1e-4);
  CHECK(std::abs(v.value - oracle) < 1e-9);
  CHECK(v.exposed);
  CHECK_FALSE(v.on_linear_segment);
  CHECK(v.argmax[0] == doctest::Approx(0.753089).epsilon(1e-5));
  CHECK(L1(L, -2.0) == doctest::Approx(gaussian_oracle(-2.0)).epsilon(1e-9));
}

TEST_CASE("L vanishes at zeta star and is nonnegative") {
  const JumpKernel tab = [] {
    std::vector<double> g, v;
    for (int i = -300; i <= 300; ++i) {
      g.push_back(0.02 * i);
      v.push_back(std::exp(-0.5 * (0.02 * i + 1.0) * (0.02 * i + 1.0)));
    }
    return JumpKernel::tabulated(g, v, DecayEnvelope{0.66, 0.25, 2.0});
  }();
  for (const auto& k : {gaussian(), tab}) {
    const Hamiltonian h(k, fields::periodic_trig(skew()));
    const Lagrangian L(h);
    const Vector zs = L.zeta_star({});
    CHECK(L.value({}, view(zs)) < 1e-8);
    for (int i = -10; i <= 10; ++i) CHECK(L1(L, zs[0] + 0.2 * i) >= 0.0);
  }
}

TEST_CASE("time-scaled Lagrangian") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  const double two = 2.0;
  CHECK(L.l_t({}, ConstPoint(&two, 1), 2.0) == doctest::Approx(2.0 * 0.4252251530).epsilon(1e-8));
  const Vector zs = L.zeta_star({});
  const Vector tz = 3.0 * zs;
  CHECK(std::abs(L.l_t({}, view(tz), 3.0)) < 1e-10);
  Rng rng(2);
  std::uniform_real_distribution<double> ut(0.2, 3.0), uz(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double t = ut(rng), z = uz(rng);
    // sup_lambda (lambda z - t H(lambda)) computed directly.
    const Hamiltonian ht(gaussian(), RateField::constant(1, t));
    const double direct = Lagrangian(ht).value({}, ConstPoint(&z, 1));
    CHECK(std::abs(L.l_t({}, ConstPoint(&z, 1), t) - direct) < 1e-8);
  }
}

TEST_CASE("slow regime Lagrangian scales with Lambda(x,x)") {
  const Hamiltonian h(gaussian(), fields::diag_quadratic(1, 1.0, 1.0, 10.0));
  const Lagrangian L(h);
  const double x = 1.0;
  CHECK(L1(L, 1.0, ConstPoint(&x, 1)) == doctest::Approx(2.0 * gaussian_oracle(0.5)).epsilon(1e-8));
}

TEST_CASE("Young-Fenchel inequality and convexity") {
  const Hamiltonian h(gaussian(), fields::periodic_trig(skew()), HamiltonianSettings{32, {}, {}});
  const Lagrangian L(h);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double l = u(rng), z = u(rng);
    CHECK(l * z <= L1(L, z) + h.value({}, ConstPoint(&l, 1)).value + 1e-9);
  }
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(L1(L, 0.5 * (a + b)) <= 0.5 * (L1(L, a) + L1(L, b)) + 1e-8);
  }
}

TEST_CASE("superlinear growth of L") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  for (double sign : {1.0, -1.0}) {
    double prev = -INFINITY;
    for (double r : {2.0, 4.0, 8.0, 16.0, 32.0}) {
      const double ratio = L1(L, sign * r) / r;
      CHECK(ratio > prev);
      prev = ratio;
    }
  }
}

TEST_CASE("biconjugation recovers H") {
  const Hamiltonian h(gaussian(), fields::periodic_trig(skew()), HamiltonianSettings{32, {}, {}});
  const Lagrangian L(h);
  for (double l : {-1.0, -0.3, 0.4, 1.1}) {
    // sup_zeta (l zeta - L(zeta)) by golden section around grad H(l).
    const double c = h.grad({}, ConstPoint(&l, 1))[0];
    double a = c - 1.0, b = c + 1.0;
    auto f = [&](double z) { return l * z - L1(L, z); };
    for (int it = 0; it < 80; ++it) {
      const double m1 = b - 0.618034 * (b - a), m2 = a + 0.618034 * (b - a);
      (f(m1) > f(m2) ? b : a) = f(m1) > f(m2) ? m2 : m1;
    }
    CHECK(std::abs(f(0.5 * (a + b)) - h.value({}, ConstPoint(&l, 1)).value) < 1e-4);
  }
}

TEST_CASE("linear segment of L in the example with Gamma != R^d") {
  const Hamiltonian h(JumpKernel::box(1), fields::separable(fields::CuspProfile(1, 0.05, 0.25, {0.5}),
                                                             fields::PeakProfile(1, 0.01, 0.1, {0.25})));
  const Lagrangian L(h);
  std::vector<LagrangianValue> v;
  for (double z : {-1e-4, -2e-4, -3e-4}) v.push_back(L({}, ConstPoint(&z, 1)));
  for (const auto& p : v) {
    CHECK(p.on_linear_segment);
    CHECK_FALSE(p.exposed);
  }
  // Three collinear points: second difference vanishes.
  CHECK(std::abs(v[0].value - 2.0 * v[1].value + v[2].value) < 1e-5);
  const double zero = 0.0;
  CHECK(L1(L, zero) == doctest::Approx(h.g_min({})).epsilon(1e-6));
}

TEST_CASE("tail growth matches the envelope prediction") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  std::vector<double> radii;
  for (double r = 1e20; r <= 1.01e140; r *= 1e20) radii.push_back(r);
  const double dir = 1.0;
  const TailFit fit = tail_diagnostic(L, ConstPoint(&dir, 1), radii);
  CHECK(std::abs(fit.power - 1.0) < 0.05);
  CHECK(std::abs(fit.log_exponent - 0.5) < 0.1);
  CHECK(std::abs(fit.plateau / fit.predicted_plateau - 1.0) < 0.25);
  CHECK(std::abs(fit.small_zeta_rel_error) < 0.1);
}
