#include "ldp/error.hpp"
#include "ldp/field_library.hpp"
#include "ldp/hamiltonian.hpp"
#include "ldp/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <thread>

using namespace ldp;

namespace {

JumpKernel gaussian(int d = 1) { return JumpKernel::generalized_gaussian(d, 0.5, 2.0); }

double h1(const Hamiltonian& h, double l, ConstPoint x = {}) {
  const Vector v = Vector::Constant(1, l);
  return h.value(x, view(v)).value;
}

fields::TrigPolynomial skew() { return {1, 1.0, {{0.3, {1}, {}, true}, {0.2, {1}, {-1}, false}, {0.1, {2}, {1}, false}}}; }

}  // namespace

TEST_CASE("value at zero vanishes in every regime") {
  const fields::TrigPolynomial g{1, 1.0, {{0.4, {1}, {}, false}}};
  const double x = 0.7;
  for (const auto& f : {RateField::constant(1, 2.0), fields::periodic_trig(skew()), fields::diag_quadratic(1, 1.0, 1.0, 10.0),
                        fields::quadratic_times_trig(1.0, 1.0, 10.0, g)}) {
    const Hamiltonian h(gaussian(), f);
    CHECK(std::abs(h1(h, 0.0, h.x_dependent() ? ConstPoint(&x, 1) : ConstPoint{})) < 1e-10);
  }
}

TEST_CASE("closed forms") {
  const Hamiltonian slow(gaussian(), fields::diag_quadratic(1, 1.0, 1.0, 10.0));
  const double x = 1.0;
  CHECK(h1(slow, 1.0, ConstPoint(&x, 1)) == doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-10));
  CHECK(h1(slow, 1.0, ConstPoint(&x, 1)) == doctest::Approx(1.29744).epsilon(1e-5));
  const Hamiltonian c2(gaussian(), RateField::constant(1, 2.0));
  const Vector one = Vector::Constant(1, 1.0), zero = Vector::Zero(1);
  CHECK(c2.grad({}, view(one))[0] == doctest::Approx(2.0 * std::exp(0.5)).epsilon(1e-9));
  CHECK(c2.grad({}, view(one))[0] == doctest::Approx(3.29744).epsilon(1e-5));
  CHECK(std::abs(c2.grad({}, view(zero))[0]) < 1e-12);
  CHECK(c2.backing() == Hamiltonian::Backing::ClosedForm);
  CHECK(slow.backing() == Hamiltonian::Backing::Slow);
}

TEST_CASE("periodic gradient matches finite differences") {
  const Hamiltonian h(gaussian(), fields::periodic_trig(skew()));
  for (double l : {-1.0, 0.3, 1.5}) {
    const Vector v = Vector::Constant(1, l);
    const double fd = (h1(h, l + 1e-4) - h1(h, l - 1e-4)) / 2e-4;
    CHECK(std::abs(h.grad({}, view(v))[0] - fd) < 1e-5);
  }
}

TEST_CASE("flat branch outside Gamma") {
  GammaCandidate c;
  const Hamiltonian h(JumpKernel::box(1), c.field(), HamiltonianSettings{128, {}, {}});
  const Vector l0 = Vector::Constant(1, 10.6);
  const HValue v = h.value({}, view(l0));
  CHECK_FALSE(v.in_gamma);
  CHECK(v.value == doctest::Approx(-h.g_min({})));
  CHECK_THROWS_AS(h.grad({}, view(l0)), Error);
}

TEST_CASE("convexity and superlinearity") {
  const Hamiltonian h(gaussian(2), fields::periodic_trig({2, 1.0, {{0.3, {1, 0}, {}, false}, {0.2, {0, 1}, {1, 0}, true}}}),
                      HamiltonianSettings{12, {}, {}});
  Rng rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Vector a{{u(rng), u(rng)}}, b{{u(rng), u(rng)}};
    const Vector m = 0.5 * (a + b);
    CHECK(h.value({}, view(m)).value <= 0.5 * (h.value({}, view(a)).value + h.value({}, view(b)).value) + 1e-8);
  }
  for (int i = 0; i < 5; ++i) {
    Vector dir{{u(rng), u(rng)}};
    dir.normalize();
    double prev = -INFINITY;
    for (double r : {2.0, 3.0, 4.0, 5.0}) {
      const Vector l = r * dir;
      const double ratio = h.value({}, view(l)).value / r;
      CHECK(ratio > prev);
      prev = ratio;
    }
  }
}

TEST_CASE("symmetric kernel and symmetric field give an even, nonnegative H") {
  const Hamiltonian h(gaussian(), fields::periodic_trig({1, 1.5, {{0.5, {1}, {-1}, false}, {0.2, {1}, {1}, false}}}));
  for (double l : {0.3, 1.0, 2.2}) {
    CHECK(std::abs(h1(h, l) - h1(h, -l)) < 1e-8);
    CHECK(h1(h, l) >= 0.0);
  }
}

TEST_CASE("disk cache returns identical values") {
  const auto dir = std::filesystem::temp_directory_path() / "ldp_h_cache";
  std::filesystem::remove_all(dir);
  HamiltonianSettings s;
  s.grid_n = 32;
  s.cache_dir = dir;
  const double first = h1(Hamiltonian(gaussian(), fields::periodic_trig(skew()), s), 0.77);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) > 0);
  const double second = h1(Hamiltonian(gaussian(), fields::periodic_trig(skew()), s), 0.77);
  CHECK(first == second);
  s.cache_dir.reset();
  CHECK(h1(Hamiltonian(gaussian(), fields::periodic_trig(skew()), s), 0.77) == doctest::Approx(first).epsilon(1e-13));
}

TEST_CASE("concurrent queries agree with serial ones") {
  const Hamiltonian h(gaussian(), fields::periodic_trig(skew()), HamiltonianSettings{32, {}, {}});
  std::vector<double> serial, parallel(16);
  const Hamiltonian h2(gaussian(), fields::periodic_trig(skew()), HamiltonianSettings{32, {}, {}});
  for (int i = 0; i < 16; ++i) serial.push_back(h2.value({}, view(Vector(Vector::Constant(1, 0.1 * i)))).value);
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 4; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < 16; i += 4) parallel[static_cast<std::size_t>(i)] = h.value({}, view(Vector(Vector::Constant(1, 0.1 * i)))).value;
      });
  }
  for (int i = 0; i < 16; ++i) CHECK(parallel[static_cast<std::size_t>(i)] == serial[static_cast<std::size_t>(i)]);
}

TEST_CASE("locally periodic Hamiltonian freezes the slow variable") {
  const fields::TrigPolynomial g{1, 1.0, {{0.4, {1}, {}, false}}};
  const Hamiltonian lp(gaussian(), fields::quadratic_times_trig(1.0, 1.0, 10.0, g));
  const Hamiltonian frozen(gaussian(), fields::periodic_trig({1, 2.0, {{0.8, {1}, {}, false}}}));
  const double x = 1.0;
  CHECK(h1(lp, 0.9, ConstPoint(&x, 1)) == doctest::Approx(h1(frozen, 0.9)).epsilon(1e-10));
}
