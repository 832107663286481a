#include "ldp/error.hpp"
#include "ldp/kernel.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace ldp;

namespace {

double at(const JumpKernel& k, double z) { return k.eval(ConstPoint(&z, 1)); }
double moment(const JumpKernel& k, double l) { return k.exp_moment(ConstPoint(&l, 1)); }

// Independent adaptive quadrature of a one-dimensional kernel.
double gk(const JumpKernel& k, double a, double b, auto&& f) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double z) { return at(k, z) * f(z); }, a, b, 12, 1e-13);
}

}  // namespace

TEST_CASE("exp_moment at zero is one for every family") {
  const std::vector<double> grid{-1.0, 0.0, 1.0}, vals{0.0, 1.0, 0.0};
  for (const auto& k : {JumpKernel::generalized_gaussian(1, 0.5, 2.0), JumpKernel::generalized_gaussian(2, 1.0, 1.5),
                        JumpKernel::box(1), JumpKernel::box(2),
                        JumpKernel::tabulated(grid, vals, DecayEnvelope{2.0, 1.0, 2.0})}) {
    const Vector zero = Vector::Zero(k.dim());
    CHECK(k.exp_moment(view(zero)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Gaussian moment generating function is exp(lambda^2/2)") {
  const auto g = JumpKernel::generalized_gaussian(1, 0.5, 2.0);
  CHECK(at(g, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  for (double l : {-3.0, -1.0, 0.5, 1.0, 2.0}) {
    const double exact = std::exp(0.5 * l * l);
    CHECK(std::abs(moment(g, l) / exact - 1.0) < 1e-10);
    // Quadrature oracle.
    CHECK(std::abs(gk(g, -40.0, 40.0, [&](double z) { return std::exp(-l * z); }) / exact - 1.0) < 1e-9);
  }
  CHECK(moment(g, 1.0) == doctest::Approx(1.64872).epsilon(1e-5));
}

TEST_CASE("box moment is 2 sinh(lambda/2)/lambda") {
  const auto b = JumpKernel::box(1);
  CHECK(moment(b, 2.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
  CHECK(moment(b, 2.0) == doctest::Approx(1.17520).epsilon(1e-5));
  const auto b2 = JumpKernel::box(2);
  const Vector l{{1.0, -3.0}};
  CHECK(b2.exp_moment(view(l)) ==
        doctest::Approx(2.0 * std::sinh(0.5) * 2.0 * std::sinh(1.5) / 3.0).epsilon(1e-11));
}

TEST_CASE("generalized Gaussian normalization matches quadrature oracle") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto k = JumpKernel::generalized_gaussian(1, 0.7, p);
    CHECK(gk(k, -30.0, 30.0, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-11));
    for (double l : {-2.0, 1.0, 2.5})
      CHECK(moment(k, l) ==
            doctest::Approx(gk(k, -30.0, 30.0, [&](double z) { return std::exp(-l * z); })).epsilon(1e-9));
  }
}

TEST_CASE("exp_moment gradient and Hessian match finite differences") {
  const auto k = JumpKernel::generalized_gaussian(2, 0.8, 1.7);
  Rng rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 4; ++trial) {
    Vector l{{u(rng), u(rng)}};
    if (l.norm() > 3.0) l *= 3.0 / l.norm();
    const MomentSet m = k.exp_moments(view(l));
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
      Vector lp = l, lm = l;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (k.exp_moment(view(lp)) - k.exp_moment(view(lm))) / (2.0 * h);
      CHECK(std::abs(fd - m.grad[i]) <= 1e-6 * std::max(1.0, std::abs(m.grad[i])));
      const Vector gfd = (k.exp_moment_grad(view(lp)) - k.exp_moment_grad(view(lm))) / (2.0 * h);
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(gfd[j] - m.hess(i, j)) <= 1e-4 * std::max(1.0, std::abs(m.hess(i, j))));
    }
  }
}

TEST_CASE("exp_moment is log-convex along random lines") {
  const auto k = JumpKernel::generalized_gaussian(2, 0.5, 2.5);
  Rng rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Vector a{{u(rng), u(rng)}}, b{{u(rng), u(rng)}};
    const Vector mid = 0.5 * (a + b);
    const double lhs = std::log(k.exp_moment(view(mid)));
    const double rhs = 0.5 * (std::log(k.exp_moment(view(a))) + std::log(k.exp_moment(view(b))));
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("exp_moment stays finite for large tilts") {
  const auto g = JumpKernel::generalized_gaussian(1, 0.5, 2.0);
  CHECK(std::log(moment(g, 25.0)) == doctest::Approx(312.5).epsilon(1e-10));
}

TEST_CASE("halfspace mass") {
  const Vector e1{{1.0}}, m1{{-1.0}};
  CHECK(JumpKernel::generalized_gaussian(1, 0.5, 2.0).halfspace_mass(view(e1)) == doctest::Approx(0.5));
  const Vector a2{{1.0, 0.0}};
  CHECK(JumpKernel::box(2).halfspace_mass(view(a2)) == doctest::Approx(0.5).epsilon(1e-12));
  const auto one_sided = JumpKernel::tabulated({0.0, 0.5, 1.0, 2.0}, {0.0, 1.0, 1.0, 0.0}, DecayEnvelope{4.0, 0.1, 2.0});
  CHECK(one_sided.halfspace_mass(view(e1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one_sided.halfspace_mass(view(e1)) + one_sided.halfspace_mass(view(m1)) == doctest::Approx(1.0));
  const auto g2 = JumpKernel::generalized_gaussian(2, 0.5, 1.5);
  const Vector diag{{std::sqrt(0.5), std::sqrt(0.5)}};
  CHECK(g2.halfspace_mass(view(diag)) == doctest::Approx(0.5).epsilon(1e-9));
  const Vector zero = Vector::Zero(2);
  CHECK_THROWS_AS(g2.halfspace_mass(view(zero)), Error);
}

TEST_CASE("sampler moments and CDF") {
  const int n = 1000000;
  SUBCASE("box mean") {
    const auto b = JumpKernel::box(1);
    Rng rng(1);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += b.sample(rng)[0];
    CHECK(std::abs(s / n) < 3e-3);
  }
  SUBCASE("Gaussian variance") {
    const auto g = JumpKernel::generalized_gaussian(1, 0.5, 2.0);
    Rng rng(2);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = g.sample(rng)[0];
      s += z;
      s2 += z * z;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(var - g.second_moment()(0, 0)) < 1e-2);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  }
  SUBCASE("Kolmogorov distance to the quadrature CDF") {
    const auto tab = JumpKernel::tabulated({-2.0, -1.0, 0.0, 0.5, 3.0}, {0.0, 0.2, 1.0, 0.4, 0.0},
                                           DecayEnvelope{3.0, 0.2, 2.0});
    for (const auto& k : {JumpKernel::generalized_gaussian(1, 0.5, 2.0), JumpKernel::generalized_gaussian(1, 1.0, 1.3),
                          JumpKernel::box(1), tab}) {
      Rng rng(3);
      std::vector<double> draws(static_cast<std::size_t>(n));
      for (auto& z : draws) z = k.sample(rng)[0];
      std::sort(draws.begin(), draws.end());
      double worst = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double x = -4.0 + 8.0 * i / 400;
        double cdf = 0.0, lo = -12.0;
        for (double cut : {-2.0, -1.0, -0.5, 0.0, 0.5, 3.0, 12.0}) {
          const double hi = std::min(cut, x);
          if (hi > lo) cdf += gk(k, lo, hi, [](double) { return 1.0; });
          lo = std::max(lo, hi);
        }
        const double emp = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) / n;
        worst = std::max(worst, std::abs(cdf - emp));
      }
      CHECK(worst < 0.005);
    }
  }
}

TEST_CASE("tilted sampler mean matches the gradient of log M") {
  for (const auto& k : {JumpKernel::generalized_gaussian(1, 0.5, 2.0), JumpKernel::generalized_gaussian(1, 0.8, 1.5),
                        JumpKernel::box(1)}) {
    const Vector l{{1.3}};
    const auto ts = k.tilted(view(l));
    CHECK(ts.log_mgf() == doctest::Approx(std::log(k.exp_moment(view(l)))));
    Rng rng(4);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double z;
      ts.sample(rng, std::span<double>(&z, 1));
      s += z;
      s2 += z * z;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    const double expected = -k.exp_moment_grad(view(l))[0] / k.exp_moment(view(l));
    CHECK(std::abs(mean - expected) < 4.0 * se);
  }
}

TEST_CASE("validation suite passes for the built-in families") {
  for (const auto& k : {JumpKernel::generalized_gaussian(1, 0.5, 2.0), JumpKernel::generalized_gaussian(2, 0.5, 1.5),
                        JumpKernel::box(2)})
    CHECK(k.validate().all_passed());
}

TEST_CASE("tabulated kernel envelope violation is reported") {
  CHECK_THROWS_AS(JumpKernel::tabulated({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, DecayEnvelope{0.5, 1.0, 2.0}), Error);
}

TEST_CASE("kernel table file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ldp_kernel_table";
  std::filesystem::create_directories(dir);
  const auto file = dir / "table.txt";
  std::ofstream(file) << "# z value\n-1 0\n0 2\n1 0\n";
  const auto k = JumpKernel::from_table_file(file.string(), DecayEnvelope{2.0, 0.5, 2.0});
  CHECK(at(k, 0.0) == doctest::Approx(1.0));
  CHECK(at(k, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(JumpKernel::from_table_file((dir / "missing.txt").string(), DecayEnvelope{}), Error);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(JumpKernel::generalized_gaussian(1, 0.5, 1.0), Error);
  CHECK_THROWS_AS(JumpKernel::generalized_gaussian(1, -1.0, 2.0), Error);
  CHECK_THROWS_AS(JumpKernel::generalized_gaussian(0, 1.0, 2.0), Error);
}
