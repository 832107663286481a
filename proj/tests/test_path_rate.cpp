#include "ldp/error.hpp"
#include "ldp/field_library.hpp"
#include "ldp/path_rate.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ldp;

namespace {

JumpKernel gaussian() { return JumpKernel::generalized_gaussian(1, 0.5, 2.0); }

JumpKernel shifted_gaussian() {
  std::vector<double> g, v;
  for (int i = -400; i <= 400; ++i) {
    g.push_back(0.02 * i);
    v.push_back(std::exp(-0.5 * (0.02 * i + 1.0) * (0.02 * i + 1.0)));
  }
  return JumpKernel::tabulated(g, v, DecayEnvelope{0.66, 0.25, 2.0});
}

Vector v1(double a) { return Vector::Constant(1, a); }

// Standard Gaussian kernel: L1(v) = l v - exp(l^2/2) + 1 with v = l exp(l^2/2).
double gaussian_L(double v) {
  double l = std::asinh(v);
  for (int i = 0; i < 60; ++i) {
    const double e = std::exp(0.5 * l * l);
    l -= (l * e - v) / (e * (1.0 + l * l));
  }
  return l * v - std::exp(0.5 * l * l) + 1.0;
}

// Unit step from 0 to 1 at `at`, linear over [at, at + 1e-3].
Path step(double at) {
  Path p;
  p.times = {0.0, at, at + 1e-3, 1.0};
  p.points = {v1(0.0), v1(0.0), v1(1.0), v1(1.0)};
  return p;
}

double dense_sup(const Path& f, const Path& g, double s, double ps) {
  auto pi = [&](double t) { return t <= s ? t * ps / s : ps + (t - s) * (1.0 - ps) / (1.0 - s); };
  double m = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double t = i / 20000.0;
    m = std::max(m, (f.at(t) - g.at(pi(t))).norm());
  }
  return m;
}

}  // namespace

TEST_CASE("homogeneous rate is T L(v)") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  CHECK(rate(Path::straight(v1(0.0), v1(0.0), 1.0), L).value == doctest::Approx(0.0).scale(1.0));
  CHECK(rate(Path::straight(v1(0.0), v1(1.0), 1.0), L).value == doctest::Approx(0.4252251530).epsilon(1e-8));
  CHECK(rate(Path::straight(v1(0.3), v1(-1.0), 2.5, 7), L).value ==
        doctest::Approx(2.5 * gaussian_L(1.0)).epsilon(1e-8));
  const Hamiltonian hm(shifted_gaussian(), RateField::constant(1, 1.0));
  const Lagrangian Lm(hm);
  CHECK(std::abs(rate(Path::straight(v1(0.0), Lm.zeta_star({}), 3.0), Lm).value) < 1e-9);
}

TEST_CASE("slow regime rate matches a one-dimensional quadrature") {
  const Hamiltonian h(gaussian(), fields::diag_quadratic(1, 1.0, 1.0, 10.0));
  const Lagrangian L(h);
  // int_0^1 (1 + t^2) L1(1 / (1 + t^2)) dt by composite Simpson.
  const int n = 2000;
  double oracle = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n, lam = 1.0 + t * t;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    oracle += w * lam * gaussian_L(1.0 / lam);
  }
  oracle /= 3.0 * n;
  const RateReport r = rate(Path::straight(v1(0.0), v1(1.0), 1.0), L);
  CHECK(std::abs(r.value - oracle) < 1e-4);
  CHECK_FALSE(r.infinite);
  CHECK(r.nodes_used.front() >= 8);
}

TEST_CASE("rate is invariant under refinement of a straight path") {
  const Hamiltonian h(gaussian(), fields::diag_quadratic(1, 1.0, 1.0, 10.0));
  const Lagrangian L(h);
  const double coarse = rate(Path::straight(v1(-0.4), v1(0.8), 1.0, 1), L).value;
  RateSettings s;
  s.workers = 3;
  const double fine = rate(Path::straight(v1(-0.4), v1(0.8), 1.0, 16), L, s).value;
  CHECK(fine == doctest::Approx(coarse).epsilon(1e-6));
}

TEST_CASE("path distance") {
  const Path f = step(0.5), g = step(0.625);
  const PathDistance same = path_distance(f, f);
  CHECK(same.distance == doctest::Approx(0.0).scale(1.0));

  const PathDistance d = path_distance(f, g);
  CHECK(d.distance <= d.sup + 1e-12);
  CHECK(d.sup == doctest::Approx(1.0));
  CHECK(sup_distance(f, g, d.knots, d.values) <= d.distance + 1e-12);

  // Exhaustive search over reparametrizations with one interior knot.
  double oracle = INFINITY;
  for (int i = 1; i < 64; ++i)
    for (int j = 1; j < 256; ++j) {
      const double s = i / 64.0, ps = j / 256.0;
      const double slope = std::max(std::abs(std::log(ps / s)), std::abs(std::log((1.0 - ps) / (1.0 - s))));
      if (slope >= oracle) continue;
      oracle = std::min(oracle, std::max(slope, dense_sup(f, g, s, ps)));
    }
  CHECK(oracle == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-2));
  CHECK(d.distance == doctest::Approx(oracle).epsilon(1e-2));
}

TEST_CASE("effective flows") {
  const Hamiltonian sym(gaussian(), fields::periodic_trig({1, 1.0, {{0.4, {1}, {-1}, false}}}), HamiltonianSettings{32, {}, {}});
  const Path still = effective_flow(sym, v1(0.2), 1.0, 64);
  CHECK(std::abs(still.points.back()[0] - 0.2) < 1e-10);

  const Hamiltonian drift(shifted_gaussian(), RateField::constant(1, 1.0));
  const Path line = effective_flow(drift, v1(0.0), 2.0);
  const double m = Lagrangian(drift).zeta_star({})[0];
  CHECK(m == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 0; k < line.size(); k += 37) CHECK(std::abs(line.points[k][0] - m * line.times[k]) < 1e-8);

  // x' = m (1 + x^2), x(0) = 0.
  const Hamiltonian slow(shifted_gaussian(), fields::diag_quadratic(1, 1.0, 1.0, 10.0));
  const Path tanp = effective_flow(slow, v1(0.0), 1.0, 1024);
  CHECK(tanp.points.back()[0] == doctest::Approx(std::tan(m)).epsilon(1e-8));
  CHECK(effective_flow(slow, v1(0.0), 1.0, 128).points.back()[0] == doctest::Approx(tanp.points.back()[0]).epsilon(1e-6));
}

TEST_CASE("velocity bound solves L(v) = s") {
  const Hamiltonian h(gaussian(), RateField::constant(1, 1.0));
  const Lagrangian L(h);
  const double dir = 1.0;
  const double v = velocity_bound(L, {}, ConstPoint(&dir, 1), 0.4252251530);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(gaussian_L(velocity_bound(L, {}, ConstPoint(&dir, 1), 3.0)) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("path text round trip and validation") {
  Path p;
  p.times = {0.0, 0.25, 1.0};
  p.points = {Vector{{0.1, -0.2}}, Vector{{1.0 / 3.0, 2.0}}, Vector{{-1e-7, 5.0}}};
  std::stringstream io;
  p.print(io);
  const Path q = Path::parse(io);
  REQUIRE(q.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(q.times[k] == p.times[k]);
    CHECK(q.points[k] == p.points[k]);
  }
  CHECK(q.at(0.625)[1] == doctest::Approx(3.5));
  p.times[1] = 1.0;
  CHECK_THROWS_AS(p.check(), Error);
  std::istringstream bad("0 1\n0.5 nan\n");
  CHECK_THROWS_AS(Path::parse(bad), Error);
}
