#include "ldp/error.hpp"
#include "ldp/field_library.hpp"
#include "ldp/scenario.hpp"
#include "ldp/torus_spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace ldp;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

JumpKernel gaussian(int d = 1) { return JumpKernel::generalized_gaussian(d, 0.5, 2.0); }

PeriodicPairField trig(const fields::TrigPolynomial& p) { return fields::periodic_trig(p).freeze({}); }

// 1.5 + 0.5 cos(2 pi (xi - eta))
fields::TrigPolynomial cos_diff() { return {1, 1.5, {{0.5, {1}, {-1}, false}}}; }
// Asymmetric in (xi, eta), so the effective drift does not vanish.
fields::TrigPolynomial skew() { return {1, 1.0, {{0.3, {1}, {}, true}, {0.2, {1}, {-1}, false}, {0.1, {2}, {1}, false}}}; }

double theta_at(const TorusProblem& p, double l) {
  const Vector v = Vector::Constant(1, l);
  return p.solve(view(v)).theta;
}

// Dense eigensolver oracle: largest real part of eig(K - diag G).
double dense_theta(const SkewedOperator& op) {
  const Matrix A = op.K - Matrix(op.G.asDiagonal());
  return Eigen::EigenSolver<Matrix>(A, false).eigenvalues().real().maxCoeff();
}

}  // namespace

TEST_CASE("constant field assembles rows summing to the moment") {
  const TorusProblem p(gaussian(), PeriodicPairField::constant(1, 1.0), TorusGrid(1, 64));
  const Vector zero = Vector::Zero(1);
  const auto op0 = p.assemble(view(zero));
  CHECK((op0.K.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK((op0.G.array() - 1.0).abs().maxCoeff() < 1e-8);
  const TorusProblem p3(gaussian(), PeriodicPairField::constant(1, 3.0), TorusGrid(1, 32));
  for (double l : {-1.5, 0.7, 2.0}) {
    const Vector lv = Vector::Constant(1, l);
    const auto op = p3.assemble(view(lv));
    CHECK((op.K.rowwise().sum().array() - 3.0 * gaussian().exp_moment(view(lv))).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("killing term agrees with direct quadrature") {
  const auto field = trig(cos_diff());
  const TorusProblem p(gaussian(), field, TorusGrid(1, 8));
  const auto a = gaussian();
  for (int i = 0; i < 8; ++i) {
    const double xi = i / 8.0;
    // G(xi) = int_R a(xi - y) Lambda(xi, y) dy.
    const double direct = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double y) {
          const double z = xi - y;
          return a.eval(ConstPoint(&z, 1)) * (1.5 + 0.5 * std::cos(kTwoPi * (xi - y)));
        },
        xi - 40.0, xi + 40.0, 15, 1e-14);
    CHECK(p.killing()[i] == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("constant field reproduces the compound Poisson Hamiltonian") {
  const TorusProblem p(gaussian(), PeriodicPairField::constant(1, 1.0), TorusGrid(1, 64));
  for (double l : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const Vector lv = Vector::Constant(1, l);
    const auto r = p.solve(view(lv));
    CHECK(r.in_gamma);
    CHECK(std::abs(r.theta - (std::exp(0.5 * l * l) - 1.0)) < 1e-6);
    CHECK((r.u.array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK((r.u_star.array() - 1.0).abs().maxCoeff() < 1e-8);
    const auto op = p.assemble(view(lv));
    CHECK(std::abs(theta_grad(op, r)[0] - gaussian().exp_moment_grad(view(lv))[0]) < 1e-6);
  }
}

TEST_CASE("theta vanishes at zero with constant eigenvector") {
  for (const auto& f : {cos_diff(), skew()}) {
    const TorusProblem p(gaussian(), trig(f), TorusGrid(1, 64));
    const Vector zero = Vector::Zero(1);
    const auto r = p.solve(view(zero));
    CHECK(std::abs(r.theta) < 1e-10);
    CHECK((r.u.array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK(r.u_star.minCoeff() > 0.0);
    // Normalizations h sum u = 1, h sum u u* = 1.
    CHECK(r.u.mean() == doctest::Approx(1.0));
    CHECK(r.u.cwiseProduct(r.u_star).mean() == doctest::Approx(1.0));
  }
}

TEST_CASE("principal eigenvalue matches a dense eigensolver") {
  const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, 48));
  for (double l : {-1.0, 0.4, 1.7}) {
    const Vector lv = Vector::Constant(1, l);
    const auto op = p.assemble(view(lv));
    const auto r = principal_eig(op);
    CHECK(r.theta == doctest::Approx(dense_theta(op)).epsilon(1e-9));
    CHECK(r.u.minCoeff() > 0.0);
    CHECK(r.residual < 1e-9);
  }
}

TEST_CASE("gradient and Hessian match finite differences") {
  const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, 64));
  for (double l : {-0.8, 0.0, 1.2}) {
    const Vector lv = Vector::Constant(1, l);
    const auto op = p.assemble(view(lv));
    const auto r = principal_eig(op);
    const double h = 1e-4;
    const double fd = (theta_at(p, l + h) - theta_at(p, l - h)) / (2.0 * h);
    CHECK(std::abs(theta_grad(op, r)[0] - fd) < 1e-5);
    const double h2 = 1e-3;
    const double fd2 = (theta_at(p, l + h2) - 2.0 * theta_at(p, l) + theta_at(p, l - h2)) / (h2 * h2);
    const double hess = theta_hess(op, r)(0, 0);
    CHECK(std::abs(hess - fd2) <= 1e-4 * std::abs(hess));
  }
}

TEST_CASE("Gaussian d=2 Hessian at zero is the identity") {
  const TorusProblem p(gaussian(2), PeriodicPairField::constant(2, 1.0), TorusGrid(2, 8));
  const Vector zero = Vector::Zero(2);
  const auto op = p.assemble(view(zero));
  const Matrix H = theta_hess(op, principal_eig(op));
  CHECK((H - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("effective coefficients") {
  SUBCASE("symmetric kernel and constant field: no drift") {
    const TorusProblem p(gaussian(), PeriodicPairField::constant(1, 1.0), TorusGrid(1, 32));
    CHECK(std::abs(effective_coeffs(p).b[0]) < 1e-8);
  }
  SUBCASE("asymmetric tabulated kernel: b = Lambda m") {
    std::vector<double> z, v;
    for (int i = -300; i <= 300; ++i) {
      z.push_back(0.02 * i);
      v.push_back(std::exp(-0.5 * (0.02 * i - 0.7) * (0.02 * i - 0.7)));
    }
    const auto k = JumpKernel::tabulated(z, v, DecayEnvelope{1.0, 0.25, 2.0});
    const TorusProblem p(k, PeriodicPairField::constant(1, 2.0), TorusGrid(1, 32));
    CHECK(effective_coeffs(p).b[0] == doctest::Approx(2.0 * k.mean()[0]).epsilon(1e-6));
  }
  SUBCASE("Theta + Theta^T equals the Hessian at zero") {
    const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, 64));
    const auto c = effective_coeffs(p);
    const Vector zero = Vector::Zero(1);
    const auto op = p.assemble(view(zero));
    const auto r = principal_eig(op);
    CHECK(std::abs(c.b[0] + theta_grad(op, r)[0]) < 1e-12);
    CHECK(std::abs(2.0 * c.Theta(0, 0) - theta_hess(op, r)(0, 0)) < 1e-4);
    CHECK(c.hessian(0, 0) > 0.0);
  }
}

TEST_CASE("diagonal similarity leaves theta unchanged") {
  const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, 48));
  const Vector l0 = Vector::Constant(1, 0.9);
  const auto u = p.solve(view(l0)).u;
  for (double r : {-0.1, 0.05, 0.2}) {
    const Vector l = Vector::Constant(1, 0.9 + r);
    const auto op = p.assemble(view(l));
    CHECK(principal_eig(similarity_transform(op, u)).theta ==
          doctest::Approx(principal_eig(op).theta).epsilon(1e-6));
  }
}

TEST_CASE("grid refinement converges") {
  double prev_gap = INFINITY, prev = 0.0;
  for (int n : {8, 16, 32, 64}) {
    const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, n));
    const double t = theta_at(p, 1.0);
    if (n > 8) {
      const double gap = std::abs(t - prev);
      CHECK((gap <= prev_gap || gap < 1e-12));
      prev_gap = gap;
    }
    prev = t;
  }
}

TEST_CASE("separable example leaves Gamma at the constructed tilt") {
  GammaCandidate c;
  const auto report = evaluate_gamma_candidate(c, 128);
  CHECK(report.ex2_holds);
  CHECK(report.ex3_holds);
  CHECK(report.in_gamma_at_zero);
  CHECK_FALSE(report.in_gamma_at_lambda0);
  const TorusProblem p(JumpKernel::box(1), c.field().freeze({}), TorusGrid(1, 128));
  const auto r = p.solve(view(report.lambda0));
  CHECK(r.theta == doctest::Approx(-r.g_min));
  CHECK_THROWS_AS(theta_grad(p.assemble(view(report.lambda0)), r), Error);
}

TEST_CASE("positivity of the shifted iteration matrix") {
  const TorusProblem p(gaussian(), trig(skew()), TorusGrid(1, 32));
  const Vector l = Vector::Constant(1, -1.3);
  const auto op = p.assemble(view(l));
  CHECK(op.K.minCoeff() >= 0.0);
  const Matrix P = op.K + Matrix((op.g_max - op.G.array()).matrix().asDiagonal());
  CHECK((P * Vector::Ones(32)).minCoeff() > 0.0);
}

TEST_CASE("lattice cutoff overflow is reported") {
  SpectralSettings s;
  s.lattice_max = 10;
  const TorusProblem p(gaussian(), PeriodicPairField::constant(1, 1.0), TorusGrid(1, 16), s);
  const Vector l = Vector::Constant(1, 30.0);
  CHECK_THROWS_AS(p.assemble(view(l)), Error);
  CHECK_THROWS_AS(TorusGrid(1, 3), Error);
}
