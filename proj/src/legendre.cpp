#include "ldp/legendre.hpp"

#include "ldp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ldp {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Maximizes a concave function on [a, b] by golden-section search.
template <class F>
double golden_max(F&& f, double a, double b, double tol, int max_iter = 400) {
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && b - a > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

std::vector<Vector> probe_directions(int d) {
  std::vector<Vector> dirs;
  for (int a = 0; a < d; ++a)
    for (double s : {1.0, -1.0}) {
      Vector e = Vector::Zero(d);
      e[a] = s;
      dirs.push_back(e);
    }
  if (d > 1) {
    // Fixed quasi-random directions so the radius is reproducible.
    for (int i = 0; i < 8 * d; ++i) {
      Vector e(d);
      for (int a = 0; a < d; ++a) e[a] = std::sin(1.0 + 12.9898 * (i + 1) + 78.233 * (a + 1));
      dirs.push_back(e.normalized());
    }
  }
  return dirs;
}

}  // namespace

Lagrangian::Lagrangian(const Hamiltonian& h, LegendreSettings settings)
    : h_(h), settings_(settings) {}

double Lagrangian::objective(ConstPoint x, ConstPoint zeta, const Vector& lambda) const {
  return dot(view(lambda), zeta) - h_.value(x, view(lambda)).value;
}

Vector Lagrangian::zeta_star(ConstPoint x) const {
  const Vector zero = Vector::Zero(h_.dim());
  return h_.grad(x, view(zero));
}

double Lagrangian::search_radius(ConstPoint x, ConstPoint zeta) const {
  const double zn = norm(zeta);
  const auto dirs = probe_directions(h_.dim());
  for (double r = 1.0; r <= settings_.max_radius; r *= 2.0) {
    bool ok = true;
    for (const auto& a : dirs) {
      const Vector lam = r * a;
      if (h_.value(x, view(lam)).value < r * zn + 1.0) {
        ok = false;
        break;
      }
    }
    if (ok) return r;
  }
  throw Error(ErrorKind::SearchOverflow,
              "Legendre search radius exceeded its maximum; is H superlinear?", settings_.max_radius);
}

void Lagrangian::classify(ConstPoint x, LagrangianValue& out) const {
  const int d = h_.dim();
  bool boundary = false;
  if (h_.backing() == Hamiltonian::Backing::Spectral) {
    boundary = !h_.value(x, view(out.argmax)).in_gamma;
    for (int a = 0; a < d && !boundary; ++a)
      for (double s : {1.0, -1.0}) {
        Vector p = out.argmax;
        p[a] += s * settings_.probe;
        if (!h_.value(x, view(p)).in_gamma) boundary = true;
      }
  }
  out.boundary = boundary;
  out.on_linear_segment = boundary;
  out.exposed = false;
  if (!boundary) {
    const Matrix H = h_.hess(x, view(out.argmax));
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    out.exposed = es.eigenvalues().minCoeff() > settings_.exposed_eig;
  }
}

LagrangianValue Lagrangian::operator()(ConstPoint x, ConstPoint zeta) const {
  const int d = h_.dim();
  if (zeta.size() != static_cast<std::size_t>(d))
    throw Error(ErrorKind::InvalidArgument, "lagrangian: zeta has the wrong dimension");
  for (double z : zeta)
    if (!std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, "lagrangian: non-finite zeta");
  const Vector zv = to_vector(zeta);
  const double tol = settings_.grad_tol * std::max(1.0, zv.norm());

  LagrangianValue out;
  Vector lam = Vector::Zero(d);
  double g = objective(x, zeta, lam);
  bool converged = false;
  for (int it = 0; it < settings_.max_newton; ++it) {
    Vector grad;
    try {
      grad = h_.grad(x, view(lam));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotInGamma) throw;
      break;
    }
    const Vector r = zv - grad;
    if (r.norm() <= tol) {
      converged = true;
      break;
    }
    const Matrix H = h_.hess(x, view(lam));
    Eigen::LDLT<Matrix> ldlt(H);
    Vector step = ldlt.solve(r);
    double slope = r.dot(step);
    if (ldlt.info() != Eigen::Success || !(slope > 0.0) || !step.allFinite()) {
      step = r;
      slope = r.squaredNorm();
    }
    if (step.norm() > settings_.max_step) {
      const double shrink = settings_.max_step / step.norm();
      step *= shrink;
      slope *= shrink;
    }
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      const Vector trial = lam + t * step;
      const HValue hv = h_.value(x, view(trial));
      const double gt = trial.dot(zv) - hv.value;
      // Near the optimum the objective gain drops below quadrature noise; a step that
      // does not lose beyond that noise and shrinks the residual is accepted as well.
      bool ok = hv.in_gamma && gt >= g + 1e-4 * t * slope;
      if (!ok && hv.in_gamma && gt >= g - 1e-11 * (1.0 + std::abs(g))) {
        try {
          ok = (zv - h_.grad(x, view(trial))).norm() < r.norm();
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NotInGamma) throw;
        }
      }
      if (ok) {
        lam = trial;
        g = gt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Newton cannot improve: either converged to rounding or blocked by the flat branch.
      if (r.norm() <= 1e3 * tol && h_.value(x, view(lam)).in_gamma) converged = true;
      break;
    }
  }

  if (converged) {
    out.method = "newton";
  } else {
    const double R = search_radius(x, zeta);
    auto f = [&](const Vector& l) { return objective(x, zeta, l); };
    if (d == 1) {
      out.method = "golden";
      const double best = golden_max(
          [&](double l) {
            Vector v(1);
            v[0] = l;
            return f(v);
          },
          -R, R, settings_.bracket_tol);
      Vector cand(1);
      cand[0] = best;
      if (f(cand) > g) {
        lam = cand;
        g = f(cand);
      }
    } else {
      out.method = "coordinate";
      for (int sweep = 0; sweep < settings_.max_sweeps; ++sweep) {
        const Vector start = lam;
        for (int a = 0; a < d; ++a) {
          Vector trial = lam;
          const double best = golden_max(
              [&](double l) {
                trial[a] = l;
                return f(trial);
              },
              -R, R, settings_.bracket_tol);
          trial[a] = best;
          const double ft = f(trial);
          if (ft > g) {
            lam = trial;
            g = ft;
          }
        }
        const Vector delta = lam - start;
        if (delta.norm() > 0.0) {
          const double smax = std::min(4.0, 2.0 * R / delta.norm());
          const double s = golden_max([&](double s) { return f(start + s * delta); }, 0.0, smax,
                                      settings_.bracket_tol);
          const Vector ray = start + s * delta;
          if (f(ray) > g) {
            lam = ray;
            g = f(ray);
          }
        }
        if ((lam - start).norm() < 10.0 * settings_.bracket_tol) break;
      }
    }
  }
  if (g < 0.0) {
    lam.setZero();
    g = 0.0;
  }
  out.value = g;
  out.argmax = lam;
  classify(x, out);
  return out;
}

double Lagrangian::l_t(ConstPoint x, ConstPoint zeta, double t) const {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "l_t needs t > 0", t);
  Vector scaled = to_vector(zeta) / t;
  return t * value(x, view(scaled));
}

TailFit tail_diagnostic(const Lagrangian& lagrangian, ConstPoint direction,
                        const std::vector<double>& radii) {
  const Hamiltonian& h = lagrangian.hamiltonian();
  if (h.backing() != Hamiltonian::Backing::ClosedForm)
    throw Error(ErrorKind::InvalidArgument, "tail_diagnostic needs a constant-Lambda Hamiltonian");
  if (radii.size() < 3) throw Error(ErrorKind::InvalidArgument, "tail_diagnostic needs >= 3 radii");
  const Vector phi = to_vector(direction).normalized();
  const double p = h.kernel().envelope().p, k = h.kernel().envelope().k;
  TailFit fit;
  fit.radii = radii;
  Matrix A(static_cast<Eigen::Index>(radii.size()), 3);
  Vector y(static_cast<Eigen::Index>(radii.size()));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r > std::numbers::e)) throw Error(ErrorKind::InvalidArgument, "tail radii must exceed e", r);
    const Vector z = r * phi;
    const double L = lagrangian.value({}, view(z));
    fit.values.push_back(L);
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = 1.0;
    A(row, 1) = std::log(r);
    A(row, 2) = std::log(std::log(r));
    y[row] = std::log(L);
  }
  const Vector coef = A.colPivHouseholderQr().solve(y);
  fit.power = coef[1];
  fit.log_exponent = coef[2];
  const Vector resid = y - A * coef;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
  const std::size_t n = radii.size();
  auto ratio = [&](std::size_t i) {
    return fit.values[i] / (radii[i] * std::pow(std::log(radii[i]), (p - 1.0) / p));
  };
  fit.plateau = 0.5 * (ratio(n - 1) + ratio(n - 2));
  fit.predicted_plateau = p / (p - 1.0) * std::pow(k * (p - 1.0), 1.0 / p);

  const Vector zero = Vector::Zero(h.dim());
  const Matrix sigma = h.hess({}, view(zero));
  const Vector zs = lagrangian.zeta_star({});
  const double delta = 0.05;
  const Vector z = zs + delta * phi;
  const double quad = 0.5 * delta * delta * phi.dot(sigma.ldlt().solve(phi));
  fit.small_zeta_rel_error = lagrangian.value({}, view(z)) / quad - 1.0;
  return fit;
}

}  // namespace ldp
