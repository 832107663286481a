#include "ldp/torus_spectral.hpp"

#include "ldp/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ldp {

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidArgument, "torus dimension must be 1, 2 or 3", dim);
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "torus grid needs N >= 4 points per axis", n);
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
  cell_ = std::pow(1.0 / n, dim);
}

std::vector<double> TorusGrid::node(std::size_t flat) const {
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a) {
    x[static_cast<std::size_t>(a)] = static_cast<double>(flat % static_cast<std::size_t>(n_)) / n_;
    flat /= static_cast<std::size_t>(n_);
  }
  return x;
}

std::size_t TorusGrid::difference(std::size_t i, std::size_t j) const {
  const auto n = static_cast<std::size_t>(n_);
  std::size_t out = 0, stride = 1;
  for (int a = 0; a < dim_; ++a) {
    const std::size_t ia = i % n, ja = j % n;
    out += ((ia + n - ja) % n) * stride;
    i /= n;
    j /= n;
    stride *= n;
  }
  return out;
}

namespace {

// Periodized tilted kernel and its lambda-derivatives on the difference lattice.
struct LatticeTables {
  std::vector<double> k;
  std::vector<std::vector<double>> k1;
  std::vector<std::vector<double>> k2;
  int cutoff = 0;
};

LatticeTables lattice_tables(const JumpKernel& kernel, const TorusGrid& grid, ConstPoint lambda,
                             const SpectralSettings& settings, bool with_derivatives) {
  const int d = grid.dim();
  const double radius = kernel.truncation_radius(norm(lambda));
  const int cutoff = static_cast<int>(std::ceil(radius)) + 1;
  if (cutoff > settings.lattice_max)
    throw Error(ErrorKind::CutoffOverflow,
                "lattice-sum cutoff exceeds the configured maximum; |lambda| is too large",
                cutoff);
  LatticeTables t;
  t.cutoff = cutoff;
  const std::size_t n = grid.size();
  t.k.assign(n, 0.0);
  if (with_derivatives) {
    t.k1.assign(static_cast<std::size_t>(d), std::vector<double>(n, 0.0));
    t.k2.assign(static_cast<std::size_t>(d * d), std::vector<double>(n, 0.0));
  }
  const double h = grid.cell_volume();
  std::vector<double> w(static_cast<std::size_t>(d));
  std::vector<int> m(static_cast<std::size_t>(d));
  for (std::size_t q = 0; q < n; ++q) {
    const std::vector<double> delta = grid.node(q);
    std::fill(m.begin(), m.end(), -cutoff);
    while (true) {
      double lw = 0.0;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        w[ai] = delta[ai] - m[ai];
        if (std::abs(w[ai]) > radius) inside = false;
        lw += lambda[ai] * w[ai];
      }
      if (inside) {
        const double av = kernel.eval(ConstPoint(w.data(), w.size()));
        if (av > 0.0) {
          const double e = std::exp(std::log(h * av) - lw);
          t.k[q] += e;
          if (with_derivatives)
            for (int a = 0; a < d; ++a) {
              const auto ai = static_cast<std::size_t>(a);
              t.k1[ai][q] -= e * w[ai];
              for (int b = 0; b < d; ++b)
                t.k2[static_cast<std::size_t>(a * d + b)][q] += e * w[ai] * w[static_cast<std::size_t>(b)];
            }
        }
      }
      int a = 0;
      while (a < d && ++m[static_cast<std::size_t>(a)] > cutoff) m[static_cast<std::size_t>(a++)] = -cutoff;
      if (a == d) break;
    }
  }
  return t;
}

Matrix modulate(const Matrix& field, const TorusGrid& grid, const std::vector<double>& table) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = field(i, j) *
                  table[grid.difference(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
  return out;
}

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

struct PowerOutcome {
  Vector v;
  double rho = 0.0;
  int iterations = 0;
  bool converged = false;
  bool bound_exit = false;
};

// Power iteration on a nonnegative matrix from the all-ones vector. When `ceiling` is finite,
// stops as soon as the Collatz-Wielandt upper bound drops to it or below.
PowerOutcome power_iterate(const Matrix& P, const SpectralSettings& s, double ceiling) {
  PowerOutcome out;
  const Eigen::Index n = P.rows();
  Vector v = Vector::Ones(n);
  double prev = NAN;
  for (int it = 1; it <= s.max_iter; ++it) {
    const Vector w = P * v;
    const double rho = v.dot(w) / v.dot(v);
    double lo = INFINITY, hi = -INFINITY;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (v[i] <= 0.0) continue;
      const double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.iterations = it;
    out.rho = rho;
    if (hi <= ceiling) {
      out.v = v;
      out.bound_exit = true;
      return out;
    }
    const double norm = w.lpNorm<Eigen::Infinity>();
    if (!(norm > 0.0)) break;
    v = w / norm;
    if (std::abs(rho - prev) <= s.tol * scale_of(rho) && hi - lo <= 1e-9 * scale_of(rho)) {
      out.converged = true;
      break;
    }
    prev = rho;
  }
  out.v = v;
  return out;
}

// Perron vector of a nonnegative matrix by a dense eigensolver.
std::pair<double, Vector> dense_perron(const Matrix& P) {
  Eigen::EigenSolver<Matrix> es(P, true);
  const auto& vals = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i)
    if (vals[i].real() > vals[best].real()) best = i;
  Vector v = es.eigenvectors().col(best).real();
  if (v.sum() < 0.0) v = -v;
  v = v.cwiseAbs();
  return {vals[best].real(), v};
}

}  // namespace

TorusProblem::TorusProblem(JumpKernel kernel, PeriodicPairField field, TorusGrid grid,
                           SpectralSettings settings)
    : kernel_(std::move(kernel)), field_(std::move(field)), grid_(grid), settings_(settings) {
  if (kernel_.dim() != grid_.dim() || field_.dim() != grid_.dim())
    throw Error(ErrorKind::InvalidArgument, "kernel, field and grid dimensions differ");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  auto lam = std::make_shared<Matrix>(n, n);
  std::vector<std::vector<double>> nodes(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) nodes[i] = grid_.node(i);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& xi = nodes[static_cast<std::size_t>(i)];
      const auto& eta = nodes[static_cast<std::size_t>(j)];
      (*lam)(i, j) = field_(ConstPoint(xi.data(), xi.size()), ConstPoint(eta.data(), eta.size()));
    }
  lambda_matrix_ = std::move(lam);
  const Vector zero = Vector::Zero(grid_.dim());
  const LatticeTables t = lattice_tables(kernel_, grid_, view(zero), settings_, false);
  G_ = modulate(*lambda_matrix_, grid_, t.k).rowwise().sum();
}

SkewedOperator TorusProblem::assemble(ConstPoint lambda, bool with_derivatives) const {
  if (lambda.size() != static_cast<std::size_t>(grid_.dim()))
    throw Error(ErrorKind::InvalidArgument, "assemble: lambda has the wrong dimension");
  for (double l : lambda)
    if (!std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "assemble: non-finite lambda");
  const LatticeTables t = lattice_tables(kernel_, grid_, lambda, settings_, with_derivatives);
  SkewedOperator op;
  op.lambda = to_vector(lambda);
  op.K = modulate(*lambda_matrix_, grid_, t.k);
  op.G = G_;
  op.g_min = g_min();
  op.g_max = g_max();
  op.lattice_cutoff = t.cutoff;
  for (const auto& table : t.k1) op.K1.push_back(modulate(*lambda_matrix_, grid_, table));
  for (const auto& table : t.k2) op.K2.push_back(modulate(*lambda_matrix_, grid_, table));
  return op;
}

SpectralResult TorusProblem::solve(ConstPoint lambda) const {
  return principal_eig(assemble(lambda, false), settings_);
}

std::string TorusProblem::identity() const {
  std::ostringstream out;
  out.precision(17);
  out << kernel_.description() << "|" << field_.description() << "|d=" << grid_.dim()
      << ";N=" << grid_.n() << "|tol=" << settings_.tol << ";iter=" << settings_.max_iter
      << ";M=" << settings_.lattice_max << ";margin=" << settings_.residual_factor << ","
      << settings_.abs_margin << "," << settings_.diag_factor;
  return out.str();
}

SpectralResult principal_eig(const SkewedOperator& op, const SpectralSettings& s) {
  const Eigen::Index n = op.K.rows();
  SpectralResult r;
  r.lambda = op.lambda;
  r.g_min = op.g_min;
  r.g_max = op.g_max;
  const double base_margin = s.abs_margin + s.diag_factor * op.max_diagonal();

  Matrix P = op.K;
  P.diagonal() += (Vector::Constant(n, op.g_max) - op.G);
  // theta <= -g_min + base_margin certainly puts lambda outside Gamma.
  const double ceiling = op.g_max - op.g_min + base_margin;

  PowerOutcome right = power_iterate(P, s, ceiling);
  r.iterations = right.iterations;
  Vector u, u_star;
  double rho = right.rho;
  if (right.bound_exit) {
    r.method = "bound";
    u = right.v;
    u_star = Vector::Ones(n);
  } else if (right.converged) {
    r.method = "power";
    u = right.v;
    PowerOutcome left = power_iterate(P.transpose(), s, -INFINITY);
    if (left.converged) {
      u_star = left.v;
    } else if (static_cast<std::size_t>(n) <= s.dense_fallback_max) {
      u_star = dense_perron(P.transpose()).second;
    } else {
      throw Error(ErrorKind::NonConvergence, "adjoint power iteration did not converge",
                  std::abs(left.rho - rho));
    }
  } else if (static_cast<std::size_t>(n) <= s.dense_fallback_max) {
    r.method = "dense";
    auto [val, vec] = dense_perron(P);
    rho = val;
    u = vec;
    u_star = dense_perron(P.transpose()).second;
  } else {
    const Vector res = P * right.v - right.rho * right.v;
    throw Error(ErrorKind::NonConvergence,
                "power iteration did not converge (eigenvalue near the continuous spectrum?)",
                res.lpNorm<Eigen::Infinity>() / right.v.lpNorm<Eigen::Infinity>());
  }

  // Cell volume h^d = 1 / (number of nodes).
  const double cell = 1.0 / static_cast<double>(n);
  u /= cell * u.sum();
  u_star /= cell * u.dot(u_star);

  r.theta_discrete = rho - op.g_max;
  const Vector Au = op.K * u - op.G.cwiseProduct(u);
  r.residual = (Au - r.theta_discrete * u).lpNorm<Eigen::Infinity>() / u.lpNorm<Eigen::Infinity>();
  r.margin = s.residual_factor * r.residual + base_margin;
  r.in_gamma = r.method != "bound" && r.theta_discrete > -op.g_min + r.margin;
  r.theta = r.in_gamma ? r.theta_discrete : -op.g_min;
  r.u = std::move(u);
  r.u_star = std::move(u_star);
  return r;
}

Vector theta_grad(const SkewedOperator& op, const SpectralResult& result) {
  if (!result.in_gamma)
    throw Error(ErrorKind::NotInGamma, "theta_grad: lambda lies outside Gamma (flat branch)");
  if (op.K1.empty())
    throw Error(ErrorKind::InvalidArgument, "theta_grad: operator assembled without derivatives");
  const double cell = 1.0 / static_cast<double>(op.K.rows());
  Vector g(op.dim());
  for (int i = 0; i < op.dim(); ++i)
    g[i] = cell * result.u_star.dot(op.K1[static_cast<std::size_t>(i)] * result.u);
  return g;
}

std::vector<Vector> eigenvector_derivatives(const SkewedOperator& op, const SpectralResult& result,
                                            const Vector& grad, const SpectralSettings& s) {
  const Eigen::Index n = op.K.rows();
  const int d = op.dim();
  const double cell = 1.0 / static_cast<double>(n);
  Matrix B = Matrix::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = op.K;
  B.topLeftCorner(n, n).diagonal() -= op.G + Vector::Constant(n, result.theta);
  B.block(0, n, n, 1) = result.u;
  B.block(n, 0, 1, n) = cell * result.u_star.transpose();
  Eigen::PartialPivLU<Matrix> lu(B);
  const double rcond = lu.rcond();
  if (!(rcond >= s.min_rcond))
    throw Error(ErrorKind::IllConditioned, "bordered Fredholm system is ill-conditioned", rcond);
  Matrix rhs = Matrix::Zero(n + 1, d);
  for (int i = 0; i < d; ++i)
    rhs.col(i).head(n) = -(op.K1[static_cast<std::size_t>(i)] * result.u - grad[i] * result.u);
  const Matrix sol = lu.solve(rhs);
  std::vector<Vector> w;
  for (int i = 0; i < d; ++i) w.emplace_back(sol.col(i).head(n));
  return w;
}

Matrix theta_hess(const SkewedOperator& op, const SpectralResult& result,
                  const SpectralSettings& s) {
  const Vector g = theta_grad(op, result);
  const std::vector<Vector> w = eigenvector_derivatives(op, result, g, s);
  const int d = op.dim();
  const double cell = 1.0 / static_cast<double>(op.K.rows());
  const Vector& us = result.u_star;
  Matrix H(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      H(i, j) = cell * (us.dot(op.k2(i, j) * result.u) + us.dot(op.K1[si] * w[sj]) +
                        us.dot(op.K1[sj] * w[si])) -
                g[i] * cell * w[sj].dot(us) - g[j] * cell * w[si].dot(us);
    }
  return 0.5 * (H + H.transpose());
}

EffectiveCoefficients effective_coeffs(const TorusProblem& problem) {
  const Vector zero = Vector::Zero(problem.grid().dim());
  const SkewedOperator op = problem.assemble(view(zero));
  const SpectralResult res = principal_eig(op, problem.settings());
  const Vector g = theta_grad(op, res);
  EffectiveCoefficients c;
  c.b = -g;
  c.kappa = eigenvector_derivatives(op, res, g, problem.settings());
  c.u_star = res.u_star;
  const int d = op.dim();
  const Eigen::Index n = op.K.rows();
  const double cell = 1.0 / static_cast<double>(n);
  const Vector one = Vector::Ones(n);
  c.Theta.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      c.Theta(i, j) = cell * (0.5 * res.u_star.dot(op.k2(i, j) * one) +
                              res.u_star.dot(op.K1[si] * c.kappa[sj])) +
                      c.b[i] * cell * c.kappa[sj].dot(res.u_star);
    }
  c.hessian = theta_hess(op, res, problem.settings());
  return c;
}

SkewedOperator similarity_transform(const SkewedOperator& op, const Vector& u) {
  if (u.size() != op.K.rows() || !(u.minCoeff() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "similarity_transform needs a positive grid function");
  SkewedOperator out = op;
  const Vector inv = u.cwiseInverse();
  out.K = inv.asDiagonal() * op.K * u.asDiagonal();
  for (auto& m : out.K1) m = inv.asDiagonal() * m * u.asDiagonal();
  for (auto& m : out.K2) m = inv.asDiagonal() * m * u.asDiagonal();
  return out;
}

}  // namespace ldp
