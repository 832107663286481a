#pragma once

#include "ldp/environment.hpp"
#include "ldp/kernel.hpp"
#include "ldp/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ldp {

/// Uniform periodic lattice xi_i = i / N on [0, 1)^d, flattened with axis 0 fastest.
class TorusGrid {
 public:
  TorusGrid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_; }

  /// Coordinates of node `flat`.
  std::vector<double> node(std::size_t flat) const;
  /// Flat index of the lattice difference (i - j) mod N, componentwise.
  std::size_t difference(std::size_t i, std::size_t j) const;

 private:
  int dim_;
  int n_;
  std::size_t size_;
  double cell_;
};

struct SpectralSettings {
  /// Rayleigh-increment tolerance of the power iteration.
  double tol = 1e-12;
  int max_iter = 20000;
  /// Largest lattice-sum cutoff M before assembly gives up.
  int lattice_max = 64;
  /// Kernel tail allowed beyond the lattice cutoff.
  double tail_tol = 1e-12;
  /// Gamma membership: theta > -g_min + residual_factor * residual + abs_margin
  ///                                   + diag_factor * max_i K_ii.
  double residual_factor = 10.0;
  double abs_margin = 1e-8;
  double diag_factor = 4.0;
  /// Dense eigensolver fallback when the power iteration stalls and the matrix is small enough.
  std::size_t dense_fallback_max = 1024;
  /// Bordered Fredholm solves fail below this reciprocal condition estimate.
  double min_rcond = 1e-14;
};

/// Discretized A_lambda = K - diag(G) on the torus.
///
/// K_ij = Lambda(xi_i, xi_j) k_lambda(xi_i - xi_j) with the periodized tilted kernel
/// k_lambda(delta) = h^d sum_m a(delta - m) exp(-lambda.(delta - m)).
struct SkewedOperator {
  Vector lambda;
  Matrix K;
  Vector G;
  double g_min = 0.0;
  double g_max = 0.0;
  int lattice_cutoff = 0;
  /// First and second lambda-derivatives of K: K1[i] carries the factor -(delta - m)_i,
  /// K2[idx(i,j)] the factor (delta - m)_i (delta - m)_j, idx(i,j) = i*d + j.
  std::vector<Matrix> K1;
  std::vector<Matrix> K2;

  int dim() const { return static_cast<int>(lambda.size()); }
  const Matrix& k2(int i, int j) const { return K2[static_cast<std::size_t>(i * dim() + j)]; }
  double max_diagonal() const { return K.diagonal().maxCoeff(); }
};

struct SpectralResult {
  Vector lambda;
  /// theta(lambda), or -g_min when lambda is outside Gamma.
  double theta = 0.0;
  /// Principal eigenvalue of the discrete matrix, whatever the membership verdict.
  double theta_discrete = 0.0;
  Vector u;
  Vector u_star;
  double g_min = 0.0;
  double g_max = 0.0;
  bool in_gamma = true;
  double margin = 0.0;
  double residual = 0.0;
  int iterations = 0;
  /// "power", "dense" or "bound" (Collatz-Wielandt bound settled membership early).
  std::string method;
  /// u and u_star are meaningful only when in_gamma is set.
  bool eigenvectors_reliable() const { return in_gamma; }
};

/// A kernel, a frozen periodic field and a grid. The field matrix Lambda(xi_i, xi_j) and
/// the killing term G are lambda-independent and computed once.
class TorusProblem {
 public:
  TorusProblem(JumpKernel kernel, PeriodicPairField field, TorusGrid grid,
               SpectralSettings settings = {});

  const JumpKernel& kernel() const { return kernel_; }
  const PeriodicPairField& field() const { return field_; }
  const TorusGrid& grid() const { return grid_; }
  const SpectralSettings& settings() const { return settings_; }
  const Matrix& field_matrix() const { return *lambda_matrix_; }
  const Vector& killing() const { return G_; }
  double g_min() const { return G_.minCoeff(); }
  double g_max() const { return G_.maxCoeff(); }

  SkewedOperator assemble(ConstPoint lambda, bool with_derivatives = true) const;
  SpectralResult solve(ConstPoint lambda) const;

  /// Stable identity of (kernel, field, grid, spectral settings) for caching.
  std::string identity() const;

 private:
  JumpKernel kernel_;
  PeriodicPairField field_;
  TorusGrid grid_;
  SpectralSettings settings_;
  std::shared_ptr<const Matrix> lambda_matrix_;
  Vector G_;
};

SpectralResult principal_eig(const SkewedOperator& op, const SpectralSettings& settings = {});

/// Gradient of theta: h^d <u*, K1_i u>. Throws NotInGamma outside Gamma.
Vector theta_grad(const SkewedOperator& op, const SpectralResult& result);

/// Solutions w_i of (A - theta) w_i = -(K1_i - g_i) u with h^d <w_i, u*> = 0 (bordered system).
std::vector<Vector> eigenvector_derivatives(const SkewedOperator& op, const SpectralResult& result,
                                            const Vector& grad,
                                            const SpectralSettings& settings = {});

/// Hessian of theta from the second solvability condition.
Matrix theta_hess(const SkewedOperator& op, const SpectralResult& result,
                  const SpectralSettings& settings = {});

struct EffectiveCoefficients {
  /// Effective drift, b = -grad theta(0).
  Vector b;
  /// Correctors kappa_i = d u_lambda / d lambda_i at 0, one grid function per axis.
  std::vector<Vector> kappa;
  /// Effective diffusion Theta; Theta + Theta^T = Hessian of theta at 0.
  Matrix Theta;
  Matrix hessian;
  Vector u_star;
};

EffectiveCoefficients effective_coeffs(const TorusProblem& problem);

/// Operator with K replaced by diag(u)^{-1} K diag(u); G is unchanged, so the spectrum is too.
SkewedOperator similarity_transform(const SkewedOperator& op, const Vector& u);

}  // namespace ldp
