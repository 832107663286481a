#pragma once

#include "ldp/legendre.hpp"
#include "ldp/path.hpp"

#include <vector>

namespace ldp {

struct RateSettings {
  /// Gauss-Legendre order per segment for x-dependent Lagrangians; doubled until two
  /// successive orders agree to rel_tol, up to max_order.
  int gauss_order = 4;
  int max_order = 64;
  double rel_tol = 1e-6;
  /// Segments evaluated concurrently.
  int workers = 1;
};

struct RateReport {
  double value = 0.0;
  /// Some segment has infinite cost (the Legendre search ran off to infinity).
  bool infinite = false;
  std::vector<double> segments;
  /// Quadrature order finally used per segment (1 for homogeneous regimes).
  std::vector<int> nodes_used;
};

/// I(path) = int_0^T L(path(t), path'(t)) dt for a piecewise-linear path.
RateReport rate(const Path& path, const Lagrangian& lagrangian, const RateSettings& settings = {});

struct PathDistance {
  /// Upper bound of dist(f, g) = inf_pi max(l(pi), sup_t |f(t) - g(pi(t))|).
  double distance = 0.0;
  /// sup_t |f(t) - g(t)|, the identity reparametrization.
  double sup = 0.0;
  /// l(pi) = sup |log slope| of the optimal piecewise-linear pi found.
  double log_slope = 0.0;
  /// Knots (s_k, pi(s_k)).
  std::vector<double> knots;
  std::vector<double> values;
};

/// Minimizes over piecewise-linear pi with breakpoints at `knots` equal steps and values
/// on a grid `refine` times finer. The result never exceeds the sup distance.
PathDistance path_distance(const Path& f, const Path& g, int knots = 64, int refine = 4);

/// sup_t |f(t) - g(pi(t))| for a piecewise-linear pi through (knots, values).
double sup_distance(const Path& f, const Path& g, const std::vector<double>& knots,
                    const std::vector<double>& values);

/// Classical RK4 on x' = grad_lambda H(x, 0), fixed step T / steps.
Path effective_flow(const Hamiltonian& h, const Vector& x0, double T, int steps = 512);

/// Largest |v| along `direction` with L(x, v) <= s (bisection; L is convex with L(zeta*) = 0).
double velocity_bound(const Lagrangian& lagrangian, ConstPoint x, ConstPoint direction, double s);

}  // namespace ldp
