#pragma once

#include "ldp/environment.hpp"

#include <string>
#include <vector>

/// Built-in rate fields used by experiments and tests.
namespace ldp::fields {

/// coeff * cos(2 pi (k_xi.xi + k_eta.eta)), or sin when `sine` is set.
struct TrigTerm {
  double coeff = 0.0;
  std::vector<int> k_xi;
  std::vector<int> k_eta;
  bool sine = false;
};

/// c0 + sum of TrigTerm; bounds are c0 -/+ sum |coeff|.
struct TrigPolynomial {
  int dim = 1;
  double c0 = 1.0;
  std::vector<TrigTerm> terms;

  double operator()(ConstPoint xi, ConstPoint eta) const;
  double lower_bound() const;
  double upper_bound() const;
  std::string description() const;
};

/// Componentwise distance to the nearest lattice translate, each coordinate in [-1/2, 1/2].
double torus_distance(ConstPoint a, ConstPoint b);

/// Periodic single peak: alpha2 within c/2 of z0, alpha1 beyond c, C^1 smoothstep between.
/// alpha2 is fixed by int_{[-1/2,1/2]^d} Lambda0 = 1.
class PeakProfile {
 public:
  PeakProfile(int dim, double alpha1, double c, std::vector<double> z0);

  double operator()(ConstPoint z) const;
  /// 1 on the plateau, 0 on the floor.
  double shape(ConstPoint z) const;

  int dim() const { return dim_; }
  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }
  double width() const { return c_; }
  const std::vector<double>& center() const { return z0_; }
  std::string description() const;

 private:
  int dim_;
  double alpha1_;
  double alpha2_;
  double c_;
  std::vector<double> z0_;
};

/// b(xi) = b_min + (1 - b_min) (dist(xi, x*) / dist_max)^beta, a periodic cusp with minimum
/// b_min at x* and maximum 1.
class CuspProfile {
 public:
  CuspProfile(int dim, double b_min, double beta, std::vector<double> center);

  double operator()(ConstPoint xi) const;
  int dim() const { return dim_; }
  double b_min() const { return b_min_; }
  double beta() const { return beta_; }
  /// || b / (b - b_min) ||_{L^2(T^d)}, finite when 2 beta < d.
  double ratio_l2_norm() const;
  std::string description() const;

 private:
  int dim_;
  double b_min_;
  double beta_;
  std::vector<double> center_;
};

RateField constant(int dim, double value);
RateField periodic_trig(const TrigPolynomial& poly);
/// Lambda(xi, eta) = b(xi) Lambda0(xi - eta).
RateField separable(const CuspProfile& b, const PeakProfile& peak);
/// Slow field min(cap, c0 + c1 (x_1^2 + y_1^2) / 2), so Lambda(x, x) = c0 + c1 x_1^2 below the cap.
RateField diag_quadratic(int dim, double c0, double c1, double cap);
/// Locally periodic min(cap, c0 + c1 (x_1^2 + y_1^2) / 2) * g(xi, eta).
RateField quadratic_times_trig(double c0, double c1, double cap, const TrigPolynomial& g);

}  // namespace ldp::fields
