#pragma once

#include "ldp/hamiltonian.hpp"

#include <string>
#include <vector>

namespace ldp {

struct LegendreSettings {
  /// Newton stops when |zeta - grad H| <= grad_tol * max(1, |zeta|).
  double grad_tol = 1e-8;
  /// Golden-section stops when the bracket is narrower than this.
  double bracket_tol = 1e-10;
  int max_newton = 200;
  /// Newton steps are clipped to this length (H grows super-exponentially).
  double max_step = 2.0;
  int max_sweeps = 60;
  /// The a priori search radius may not exceed this.
  double max_radius = 1e3;
  /// Exposed points need a Hessian eigenvalue above this at the maximizer.
  double exposed_eig = 1e-6;
  /// Step of the Gamma-membership probes around the maximizer.
  double probe = 1e-4;
};

struct LagrangianValue {
  double value = 0.0;
  /// Maximizer of lambda.zeta - H(lambda).
  Vector argmax;
  /// The maximizer sits on the boundary of Gamma (flat branch touches it).
  bool boundary = false;
  bool exposed = false;
  bool on_linear_segment = false;
  /// "newton", "golden" (d = 1) or "coordinate" (d >= 2).
  std::string method;
};

/// L(zeta) = sup_lambda (lambda.zeta - H(lambda)), or L(x, zeta) for x-dependent H.
class Lagrangian {
 public:
  explicit Lagrangian(const Hamiltonian& h, LegendreSettings settings = {});

  LagrangianValue operator()(ConstPoint x, ConstPoint zeta) const;
  double value(ConstPoint x, ConstPoint zeta) const { return (*this)(x, zeta).value; }
  /// L_t(zeta) = sup (lambda.zeta - t H(lambda)) = t L(zeta / t).
  double l_t(ConstPoint x, ConstPoint zeta, double t) const;
  /// zeta* = grad H(x, 0), the zero of L.
  Vector zeta_star(ConstPoint x) const;
  /// Radius R with H(R alpha) >= R |zeta| + 1 on the probed directions.
  double search_radius(ConstPoint x, ConstPoint zeta) const;

  const Hamiltonian& hamiltonian() const { return h_; }
  const LegendreSettings& settings() const { return settings_; }

 private:
  double objective(ConstPoint x, ConstPoint zeta, const Vector& lambda) const;
  void classify(ConstPoint x, LagrangianValue& out) const;

  const Hamiltonian& h_;
  LegendreSettings settings_;
};

struct TailFit {
  /// Least-squares fit ln L(r phi) = c + power ln r + log_exponent ln ln r.
  double power = 0.0;
  double log_exponent = 0.0;
  /// Mean of L(r phi) / (r (ln r)^{(p-1)/p}) over the two largest radii.
  double plateau = 0.0;
  /// p/(p-1) (k (p-1))^{1/p}; the envelope rate k plays the role of b.
  double predicted_plateau = 0.0;
  /// L(zeta* + 0.05 phi) / (0.5 * 0.05^2 phi.Sigma^{-1}phi) - 1, Sigma = Hessian of H at 0.
  double small_zeta_rel_error = 0.0;
  double r_squared = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
};

/// Large-|zeta| growth of L along a ray (constant-Lambda regime).
TailFit tail_diagnostic(const Lagrangian& lagrangian, ConstPoint direction,
                        const std::vector<double>& radii);

}  // namespace ldp
