#pragma once

#include "ldp/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace ldp {

enum class Regime { Constant, Periodic, Slow, LocallyPeriodic };

const char* to_string(Regime regime);

/// f(xi, eta), or f(x, y) for slow fields.
using PairFn = std::function<double(ConstPoint, ConstPoint)>;
/// f(x, y, xi, eta).
using QuadFn = std::function<double(ConstPoint, ConstPoint, ConstPoint, ConstPoint)>;

/// Pure periodic field (xi, eta) -> Lambda(xi, eta), 1-periodic in each argument.
/// This is what the spectral solver consumes.
class PeriodicPairField {
 public:
  PeriodicPairField(int dim, PairFn f, double lambda_minus, double lambda_plus,
                    std::string description);
  static PeriodicPairField constant(int dim, double value);

  double operator()(ConstPoint xi, ConstPoint eta) const { return fn_(xi, eta); }

  int dim() const { return dim_; }
  bool is_constant() const { return constant_; }
  double lambda_minus() const { return lo_; }
  double lambda_plus() const { return hi_; }
  const std::string& description() const { return description_; }

 private:
  int dim_;
  PairFn fn_;
  double lo_;
  double hi_;
  std::string description_;
  bool constant_ = false;
};

/// The environment Lambda in one of four regimes, with two-sided bounds.
class RateField {
 public:
  static RateField constant(int dim, double value);
  static RateField periodic(int dim, PairFn f, double lambda_minus, double lambda_plus,
                            std::string description);
  static RateField slow(int dim, PairFn f, double lambda_minus, double lambda_plus,
                        std::string description);
  static RateField locally_periodic(int dim, QuadFn f, double lambda_minus, double lambda_plus,
                                    std::string description);

  Regime regime() const { return regime_; }
  int dim() const { return dim_; }
  double lambda_minus() const { return lo_; }
  double lambda_plus() const { return hi_; }
  const std::string& description() const { return description_; }
  /// True when the field does not depend on the slow variables.
  bool is_homogeneous() const { return regime_ == Regime::Constant || regime_ == Regime::Periodic; }

  /// Lambda(x, y, x/eps, y/eps). Throws Validation if the value leaves [Lambda-, Lambda+].
  double eval_scaled(ConstPoint x, ConstPoint y, double eps) const;
  /// Lambda(x, y, xi, eta) with the arguments the regime ignores dropped.
  double eval(ConstPoint x, ConstPoint y, ConstPoint xi, ConstPoint eta) const;
  /// Lambda(x, x) for slow and constant regimes.
  double diagonal(ConstPoint x) const;

  /// (xi, eta) -> Lambda(x, x, xi, eta); x is ignored for the periodic and constant regimes
  /// and the slow regime yields the constant field Lambda(x, x).
  PeriodicPairField freeze(ConstPoint x) const;

  /// Bounds, periodicity, freeze consistency and a modulus-of-continuity probe. The probe
  /// fails when a slow step of 1e-3 moves Lambda by more than continuity_threshold * Lambda+.
  ValidationReport validate(std::uint64_t seed = 1, double continuity_threshold = 0.05) const;

 private:
  RateField() = default;

  Regime regime_ = Regime::Constant;
  int dim_ = 1;
  double lo_ = 1.0;
  double hi_ = 1.0;
  double value_ = 1.0;
  PairFn pair_;
  QuadFn quad_;
  std::string description_;
};

}  // namespace ldp
