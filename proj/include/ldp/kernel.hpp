#pragma once

#include "ldp/rng.hpp"
#include "ldp/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ldp {

enum class KernelFamily { GeneralizedGaussian, Box, Tabulated };

const char* to_string(KernelFamily family);

/// Pointwise bound a(z) <= C exp(-k |z|^p).
struct DecayEnvelope {
  double C = 1.0;
  double k = 1.0;
  double p = 2.0;

  double at(double r) const;
};

/// M(lambda) = int a(z) exp(-lambda.z) dz together with its gradient and Hessian.
struct MomentSet {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

struct KernelSettings {
  /// Envelope tail mass allowed beyond the truncation box.
  double tail_tol = 1e-12;
  /// Relative agreement of two successive quadrature levels.
  double rel_tol = 1e-13;
  /// Rejection sampler gives up after this many proposals.
  std::size_t max_rejection_attempts = 100000;
};

class TiltedSampler;

/// Jump-size density a(z) on R^d: normalized, nonnegative, with super-exponential decay.
///
/// Instances are immutable and cheap to copy; every member is safe to call
/// concurrently. Sampling takes a caller-owned generator.
class JumpKernel {
 public:
  /// a(z) = c exp(-k |z|^p), c chosen so that int a = 1.
  static JumpKernel generalized_gaussian(int dim, double k, double p, KernelSettings settings = {});
  /// Indicator of the unit cube [-1/2, 1/2]^d. Faces carry the value 1/2 per coordinate.
  static JumpKernel box(int dim, KernelSettings settings = {});
  /// One-dimensional piecewise-linear kernel through (grid[i], values[i]), zero outside
  /// the table. Values are rescaled to unit mass; the envelope is checked on the table.
  static JumpKernel tabulated(std::vector<double> grid, std::vector<double> values,
                              DecayEnvelope envelope, KernelSettings settings = {});
  /// Whitespace-separated "z value" lines; '#' starts a comment.
  static JumpKernel from_table_file(const std::string& path, DecayEnvelope envelope,
                                    KernelSettings settings = {});

  int dim() const;
  KernelFamily family() const;
  const DecayEnvelope& envelope() const;
  double norm_const() const;
  const KernelSettings& settings() const;

  double eval(ConstPoint z) const;

  /// int a(z) f(z) dz for f growing at most like exp(tilt_norm |z|) times a polynomial.
  double integrate(const std::function<double(ConstPoint)>& f, double tilt_norm = 0.0) const;

  double exp_moment(ConstPoint lambda) const;
  Vector exp_moment_grad(ConstPoint lambda) const;
  Matrix exp_moment_hess(ConstPoint lambda) const;
  MomentSet exp_moments(ConstPoint lambda) const;

  /// int a(z) z dz.
  Vector mean() const;
  /// int a(z) z z^T dz.
  Matrix second_moment() const;

  /// Mass of the open half-space {z . alpha > 0}; mass on the hyperplane counts half.
  double halfspace_mass(ConstPoint alpha) const;

  /// Half-width R of the cube [-R, R]^d outside which the envelope tilted by
  /// exp(tilt_norm |z|) is negligible (below tail_tol).
  double truncation_radius(double tilt_norm) const;

  bool is_symmetric() const;

  void sample(Rng& rng, std::span<double> out) const;
  Vector sample(Rng& rng) const;

  /// Sampler for the tilted density a(z) exp(-lambda.z) / M(lambda).
  TiltedSampler tilted(ConstPoint lambda) const;

  /// Invariant suite: normalization, positivity, envelope, half-space certificate C0.
  ValidationReport validate(std::uint64_t seed = 1) const;

  /// Canonical description, used as an identity for caching and metadata.
  std::string description() const;

  struct Data;

 private:
  friend class TiltedSampler;

  explicit JumpKernel(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  template <class Visitor>
  void visit_nodes(int level, double radius, Visitor&& visit) const;
  int max_level() const;
  bool graded() const;
  double level_tol() const;

  std::shared_ptr<const Data> data_;
};

class TiltedSampler {
 public:
  /// ln M(lambda).
  double log_mgf() const { return log_mgf_; }
  const Vector& lambda() const { return lambda_; }

  void sample(Rng& rng, std::span<double> out) const;

 private:
  friend class JumpKernel;

  enum class Mode { Untilted, ShiftedGaussian, Box, Rejection, Intervals };

  JumpKernel kernel_;
  Vector lambda_;
  double log_mgf_ = 0.0;
  Mode mode_ = Mode::Untilted;
  // ShiftedGaussian: mean and standard deviation per coordinate.
  Vector shift_;
  double sd_ = 1.0;
  // Rejection: proposal exp(-k_prop |z - shift|^p), log of the ratio bound.
  double proposal_k_ = 0.0;
  double log_bound_ = 0.0;
  // Intervals: cumulative tilted mass per table interval and per-interval bound.
  std::vector<double> interval_cdf_;
  std::vector<double> interval_bound_;

  explicit TiltedSampler(JumpKernel kernel) : kernel_(std::move(kernel)) {}
};

}  // namespace ldp
