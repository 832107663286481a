#pragma once

#include "ldp/environment.hpp"
#include "ldp/kernel.hpp"
#include "ldp/spectral_cache.hpp"
#include "ldp/torus_spectral.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace ldp {

struct HamiltonianSettings {
  /// Torus points per axis for spectral backings.
  int grid_n = 64;
  SpectralSettings spectral;
  /// Optional on-disk spectral cache.
  std::optional<std::filesystem::path> cache_dir;
};

struct HValue {
  double value = 0.0;
  bool in_gamma = true;
};

/// H(lambda) or H(x, lambda) over every regime:
///   constant          Lambda (M(lambda) - 1)
///   slow              Lambda(x, x) (M(lambda) - 1)
///   periodic          s(A_lambda) on the torus
///   locally periodic  s(A_{x, lambda}) with the field frozen at x.
/// Pass an empty point for x in the homogeneous regimes. Safe for concurrent use.
class Hamiltonian {
 public:
  enum class Backing { ClosedForm, Slow, Spectral };

  Hamiltonian(JumpKernel kernel, RateField field, HamiltonianSettings settings = {});

  Backing backing() const { return backing_; }
  int dim() const { return kernel_.dim(); }
  const JumpKernel& kernel() const { return kernel_; }
  const RateField& field() const { return field_; }
  const HamiltonianSettings& settings() const { return settings_; }
  /// True when H depends on x.
  bool x_dependent() const { return !field_.is_homogeneous(); }

  HValue value(ConstPoint x, ConstPoint lambda) const;
  /// Gradient in lambda; throws NotInGamma on the flat branch.
  Vector grad(ConstPoint x, ConstPoint lambda) const;
  Matrix hess(ConstPoint x, ConstPoint lambda) const;

  /// min G for the frozen field at x (Lambda(x, x) for closed forms). H >= -g_min always.
  double g_min(ConstPoint x) const;

  /// Full spectral data (spectral backing only).
  SpectralResult spectral(ConstPoint x, ConstPoint lambda) const;
  std::shared_ptr<const TorusProblem> problem(ConstPoint x) const;

  std::string description() const;

 private:
  struct Entry {
    std::optional<HValue> value;
    std::optional<Vector> grad;
    std::optional<Matrix> hess;
  };

  double scale(ConstPoint x) const;
  std::string point_key(ConstPoint x) const;
  std::string entry_key(ConstPoint x, ConstPoint lambda) const;
  Entry lookup(const std::string& key) const;
  void remember(const std::string& key, const Entry& update) const;

  JumpKernel kernel_;
  RateField field_;
  HamiltonianSettings settings_;
  Backing backing_;
  std::optional<SpectralCache> disk_;

  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, Entry> cache_;
  mutable std::unordered_map<std::string, std::shared_ptr<const TorusProblem>> problems_;
};

}  // namespace ldp
