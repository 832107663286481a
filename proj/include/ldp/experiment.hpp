#pragma once

#include "ldp/hamiltonian.hpp"
#include "ldp/legendre.hpp"
#include "ldp/path_rate.hpp"
#include "ldp/scenario.hpp"
#include "ldp/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ldp::experiment {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Built-in configurations: "gaussian-constant", "compound-poisson", "gamma-example", "slow".
Json builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Reads a JSON file, or "builtin:NAME".
Json load_config(const std::string& source);

/// Sets a dotted key ("simulation.replications") to a value parsed as JSON, falling back to
/// a plain string.
void apply_override(Json& config, const std::string& assignment);

JumpKernel make_kernel(const Json& block, const std::filesystem::path& base_dir = {});
RateField make_field(const Json& block, int dim);
GammaCandidate make_gamma_candidate(const Json& block, int dim);
SpectralSettings make_spectral_settings(const Json& block);
LegendreSettings make_legendre_settings(const Json& block);
RateSettings make_rate_settings(const Json& block);
/// Straight tubes run from x0 over [0, T].
Event make_event(const Json& block, int dim, const Vector& x0, double T,
                     const std::filesystem::path& base_dir = {});

/// Evenly spaced grid {from, to, count}.
std::vector<double> make_grid(const Json& block);
Vector make_vector(const Json& value, int dim);

/// Everything the subcommands need, assembled from one validated config.
struct Experiment {
  Json config;
  std::filesystem::path base_dir;
  int dim = 1;
  JumpKernel kernel;
  RateField field;
  HamiltonianSettings hamiltonian_settings;
  LegendreSettings legendre_settings;
  RateSettings rate_settings;
  int workers = 1;
  std::uint64_t seed = 1;

  /// Value at a dotted key, or `fallback` when absent.
  template <class T>
  T get(const std::string& key, T fallback) const;
};

Experiment build(const Json& config, const std::filesystem::path& base_dir, int workers,
                 std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> cache);

/// FNV-1a of the canonical dump.
std::string config_hash(const Json& config);

const Json* find(const Json& config, const std::string& dotted);

template <class T>
T Experiment::get(const std::string& key, T fallback) const {
  const Json* v = find(config, key);
  return v ? v->get<T>() : fallback;
}

}  // namespace ldp::experiment
