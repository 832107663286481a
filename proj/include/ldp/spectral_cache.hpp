#pragma once

#include "ldp/torus_spectral.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ldp {

/// On-disk store of spectral results, one JSON file per (problem identity, lambda).
/// Lambda is rounded to 1e-12 before hashing. Writes go through a temporary file and a
/// rename, so concurrent writers of the same key leave a complete file.
class SpectralCache {
 public:
  explicit SpectralCache(std::filesystem::path dir);

  std::optional<SpectralResult> load(const std::string& identity, ConstPoint lambda) const;
  void store(const std::string& identity, ConstPoint lambda, const SpectralResult& result) const;

  static std::string key(const std::string& identity, ConstPoint lambda);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace ldp
