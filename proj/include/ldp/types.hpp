#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace ldp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Read-only view of a point in R^d. An empty view means "no point".
using ConstPoint = std::span<const double>;

inline ConstPoint view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

inline Vector to_vector(ConstPoint p) {
  Vector v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
  return v;
}

inline double dot(ConstPoint a, ConstPoint b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(ConstPoint a) { return std::sqrt(dot(a, a)); }

/// One named check of an invariant suite.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  void add(std::string name, bool passed, double value, std::string detail = {}) {
    checks.push_back({std::move(name), passed, value, std::move(detail)});
  }
  void append(const ValidationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
};

}  // namespace ldp
