#pragma once

#include "ldp/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ldp {

/// Piecewise-linear curve on [0, T] through breakpoints (t_j, x_j).
struct Path {
  std::vector<double> times;
  std::vector<Vector> points;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  std::size_t size() const { return times.size(); }
  double horizon() const { return times.back(); }
  std::size_t segments() const { return times.size() - 1; }

  /// Linear interpolation, clamped to [0, T].
  Vector at(double t) const;
  Vector velocity(std::size_t segment) const;

  /// Throws InvalidArgument unless t_0 = 0, times strictly increase and points are finite.
  void check() const;

  /// x0 + v t on [0, T] with `segments` equal pieces.
  static Path straight(const Vector& x0, const Vector& velocity, double T, int segments = 1);

  /// One breakpoint per line: "t x_1 ... x_d". '#' starts a comment.
  static Path parse(std::istream& in);
  static Path read(const std::string& file);
  void print(std::ostream& out) const;
  void write(const std::string& file) const;
};

}  // namespace ldp
