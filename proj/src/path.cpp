#include "ldp/path.hpp"

#include "ldp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ldp {

Vector Path::at(double t) const {
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
  return (1.0 - w) * points[j - 1] + w * points[j];
}

Vector Path::velocity(std::size_t segment) const {
  return (points[segment + 1] - points[segment]) / (times[segment + 1] - times[segment]);
}

void Path::check() const {
  if (times.size() < 2 || times.size() != points.size())
    throw Error(ErrorKind::InvalidArgument, "path needs at least two breakpoints");
  if (times.front() != 0.0) throw Error(ErrorKind::InvalidArgument, "path must start at t = 0");
  const auto d = points.front().size();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j]) || !points[j].allFinite())
      throw Error(ErrorKind::InvalidArgument, "path has a non-finite entry");
    if (points[j].size() != d) throw Error(ErrorKind::InvalidArgument, "path points differ in dimension");
    if (j > 0 && !(times[j] > times[j - 1]))
      throw Error(ErrorKind::InvalidArgument, "path times must increase strictly");
  }
}

Path Path::straight(const Vector& x0, const Vector& velocity, double T, int segments) {
  if (!(T > 0.0) || segments < 1)
    throw Error(ErrorKind::InvalidArgument, "straight path needs T > 0 and at least one segment");
  Path p;
  for (int j = 0; j <= segments; ++j) {
    const double t = T * j / segments;
    p.times.push_back(t);
    p.points.push_back(x0 + t * velocity);
  }
  return p;
}

Path Path::parse(std::istream& in) {
  Path p;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream row(line);
    double t = 0.0;
    if (!(row >> t)) continue;
    std::vector<double> x;
    for (double v; row >> v;) x.push_back(v);
    if (x.empty()) throw Error(ErrorKind::Io, "path line has no coordinates: " + line);
    p.times.push_back(t);
    p.points.push_back(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
  }
  p.check();
  return p;
}

Path Path::read(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open path file " + file);
  return parse(in);
}

void Path::print(std::ostream& out) const {
  out << std::setprecision(17);
  for (std::size_t j = 0; j < times.size(); ++j) {
    out << times[j];
    for (Eigen::Index a = 0; a < points[j].size(); ++a) out << ' ' << points[j][a];
    out << '\n';
  }
}

void Path::write(const std::string& file) const {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::Io, "cannot write path file " + file);
  print(out);
}

}  // namespace ldp
