#include "ldp/field_library.hpp"

#include "ldp/error.hpp"
#include "ldp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ldp::fields {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double v) { return v - std::round(v); }

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

}  // namespace

double TrigPolynomial::operator()(ConstPoint xi, ConstPoint eta) const {
  double v = c0;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (std::size_t i = 0; i < t.k_xi.size() && i < xi.size(); ++i) phase += t.k_xi[i] * xi[i];
    for (std::size_t i = 0; i < t.k_eta.size() && i < eta.size(); ++i) phase += t.k_eta[i] * eta[i];
    v += t.coeff * (t.sine ? std::sin(kTwoPi * phase) : std::cos(kTwoPi * phase));
  }
  return v;
}

double TrigPolynomial::lower_bound() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return c0 - s;
}

double TrigPolynomial::upper_bound() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return c0 + s;
}

std::string TrigPolynomial::description() const {
  std::ostringstream out;
  out.precision(17);
  out << "trig(d=" << dim << ";c0=" << c0;
  for (const auto& t : terms) {
    out << ";" << (t.sine ? "sin" : "cos") << ":" << t.coeff << ":";
    for (int k : t.k_xi) out << k << ",";
    out << "|";
    for (int k : t.k_eta) out << k << ",";
  }
  out << ")";
  return out.str();
}

double torus_distance(ConstPoint a, ConstPoint b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = wrap(a[i] - b[i]);
    s += w * w;
  }
  return std::sqrt(s);
}

PeakProfile::PeakProfile(int dim, double alpha1, double c, std::vector<double> z0)
    : dim_(dim), alpha1_(alpha1), alpha2_(alpha1), c_(c), z0_(std::move(z0)) {
  if (static_cast<int>(z0_.size()) != dim_)
    throw Error(ErrorKind::InvalidArgument, "peak centre has the wrong dimension");
  if (!(alpha1_ > 0.0) || !(alpha1_ < 1.0))
    throw Error(ErrorKind::InvalidArgument, "peak floor alpha1 must lie in (0, 1)", alpha1_);
  if (!(c_ > 0.0) || !(c_ <= 0.5))
    throw Error(ErrorKind::InvalidArgument, "peak width c must lie in (0, 1/2]", c_);
  // The plateau never wraps (c <= 1/2), so the shape integral is radial:
  // |S^{d-1}| int_0^c s(r) r^{d-1} dr.
  const double sphere =
      2.0 * std::pow(std::numbers::pi, 0.5 * dim_) / std::tgamma(0.5 * dim_);
  const double radial = quad::integrate(
      [&](double r) {
        const double s = r <= 0.5 * c_ ? 1.0 : smoothstep((c_ - r) / (0.5 * c_));
        return s * std::pow(r, dim_ - 1);
      },
      0.0, c_, 16, 8);
  const double mass = dim_ == 1 ? 2.0 * radial : sphere * radial;
  alpha2_ = alpha1_ + (1.0 - alpha1_) / mass;
}

double PeakProfile::shape(ConstPoint z) const {
  const double r = torus_distance(z, ConstPoint(z0_.data(), z0_.size()));
  if (r <= 0.5 * c_) return 1.0;
  if (r >= c_) return 0.0;
  return smoothstep((c_ - r) / (0.5 * c_));
}

double PeakProfile::operator()(ConstPoint z) const {
  return alpha1_ + (alpha2_ - alpha1_) * shape(z);
}

std::string PeakProfile::description() const {
  std::ostringstream out;
  out.precision(17);
  out << "peak(alpha1=" << alpha1_ << ";c=" << c_ << ";z0=" << join(z0_) << ")";
  return out.str();
}

CuspProfile::CuspProfile(int dim, double b_min, double beta, std::vector<double> center)
    : dim_(dim), b_min_(b_min), beta_(beta), center_(std::move(center)) {
  if (static_cast<int>(center_.size()) != dim_)
    throw Error(ErrorKind::InvalidArgument, "cusp centre has the wrong dimension");
  if (!(b_min_ > 0.0) || !(b_min_ < 1.0))
    throw Error(ErrorKind::InvalidArgument, "cusp minimum b_min must lie in (0, 1)", b_min_);
  if (!(beta_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "cusp exponent must be positive", beta_);
}

double CuspProfile::operator()(ConstPoint xi) const {
  const double dist_max = 0.5 * std::sqrt(static_cast<double>(dim_));
  const double r = torus_distance(xi, ConstPoint(center_.data(), center_.size())) / dist_max;
  return b_min_ + (1.0 - b_min_) * std::pow(r, beta_);
}

double CuspProfile::ratio_l2_norm() const {
  if (!(2.0 * beta_ < dim_)) return INFINITY;
  const double q = b_min_ / (1.0 - b_min_);
  if (dim_ == 1) {
    // b / (b - b_min) = 1 + q s^{-beta} with s = 2 dist uniform on [0, 1].
    return std::sqrt(1.0 + 2.0 * q / (1.0 - beta_) + q * q / (1.0 - 2.0 * beta_));
  }
  // Midpoint grid; the singularity is integrable and never hit by a cell centre
  // when the centre sits on a lattice node or a cell boundary.
  const int n = dim_ == 2 ? 1024 : 128;
  std::vector<double> xi(static_cast<std::size_t>(dim_));
  std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
  double sum = 0.0;
  while (true) {
    for (int a = 0; a < dim_; ++a)
      xi[static_cast<std::size_t>(a)] = (idx[static_cast<std::size_t>(a)] + 0.5) / n;
    const double b = (*this)(ConstPoint(xi.data(), xi.size()));
    const double ratio = b / (b - b_min_);
    sum += ratio * ratio;
    int a = 0;
    while (a < dim_ && ++idx[static_cast<std::size_t>(a)] == n) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == dim_) break;
  }
  return std::sqrt(sum / std::pow(n, dim_));
}

std::string CuspProfile::description() const {
  std::ostringstream out;
  out.precision(17);
  out << "cusp(bmin=" << b_min_ << ";beta=" << beta_ << ";x*=" << join(center_) << ")";
  return out.str();
}

RateField constant(int dim, double value) { return RateField::constant(dim, value); }

RateField periodic_trig(const TrigPolynomial& poly) {
  if (!(poly.lower_bound() > 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "trigonometric field must stay positive: c0 must exceed the sum of |coeff|",
                poly.lower_bound());
  return RateField::periodic(
      poly.dim, [poly](ConstPoint xi, ConstPoint eta) { return poly(xi, eta); },
      poly.lower_bound(), poly.upper_bound(), poly.description());
}

RateField separable(const CuspProfile& b, const PeakProfile& peak) {
  if (b.dim() != peak.dim())
    throw Error(ErrorKind::InvalidArgument, "separable field: profile dimensions differ");
  const int dim = b.dim();
  return RateField::periodic(
      dim,
      [b, peak, dim](ConstPoint xi, ConstPoint eta) {
        double diff[3];
        for (int i = 0; i < dim; ++i) diff[i] = xi[static_cast<std::size_t>(i)] - eta[static_cast<std::size_t>(i)];
        return b(xi) * peak(ConstPoint(diff, static_cast<std::size_t>(dim)));
      },
      b.b_min() * peak.alpha1(), peak.alpha2(),
      "separable(" + b.description() + "*" + peak.description() + ")");
}

RateField diag_quadratic(int dim, double c0, double c1, double cap) {
  if (!(c0 > 0.0) || !(c1 >= 0.0) || !(cap >= c0))
    throw Error(ErrorKind::InvalidArgument, "diag-quadratic field needs c0 > 0, c1 >= 0, cap >= c0");
  std::ostringstream desc;
  desc.precision(17);
  desc << "diag-quadratic(c0=" << c0 << ";c1=" << c1 << ";cap=" << cap << ")";
  return RateField::slow(
      dim,
      [c0, c1, cap](ConstPoint x, ConstPoint y) {
        return std::min(cap, c0 + 0.5 * c1 * (x[0] * x[0] + y[0] * y[0]));
      },
      c0, cap, desc.str());
}

RateField quadratic_times_trig(double c0, double c1, double cap, const TrigPolynomial& g) {
  if (!(c0 > 0.0) || !(c1 >= 0.0) || !(cap >= c0))
    throw Error(ErrorKind::InvalidArgument, "quadratic factor needs c0 > 0, c1 >= 0, cap >= c0");
  if (!(g.lower_bound() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "trigonometric factor must stay positive");
  std::ostringstream desc;
  desc.precision(17);
  desc << "quadratic-times-trig(c0=" << c0 << ";c1=" << c1 << ";cap=" << cap << ";"
       << g.description() << ")";
  return RateField::locally_periodic(
      g.dim,
      [c0, c1, cap, g](ConstPoint x, ConstPoint y, ConstPoint xi, ConstPoint eta) {
        return std::min(cap, c0 + 0.5 * c1 * (x[0] * x[0] + y[0] * y[0])) * g(xi, eta);
      },
      c0 * g.lower_bound(), cap * g.upper_bound(), desc.str());
}

}  // namespace ldp::fields
