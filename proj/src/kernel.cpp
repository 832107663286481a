#include "ldp/kernel.hpp"

#include "ldp/error.hpp"
#include "ldp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ldp {

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::GeneralizedGaussian: return "generalized-gaussian";
    case KernelFamily::Box: return "box";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

double DecayEnvelope::at(double r) const { return C * std::exp(-k * std::pow(r, p)); }

struct JumpKernel::Data {
  int dim = 1;
  KernelFamily family = KernelFamily::GeneralizedGaussian;
  DecayEnvelope envelope;
  double norm = 1.0;
  KernelSettings settings;
  // Tabulated family: breakpoints and normalized values (0 is always a breakpoint
  // when it lies inside the table, so half-line integrals split cleanly).
  std::vector<double> grid;
  std::vector<double> values;
  std::string table_source;
};

namespace {

constexpr double kFaceTol = 1e-12;

double radius_of(ConstPoint z) { return norm(z); }

// Volume of the unit sphere S^{d-1}.
double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorKind::InvalidArgument, "kernel dimension must be 1, 2 or 3", dim);
}

void uniform_direction(Rng& rng, std::span<double> out) {
  if (out.size() == 1) {
    out[0] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? -1.0 : 1.0;
    return;
  }
  std::normal_distribution<double> gauss;
  double r2 = 0.0;
  do {
    r2 = 0.0;
    for (auto& v : out) {
      v = gauss(rng);
      r2 += v * v;
    }
  } while (r2 == 0.0);
  const double inv = 1.0 / std::sqrt(r2);
  for (auto& v : out) v *= inv;
}

// Radius of a generalized-gaussian variate with density prop. to exp(-k r^p) in R^d:
// r^p is Gamma(d/p, 1/k).
double gg_radius(Rng& rng, int dim, double k, double p) {
  std::gamma_distribution<double> gamma(dim / p, 1.0 / k);
  return std::pow(gamma(rng), 1.0 / p);
}

}  // namespace

JumpKernel JumpKernel::generalized_gaussian(int dim, double k, double p, KernelSettings settings) {
  check_dim(dim);
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorKind::InvalidArgument, "generalized-gaussian kernel needs k > 0", k);
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::InvalidArgument, "generalized-gaussian kernel needs p > 1", p);
  auto data = std::make_shared<Data>();
  data->dim = dim;
  data->family = KernelFamily::GeneralizedGaussian;
  data->settings = settings;
  // int exp(-k|z|^p) dz = |S^{d-1}| Gamma(d/p) / (p k^{d/p})
  const double mass = sphere_area(dim) * std::tgamma(dim / p) / (p * std::pow(k, dim / p));
  data->norm = 1.0 / mass;
  data->envelope = {data->norm, k, p};
  return JumpKernel(std::move(data));
}

JumpKernel JumpKernel::box(int dim, KernelSettings settings) {
  check_dim(dim);
  auto data = std::make_shared<Data>();
  data->dim = dim;
  data->family = KernelFamily::Box;
  data->settings = settings;
  data->norm = 1.0;
  // On the cube |z|^2 <= d/4, so exp(d/4 - |z|^2) >= 1 there.
  data->envelope = {std::exp(0.25 * dim), 1.0, 2.0};
  return JumpKernel(std::move(data));
}

JumpKernel JumpKernel::tabulated(std::vector<double> grid, std::vector<double> values,
                                 DecayEnvelope envelope, KernelSettings settings) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "kernel table needs at least two (z, value) rows");
  if (!(envelope.C > 0.0) || !(envelope.k > 0.0) || !(envelope.p > 1.0))
    throw Error(ErrorKind::InvalidArgument, "tabulated kernel envelope needs C > 0, k > 0, p > 1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
      throw Error(ErrorKind::InvalidArgument, "kernel table contains a non-finite entry");
    if (values[i] < 0.0)
      throw Error(ErrorKind::Validation, "kernel table has a negative value", values[i]);
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "kernel table grid must be strictly increasing");
  }
  // Insert z = 0 as a breakpoint; the interpolant is unchanged.
  if (grid.front() < 0.0 && grid.back() > 0.0) {
    auto it = std::lower_bound(grid.begin(), grid.end(), 0.0);
    if (*it != 0.0) {
      const std::size_t j = static_cast<std::size_t>(it - grid.begin());
      const double w = (0.0 - grid[j - 1]) / (grid[j] - grid[j - 1]);
      const double v0 = values[j - 1] + w * (values[j] - values[j - 1]);
      grid.insert(grid.begin() + static_cast<std::ptrdiff_t>(j), 0.0);
      values.insert(values.begin() + static_cast<std::ptrdiff_t>(j), v0);
    }
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    mass += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
  if (!(mass > 0.0)) throw Error(ErrorKind::Validation, "kernel table has zero mass");
  for (auto& v : values) v /= mass;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double bound = envelope.at(std::abs(grid[i]));
    if (values[i] > bound * (1.0 + 1e-9))
      throw Error(ErrorKind::Validation,
                  "normalized kernel table exceeds its decay envelope at z = " +
                      std::to_string(grid[i]),
                  values[i] - bound);
  }
  auto data = std::make_shared<Data>();
  data->dim = 1;
  data->family = KernelFamily::Tabulated;
  data->settings = settings;
  data->norm = 1.0 / mass;
  data->envelope = envelope;
  data->grid = std::move(grid);
  data->values = std::move(values);
  return JumpKernel(std::move(data));
}

JumpKernel JumpKernel::from_table_file(const std::string& path, DecayEnvelope envelope,
                                       KernelSettings settings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open kernel table " + path);
  std::vector<double> z, v;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) throw Error(ErrorKind::Io, "kernel table row needs two columns: " + line);
    z.push_back(a);
    v.push_back(b);
  }
  auto kernel = tabulated(std::move(z), std::move(v), envelope, settings);
  auto data = std::make_shared<Data>(*kernel.data_);
  data->table_source = path;
  return JumpKernel(std::move(data));
}

int JumpKernel::dim() const { return data_->dim; }
KernelFamily JumpKernel::family() const { return data_->family; }
const DecayEnvelope& JumpKernel::envelope() const { return data_->envelope; }
double JumpKernel::norm_const() const { return data_->norm; }
const KernelSettings& JumpKernel::settings() const { return data_->settings; }

double JumpKernel::eval(ConstPoint z) const {
  const Data& d = *data_;
  switch (d.family) {
    case KernelFamily::GeneralizedGaussian:
      return d.norm * std::exp(-d.envelope.k * std::pow(radius_of(z), d.envelope.p));
    case KernelFamily::Box: {
      double v = 1.0;
      for (double c : z) {
        const double a = std::abs(c);
        if (a > 0.5 + kFaceTol) return 0.0;
        if (a > 0.5 - kFaceTol) v *= 0.5;
      }
      return v;
    }
    case KernelFamily::Tabulated: {
      const double x = z[0];
      if (x < d.grid.front() || x > d.grid.back()) return 0.0;
      auto it = std::upper_bound(d.grid.begin(), d.grid.end(), x);
      if (it == d.grid.end()) return d.values.back();
      const std::size_t j = static_cast<std::size_t>(it - d.grid.begin());
      const double w = (x - d.grid[j - 1]) / (d.grid[j] - d.grid[j - 1]);
      return d.values[j - 1] + w * (d.values[j] - d.values[j - 1]);
    }
  }
  return 0.0;
}

double JumpKernel::truncation_radius(double tilt_norm) const {
  const Data& d = *data_;
  switch (d.family) {
    case KernelFamily::Box: return 0.5;
    case KernelFamily::Tabulated: return std::max(std::abs(d.grid.front()), std::abs(d.grid.back()));
    case KernelFamily::GeneralizedGaussian: break;
  }
  const double k = d.envelope.k, p = d.envelope.p;
  const double target = std::log(d.settings.tail_tol);
  auto log_tail = [&](double r) {
    return std::log(d.envelope.C) - k * std::pow(r, p) + tilt_norm * r + std::log1p(r * r) +
           d.dim * std::log(2.0 * r);
  };
  // Start past the maximum of -k r^p + t r, where the tail is decreasing.
  double lo = std::max(1.0, std::pow(tilt_norm / (k * p), 1.0 / (p - 1.0)));
  double hi = lo;
  while (log_tail(hi) >= target) {
    lo = hi;
    hi *= 1.25;
  }
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_tail(mid) >= target ? lo : hi) = mid;
  }
  return hi;
}

bool JumpKernel::graded() const {
  const Data& d = *data_;
  return d.family == KernelFamily::GeneralizedGaussian &&
         std::abs(d.envelope.p / 2.0 - std::round(d.envelope.p / 2.0)) > 1e-12;
}

double JumpKernel::level_tol() const {
  // Tensor sums over ~1e5 graded nodes stop improving near 1e-12.
  return graded() && data_->dim >= 2 ? std::max(data_->settings.rel_tol, 1e-11) : data_->settings.rel_tol;
}

int JumpKernel::max_level() const {
  const Data& d = *data_;
  switch (d.family) {
    case KernelFamily::GeneralizedGaussian:
      if (graded()) return d.dim == 1 ? 8 : (d.dim == 2 ? 4 : 2);
      return d.dim == 1 ? 12 : (d.dim == 2 ? 7 : 4);
    case KernelFamily::Box: return d.dim == 1 ? 6 : (d.dim == 2 ? 4 : 2);
    case KernelFamily::Tabulated: return 6;
  }
  return 1;
}

// Calls visit(z, w) for every node of the level-`level` rule, where
// sum w f(z) approximates int a(z) f(z) dz; w already includes a(z).
template <class Visitor>
void JumpKernel::visit_nodes(int level, double radius, Visitor&& visit) const {
  const Data& d = *data_;
  const int dim = d.dim;
  std::vector<double> z(static_cast<std::size_t>(dim));
  const ConstPoint zv(z.data(), z.size());

  // Tensor product of a 1-D rule (nodes, weights) over all axes.
  auto tensor = [&](const std::vector<double>& nodes, const std::vector<double>& weights) {
    const std::size_t n = nodes.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
      double w = 1.0;
      for (int a = 0; a < dim; ++a) {
        z[static_cast<std::size_t>(a)] = nodes[idx[static_cast<std::size_t>(a)]];
        w *= weights[idx[static_cast<std::size_t>(a)]];
      }
      const double av = eval(zv);
      if (av > 0.0) visit(zv, w * av);
      int a = 0;
      while (a < dim && ++idx[static_cast<std::size_t>(a)] == n) idx[static_cast<std::size_t>(a++)] = 0;
      if (a == dim) break;
    }
  };

  switch (d.family) {
    case KernelFamily::GeneralizedGaussian: {
      const double scale = std::pow(d.envelope.k, -1.0 / d.envelope.p);
      const double h0 = 0.5 * scale;
      const double h = h0 / std::ldexp(1.0, level);
      if (graded()) {
        // |z|^p is not smooth at the origin: Gauss-Legendre panels of width h, with the
        // innermost panel split geometrically towards 0.
        const auto& rule = quad::gauss_legendre(8);
        std::vector<double> cuts{0.0};
        constexpr double kRatio = 0.15;
        constexpr int kGraded = 12;
        for (int j = kGraded; j >= 1; --j) cuts.push_back(h * std::pow(kRatio, j));
        const long outer = static_cast<long>(std::ceil(radius / h));
        if (outer > 1e6)
          throw Error(ErrorKind::InvalidArgument, "kernel quadrature: tilt too large for the grid", radius);
        for (long j = 1; j <= outer; ++j) cuts.push_back(static_cast<double>(j) * h);
        std::vector<double> nodes, weights;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
          const double mid = 0.5 * (cuts[c] + cuts[c + 1]), half = 0.5 * (cuts[c + 1] - cuts[c]);
          for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            for (double sign : {-1.0, 1.0}) {
              nodes.push_back(sign * (mid + half * rule.nodes[i]));
              weights.push_back(half * rule.weights[i]);
            }
          }
        }
        tensor(nodes, weights);
        break;
      }
      // Trapezoid on a symmetric grid through the origin; spectrally accurate for even p.
      const double half_nodes = std::ceil(radius / h);
      if (half_nodes > 1e7)
        throw Error(ErrorKind::InvalidArgument, "kernel quadrature: tilt too large for the grid",
                    radius);
      const long half = static_cast<long>(half_nodes);
      std::vector<double> nodes, weights;
      nodes.reserve(static_cast<std::size_t>(2 * half + 1));
      for (long j = -half; j <= half; ++j) {
        nodes.push_back(static_cast<double>(j) * h);
        weights.push_back((j == -half || j == half) ? 0.5 * h : h);
      }
      tensor(nodes, weights);
      break;
    }
    case KernelFamily::Box: {
      // Panels always split at 0 so half-space indicators along axes are exact.
      const auto& rule = quad::gauss_legendre(16);
      const int panels = 2 << level;
      const double width = 1.0 / panels;
      std::vector<double> nodes, weights;
      for (int p = 0; p < panels; ++p) {
        const double mid = -0.5 + (p + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          nodes.push_back(mid + 0.5 * width * rule.nodes[i]);
          weights.push_back(0.5 * width * rule.weights[i]);
        }
      }
      tensor(nodes, weights);
      break;
    }
    case KernelFamily::Tabulated: {
      const auto& rule = quad::gauss_legendre(8);
      const int panels = 1 << level;
      for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        const double width = (d.grid[i + 1] - d.grid[i]) / panels;
        for (int p = 0; p < panels; ++p) {
          const double mid = d.grid[i] + (p + 0.5) * width;
          for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            z[0] = mid + 0.5 * width * rule.nodes[q];
            const double av = eval(zv);
            if (av > 0.0) visit(zv, 0.5 * width * rule.weights[q] * av);
          }
        }
      }
      break;
    }
  }
}

double JumpKernel::integrate(const std::function<double(ConstPoint)>& f, double tilt_norm) const {
  const double radius = truncation_radius(tilt_norm);
  double previous = 0.0;
  for (int level = 0; level <= max_level(); ++level) {
    double sum = 0.0;
    visit_nodes(level, radius, [&](ConstPoint z, double w) { sum += w * f(z); });
    if (level > 0 &&
        std::abs(sum - previous) <= level_tol() * std::abs(sum) + 1e-300)
      return sum;
    previous = sum;
  }
  return previous;
}

double JumpKernel::exp_moment(ConstPoint lambda) const {
  if (lambda.size() != static_cast<std::size_t>(dim()))
    throw Error(ErrorKind::InvalidArgument, "exp_moment: lambda has the wrong dimension");
  for (double l : lambda)
    if (!std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "exp_moment: non-finite lambda");
  return exp_moments(lambda).value;
}

MomentSet JumpKernel::exp_moments(ConstPoint lambda) const {
  const int n = dim();
  if (lambda.size() != static_cast<std::size_t>(n))
    throw Error(ErrorKind::InvalidArgument, "exp_moments: lambda has the wrong dimension");
  for (double l : lambda)
    if (!std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "exp_moments: non-finite lambda");
  const double radius = truncation_radius(norm(lambda));
  MomentSet prev{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
  for (int level = 0; level <= max_level(); ++level) {
    MomentSet cur{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
    visit_nodes(level, radius, [&](ConstPoint z, double w) {
      // In log space: w can be subnormal where exp(-lambda.z) overflows.
      const double e = std::exp(std::log(w) - dot(lambda, z));
      cur.value += e;
      for (int i = 0; i < n; ++i) {
        cur.grad[i] -= e * z[static_cast<std::size_t>(i)];
        for (int j = 0; j <= i; ++j)
          cur.hess(i, j) += e * z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
      }
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) cur.hess(j, i) = cur.hess(i, j);
    const double tol = level_tol();
    if (level > 0 && std::abs(cur.value - prev.value) <= tol * cur.value &&
        (cur.grad - prev.grad).norm() <= tol * (cur.grad.norm() + cur.value) &&
        (cur.hess - prev.hess).norm() <= tol * (cur.hess.norm() + cur.value))
      return cur;
    prev = std::move(cur);
  }
  return prev;
}

Vector JumpKernel::exp_moment_grad(ConstPoint lambda) const { return exp_moments(lambda).grad; }
Matrix JumpKernel::exp_moment_hess(ConstPoint lambda) const { return exp_moments(lambda).hess; }

Vector JumpKernel::mean() const {
  const Vector zero = Vector::Zero(dim());
  return -exp_moments(view(zero)).grad;
}

Matrix JumpKernel::second_moment() const {
  const Vector zero = Vector::Zero(dim());
  return exp_moments(view(zero)).hess;
}

double JumpKernel::halfspace_mass(ConstPoint alpha) const {
  if (alpha.size() != static_cast<std::size_t>(dim()))
    throw Error(ErrorKind::InvalidArgument, "halfspace_mass: direction has the wrong dimension");
  const double len = norm(alpha);
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "halfspace_mass: zero direction");
  // Multi-dimensional families are all point-symmetric: every half-space through 0 has mass 1/2.
  if (dim() > 1 && is_symmetric()) return 0.5;
  const double radius = truncation_radius(0.0);
  double previous = 0.0;
  for (int level = 1; level <= max_level(); ++level) {
    double sum = 0.0;
    visit_nodes(level, radius, [&](ConstPoint z, double w) {
      const double s = dot(alpha, z) / len;
      if (s > 1e-14) sum += w;
      else if (s > -1e-14) sum += 0.5 * w;
    });
    if (level > 1 && std::abs(sum - previous) <= 1e-10) return sum;
    previous = sum;
  }
  return previous;
}

bool JumpKernel::is_symmetric() const {
  const Data& d = *data_;
  if (d.family != KernelFamily::Tabulated) return true;
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const double mirrored = -d.grid[i];
    const double a = eval(ConstPoint(&mirrored, 1));
    if (std::abs(a - d.values[i]) > 1e-12 * (1.0 + d.values[i])) return false;
  }
  return true;
}

void JumpKernel::sample(Rng& rng, std::span<double> out) const {
  const Data& d = *data_;
  switch (d.family) {
    case KernelFamily::GeneralizedGaussian: {
      const double r = gg_radius(rng, d.dim, d.envelope.k, d.envelope.p);
      uniform_direction(rng, out);
      for (auto& v : out) v *= r;
      return;
    }
    case KernelFamily::Box: {
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      for (auto& v : out) v = u(rng);
      return;
    }
    case KernelFamily::Tabulated: {
      // Rejection under the decay envelope.
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t attempt = 0; attempt < d.settings.max_rejection_attempts; ++attempt) {
        const double r = gg_radius(rng, 1, d.envelope.k, d.envelope.p);
        out[0] = u(rng) < 0.5 ? -r : r;
        if (u(rng) * d.envelope.at(r) <= eval(ConstPoint(out.data(), 1))) return;
      }
      throw Error(ErrorKind::RejectionExhausted,
                  "kernel rejection sampler exhausted its attempts; check the envelope",
                  static_cast<double>(d.settings.max_rejection_attempts));
    }
  }
}

Vector JumpKernel::sample(Rng& rng) const {
  Vector z(dim());
  sample(rng, std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
  return z;
}

TiltedSampler JumpKernel::tilted(ConstPoint lambda) const {
  TiltedSampler ts(*this);
  ts.lambda_ = to_vector(lambda);
  if (ts.lambda_.size() != dim())
    throw Error(ErrorKind::InvalidArgument, "tilted: lambda has the wrong dimension");
  const double lam_norm = ts.lambda_.norm();
  if (lam_norm == 0.0) return ts;
  ts.log_mgf_ = std::log(exp_moment(lambda));
  const Data& d = *data_;
  switch (d.family) {
    case KernelFamily::GeneralizedGaussian: {
      const double k = d.envelope.k, p = d.envelope.p;
      if (p == 2.0) {
        // exp(-k|z|^2 - lambda.z) is a Gaussian centred at -lambda/(2k).
        ts.mode_ = TiltedSampler::Mode::ShiftedGaussian;
        ts.shift_ = -ts.lambda_ / (2.0 * k);
        ts.sd_ = 1.0 / std::sqrt(2.0 * k);
        return ts;
      }
      // Proposal exp(-(k/2)|z - mu|^p) centred at the tilted mode mu.
      ts.mode_ = TiltedSampler::Mode::Rejection;
      ts.proposal_k_ = 0.5 * k;
      const double r_mode = std::pow(lam_norm / (k * p), 1.0 / (p - 1.0));
      const Vector dir = ts.lambda_ / lam_norm;
      ts.shift_ = -r_mode * dir;
      // log ratio as a function of (s, w): s along the tilt axis, w the orthogonal radius.
      auto log_ratio = [&](double s, double w) {
        const double r2 = s * s + w * w;
        const double q2 = (s + r_mode) * (s + r_mode) + w * w;
        return -k * std::pow(r2, 0.5 * p) - lam_norm * s + 0.5 * k * std::pow(q2, 0.5 * p);
      };
      const double span = 2.0 * (r_mode + 10.0 * std::pow(k, -1.0 / p));
      const int ns = 4001;
      const int nw = d.dim == 1 ? 1 : 401;
      double best = -INFINITY, best_s = 0.0, best_w = 0.0;
      for (int i = 0; i < ns; ++i) {
        const double s = -span + 2.0 * span * i / (ns - 1);
        for (int j = 0; j < nw; ++j) {
          const double w = nw == 1 ? 0.0 : span * j / (nw - 1);
          const double v = log_ratio(s, w);
          if (v > best) best = v, best_s = s, best_w = w;
        }
      }
      // Local refinement around the best grid cell.
      double step = 2.0 * span / (ns - 1);
      for (int it = 0; it < 60; ++it) {
        bool moved = false;
        for (double ds : {-step, 0.0, step})
          for (double dw : {-step, 0.0, step}) {
            const double w = d.dim == 1 ? 0.0 : std::max(0.0, best_w + dw);
            const double v = log_ratio(best_s + ds, w);
            if (v > best) best = v, best_s += ds, best_w = w, moved = true;
          }
        if (!moved) step *= 0.5;
      }
      ts.log_bound_ = best + 1e-6;
      return ts;
    }
    case KernelFamily::Box:
      ts.mode_ = TiltedSampler::Mode::Box;
      return ts;
    case KernelFamily::Tabulated: {
      ts.mode_ = TiltedSampler::Mode::Intervals;
      const double lam = ts.lambda_[0];
      const auto& rule = quad::gauss_legendre(8);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        const double a = d.grid[i], b = d.grid[i + 1];
        double mass = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double z = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
          mass += 0.5 * (b - a) * rule.weights[q] * eval(ConstPoint(&z, 1)) * std::exp(-lam * z);
        }
        total += mass;
        ts.interval_cdf_.push_back(total);
        ts.interval_bound_.push_back(std::max(d.values[i], d.values[i + 1]) *
                                     std::max(std::exp(-lam * a), std::exp(-lam * b)));
      }
      for (auto& c : ts.interval_cdf_) c /= total;
      return ts;
    }
  }
  return ts;
}

void TiltedSampler::sample(Rng& rng, std::span<double> out) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (mode_) {
    case Mode::Untilted:
      kernel_.sample(rng, out);
      return;
    case Mode::ShiftedGaussian: {
      std::normal_distribution<double> gauss(0.0, sd_);
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = shift_[static_cast<Eigen::Index>(i)] + gauss(rng);
      return;
    }
    case Mode::Box: {
      // Per axis: density prop. to exp(-l z) on [-1/2, 1/2], by inverse transform.
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double l = lambda_[static_cast<Eigen::Index>(i)];
        const double v = u(rng);
        if (std::abs(l) < 1e-12) {
          out[i] = v - 0.5;
        } else {
          out[i] = -0.5 - std::log1p(-v * (-std::expm1(-l))) / l;
        }
      }
      return;
    }
    case Mode::Rejection: {
      const auto& env = kernel_.envelope();
      const int d = kernel_.dim();
      std::vector<double> step(static_cast<std::size_t>(d));
      for (std::size_t attempt = 0; attempt < kernel_.settings().max_rejection_attempts; ++attempt) {
        const double r = gg_radius(rng, d, proposal_k_, env.p);
        uniform_direction(rng, step);
        double z2 = 0.0, lz = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
          out[i] = shift_[static_cast<Eigen::Index>(i)] + r * step[i];
          z2 += out[i] * out[i];
          lz += lambda_[static_cast<Eigen::Index>(i)] * out[i];
        }
        const double log_target = -env.k * std::pow(z2, 0.5 * env.p) - lz;
        const double log_prop = -proposal_k_ * std::pow(r, env.p);
        if (std::log(u(rng)) <= log_target - log_prop - log_bound_) return;
      }
      throw Error(ErrorKind::RejectionExhausted, "tilted rejection sampler exhausted its attempts");
    }
    case Mode::Intervals: {
      const auto& data = *kernel_.data_;
      const double lam = lambda_[0];
      const double v = u(rng);
      auto it = std::lower_bound(interval_cdf_.begin(), interval_cdf_.end(), v);
      std::size_t i = static_cast<std::size_t>(it - interval_cdf_.begin());
      if (i >= interval_bound_.size()) i = interval_bound_.size() - 1;
      const double a = data.grid[i], b = data.grid[i + 1];
      for (std::size_t attempt = 0; attempt < kernel_.settings().max_rejection_attempts; ++attempt) {
        const double z = a + (b - a) * u(rng);
        const double target = kernel_.eval(ConstPoint(&z, 1)) * std::exp(-lam * z);
        if (u(rng) * interval_bound_[i] <= target) {
          out[0] = z;
          return;
        }
      }
      throw Error(ErrorKind::RejectionExhausted, "tilted interval sampler exhausted its attempts");
    }
  }
}

ValidationReport JumpKernel::validate(std::uint64_t seed) const {
  ValidationReport report;
  const int d = dim();
  const double mass = integrate([](ConstPoint) { return 1.0; });
  report.add("kernel.normalization", std::abs(mass - 1.0) < 1e-8, mass, "int a(z) dz");

  // Positivity and envelope on a grid; faces of the box are excluded (a.e. check).
  const double radius = truncation_radius(0.0) * 1.05;
  const int n = d == 1 ? 2001 : (d == 2 ? 161 : 41);
  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  double worst_excess = -INFINITY;
  double min_value = INFINITY;
  while (true) {
    bool on_face = false;
    for (int a = 0; a < d; ++a) {
      z[static_cast<std::size_t>(a)] = -radius + 2.0 * radius * idx[static_cast<std::size_t>(a)] / (n - 1);
      if (family() == KernelFamily::Box &&
          std::abs(std::abs(z[static_cast<std::size_t>(a)]) - 0.5) < kFaceTol)
        on_face = true;
    }
    const ConstPoint zv(z.data(), z.size());
    const double v = eval(zv);
    min_value = std::min(min_value, v);
    if (!on_face) {
      const double bound = envelope().at(norm(zv));
      worst_excess = std::max(worst_excess, (v - bound) / std::max(bound, 1e-300));
    }
    int a = 0;
    while (a < d && ++idx[static_cast<std::size_t>(a)] == n) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == d) break;
  }
  report.add("kernel.nonnegative", min_value >= 0.0, min_value, "min a(z) on grid");
  report.add("kernel.decay-envelope", worst_excess <= 1e-9, worst_excess,
             "max relative excess of a(z) over C exp(-k|z|^p)");

  // Half-space certificate over the sphere mesh: 2d axes plus 100 d random directions.
  Rng rng = make_stream(seed, 0);
  std::vector<std::vector<double>> dirs;
  for (int a = 0; a < d; ++a)
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(static_cast<std::size_t>(d), 0.0);
      e[static_cast<std::size_t>(a)] = s;
      dirs.push_back(e);
    }
  if (d > 1)
    for (int i = 0; i < 100 * d; ++i) {
      std::vector<double> e(static_cast<std::size_t>(d));
      uniform_direction(rng, e);
      dirs.push_back(e);
    }
  double c0 = INFINITY;
  for (const auto& e : dirs) c0 = std::min(c0, halfspace_mass(ConstPoint(e.data(), e.size())));
  report.add("kernel.halfspace-C0", c0 > 1e-12, c0, "min over sphere mesh of half-space mass");
  return report;
}

std::string JumpKernel::description() const {
  const Data& d = *data_;
  std::ostringstream out;
  out.precision(17);
  out << to_string(d.family) << ";d=" << d.dim;
  switch (d.family) {
    case KernelFamily::GeneralizedGaussian:
      out << ";k=" << d.envelope.k << ";p=" << d.envelope.p;
      break;
    case KernelFamily::Box: break;
    case KernelFamily::Tabulated:
      out << ";C=" << d.envelope.C << ";k=" << d.envelope.k << ";p=" << d.envelope.p << ";table=";
      for (std::size_t i = 0; i < d.grid.size(); ++i) out << d.grid[i] << ':' << d.values[i] << ',';
      break;
  }
  return out.str();
}

}  // namespace ldp
