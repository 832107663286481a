#include "ldp/path_rate.hpp"

#include "ldp/error.hpp"
#include "ldp/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace ldp {

namespace {

struct SegmentCost {
  double value = 0.0;
  int order = 1;
  bool infinite = false;
};

double gauss_segment(const Lagrangian& lag, const Path& path, std::size_t j, const Vector& v,
                     int order) {
  const auto& rule = quad::gauss_legendre(order);
  const double t0 = path.times[j], t1 = path.times[j + 1];
  const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Vector x = path.at(mid + half * rule.nodes[q]);
    s += rule.weights[q] * lag.value(view(x), view(v));
  }
  return half * s;
}

SegmentCost segment_cost(const Lagrangian& lag, const Path& path, std::size_t j,
                         const RateSettings& settings) {
  SegmentCost out;
  const Vector v = path.velocity(j);
  const double dt = path.times[j + 1] - path.times[j];
  try {
    if (!lag.hamiltonian().x_dependent()) {
      out.value = dt * lag.value({}, view(v));
    } else {
      int n = settings.gauss_order;
      double prev = gauss_segment(lag, path, j, v, n);
      while (true) {
        const int next = 2 * n;
        if (next > settings.max_order) break;
        const double cur = gauss_segment(lag, path, j, v, next);
        const bool agree = std::abs(cur - prev) <= settings.rel_tol * std::max(std::abs(cur), 1e-300);
        prev = cur;
        n = next;
        if (agree) break;
      }
      out.value = prev;
      out.order = n;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SearchOverflow) throw;
    out.infinite = true;
    out.value = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(out.value)) out.infinite = true;
  return out;
}

}  // namespace

RateReport rate(const Path& path, const Lagrangian& lagrangian, const RateSettings& settings) {
  path.check();
  if (path.dim() != lagrangian.hamiltonian().dim())
    throw Error(ErrorKind::InvalidArgument, "path dimension differs from the kernel dimension");
  if (settings.gauss_order < 1) throw Error(ErrorKind::InvalidArgument, "gauss_order must be positive");
  const std::size_t m = path.segments();
  std::vector<SegmentCost> costs(m);
  const int workers = std::clamp(settings.workers, 1, static_cast<int>(m));
  if (workers == 1) {
    for (std::size_t j = 0; j < m; ++j) costs[j] = segment_cost(lagrangian, path, j, settings);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t j; (j = next++) < m && !failed;) {
            try {
              costs[j] = segment_cost(lagrangian, path, j, settings);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
            }
          }
        });
    }
    if (failure) std::rethrow_exception(failure);
  }
  RateReport report;
  for (const auto& c : costs) {
    report.segments.push_back(c.value);
    report.nodes_used.push_back(c.order);
    report.infinite = report.infinite || c.infinite;
    report.value += c.value;
  }
  if (report.infinite) report.value = std::numeric_limits<double>::infinity();
  return report;
}

namespace {

// sup over [s0, s1] of |f(t) - g(pi(t))| with pi linear from (s0, c0) to (s1, c1). Both
// arguments are piecewise linear in t, so the maximum sits at a breakpoint of either.
double segment_sup(const Path& f, const Path& g, double s0, double s1, double c0, double c1) {
  const double slope = (c1 - c0) / (s1 - s0);
  auto gap = [&](double t) {
    const double p = std::clamp(c0 + slope * (t - s0), c0, c1);
    return (f.at(t) - g.at(p)).norm();
  };
  double m = std::max(gap(s0), gap(s1));
  for (auto it = std::upper_bound(f.times.begin(), f.times.end(), s0);
       it != f.times.end() && *it < s1; ++it)
    m = std::max(m, gap(*it));
  for (auto it = std::upper_bound(g.times.begin(), g.times.end(), c0);
       it != g.times.end() && *it < c1; ++it)
    m = std::max(m, gap(s0 + (*it - c0) / slope));
  return m;
}

}  // namespace

double sup_distance(const Path& f, const Path& g, const std::vector<double>& knots,
                    const std::vector<double>& values) {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    m = std::max(m, segment_sup(f, g, knots[k], knots[k + 1], values[k], values[k + 1]));
  return m;
}

PathDistance path_distance(const Path& f, const Path& g, int knots, int refine) {
  f.check();
  g.check();
  if (std::abs(f.horizon() - g.horizon()) > 1e-12 * std::max(1.0, f.horizon()))
    throw Error(ErrorKind::InvalidArgument, "path_distance needs equal horizons");
  if (f.dim() != g.dim()) throw Error(ErrorKind::InvalidArgument, "path_distance: dimensions differ");
  if (knots < 1 || refine < 1) throw Error(ErrorKind::InvalidArgument, "knots and refine must be positive");
  const double T = f.horizon();
  const int K = knots, J = knots * refine;
  std::vector<double> s(static_cast<std::size_t>(K + 1)), c(static_cast<std::size_t>(J + 1));
  for (int k = 0; k <= K; ++k) s[static_cast<std::size_t>(k)] = T * k / K;
  for (int j = 0; j <= J; ++j) c[static_cast<std::size_t>(j)] = T * j / J;
  s.back() = c.back() = T;

  PathDistance out;
  out.sup = sup_distance(f, g, {0.0, T}, {0.0, T});
  // Identity is admissible, so only slopes with |log slope| < sup can improve on it.
  const double bound = out.sup;
  // Segment k -> k+1 moves the value index by m, slope m / refine.
  const int m_lo = std::max(1, static_cast<int>(std::floor(refine * std::exp(-bound))));
  const int m_hi = static_cast<int>(std::ceil(refine * std::exp(bound)));

  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t W = static_cast<std::size_t>(J + 1);
  std::vector<double> best(static_cast<std::size_t>(K + 1) * W, inf);
  std::vector<int> from(best.size(), -1);
  best[0] = 0.0;
  for (int k = 0; k < K; ++k) {
    // Value index must stay reachable: j <= k * m_hi and J - j <= (K - k) * m_hi.
    for (int j = 0; j <= J; ++j) {
      const double cur = best[static_cast<std::size_t>(k) * W + static_cast<std::size_t>(j)];
      if (!(cur < bound)) continue;
      for (int m = m_lo; m <= m_hi && j + m <= J; ++m) {
        const int jn = j + m;
        if (J - jn > (K - k - 1) * m_hi || (K - k - 1 > 0 && J - jn < (K - k - 1) * m_lo)) continue;
        if (k + 1 == K && jn != J) continue;
        const double ell = std::abs(std::log(static_cast<double>(m) / refine));
        const std::size_t idx = static_cast<std::size_t>(k + 1) * W + static_cast<std::size_t>(jn);
        double cost = std::max(cur, ell);
        if (!(cost < best[idx])) continue;
        cost = std::max(cost, segment_sup(f, g, s[static_cast<std::size_t>(k)],
                                          s[static_cast<std::size_t>(k + 1)],
                                          c[static_cast<std::size_t>(j)],
                                          c[static_cast<std::size_t>(jn)]));
        if (cost < best[idx]) {
          best[idx] = cost;
          from[idx] = j;
        }
      }
    }
  }
  const double dp = best[static_cast<std::size_t>(K) * W + static_cast<std::size_t>(J)];
  if (dp < out.sup) {
    out.distance = dp;
    out.knots = s;
    out.values.assign(static_cast<std::size_t>(K + 1), 0.0);
    int j = J;
    for (int k = K; k >= 0; --k) {
      out.values[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(j)];
      if (k > 0) j = from[static_cast<std::size_t>(k) * W + static_cast<std::size_t>(j)];
    }
    for (int k = 0; k < K; ++k)
      out.log_slope = std::max(out.log_slope,
                               std::abs(std::log((out.values[static_cast<std::size_t>(k + 1)] -
                                                  out.values[static_cast<std::size_t>(k)]) /
                                                 (s[static_cast<std::size_t>(k + 1)] - s[static_cast<std::size_t>(k)]))));
  } else {
    out.distance = out.sup;
    out.knots = {0.0, T};
    out.values = {0.0, T};
  }
  return out;
}

Path effective_flow(const Hamiltonian& h, const Vector& x0, double T, int steps) {
  if (!(T > 0.0) || steps < 1)
    throw Error(ErrorKind::InvalidArgument, "effective_flow needs T > 0 and a positive step count");
  if (x0.size() != h.dim()) throw Error(ErrorKind::InvalidArgument, "start point has the wrong dimension");
  const Vector zero = Vector::Zero(h.dim());
  auto rhs = [&](const Vector& x) { return h.grad(view(x), view(zero)); };
  const double dt = T / steps;
  Path p;
  Vector x = x0;
  p.times.push_back(0.0);
  p.points.push_back(x);
  for (int n = 0; n < steps; ++n) {
    const Vector k1 = rhs(x);
    const Vector k2 = rhs(x + 0.5 * dt * k1);
    const Vector k3 = rhs(x + 0.5 * dt * k2);
    const Vector k4 = rhs(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p.times.push_back(n + 1 == steps ? T : (n + 1) * dt);
    p.points.push_back(x);
  }
  return p;
}

double velocity_bound(const Lagrangian& lagrangian, ConstPoint x, ConstPoint direction, double s) {
  const Vector dir = to_vector(direction).normalized();
  const Vector star = lagrangian.zeta_star(x);
  auto cost = [&](double r) {
    const Vector v = star + r * dir;
    return lagrangian.value(x, view(v));
  };
  double lo = 0.0, hi = 1.0;
  while (cost(hi) <= s) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::SearchOverflow, "velocity bound is unbounded", hi);
  }
  for (int i = 0; i < 100 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cost(mid) <= s ? lo : hi) = mid;
  }
  return (star + hi * dir).norm();
}

}  // namespace ldp
