#include "ldp/scenario.hpp"

#include "ldp/error.hpp"

#include <cmath>
#include <sstream>

namespace ldp {

RateField GammaCandidate::field() const {
  return fields::separable(fields::CuspProfile(dim, b_min, beta, x_star),
                           fields::PeakProfile(dim, alpha1, c, z0));
}

std::string GammaCandidate::description() const {
  return fields::CuspProfile(dim, b_min, beta, x_star).description() + "*" +
         fields::PeakProfile(dim, alpha1, c, z0).description();
}

double ex3_sup(const fields::PeakProfile& peak, ConstPoint lambda) {
  const int d = peak.dim();
  const int n = d == 1 ? 8192 : d == 2 ? 512 : 64;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> z(static_cast<std::size_t>(d));
  double best = 0.0;
  while (true) {
    for (int a = 0; a < d; ++a)
      z[static_cast<std::size_t>(a)] = -0.5 + static_cast<double>(idx[static_cast<std::size_t>(a)]) / n;
    const ConstPoint zp(z.data(), z.size());
    best = std::max(best, peak(zp) * std::exp(-dot(lambda, zp)));
    int a = 0;
    while (a < d && ++idx[static_cast<std::size_t>(a)] > n) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == d) break;
  }
  return best;
}

GammaReport evaluate_gamma_candidate(const GammaCandidate& candidate, int grid_n,
                                     const SpectralSettings& settings) {
  const int d = candidate.dim;
  const fields::PeakProfile peak(d, candidate.alpha1, candidate.c, candidate.z0);
  const fields::CuspProfile cusp(d, candidate.b_min, candidate.beta, candidate.x_star);
  GammaReport r;
  r.candidate = candidate;
  r.alpha2 = peak.alpha2();
  r.grid_n = grid_n;
  r.ex2_norm = cusp.ratio_l2_norm();
  r.ex2_holds = r.ex2_norm < 2.0;

  Vector dir = to_vector(ConstPoint(candidate.z0.data(), candidate.z0.size()));
  if (dir.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "peak centre z0 must be nonzero");
  dir.normalize();

  const RateField field = candidate.field();
  const TorusProblem problem(JumpKernel::box(d), field.freeze({}), TorusGrid(d, grid_n), settings);

  // ex3 on t in (0, 20].
  double lo = -1.0, hi = -1.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 0.05 * i;
    const Vector lam = t * dir;
    if (ex3_sup(peak, view(lam)) < 0.5) {
      if (lo < 0.0) lo = t;
      hi = t;
    } else if (lo >= 0.0) {
      break;
    }
  }
  if (lo >= 0.0) {
    r.ex3_range = std::make_pair(lo, hi);
    r.ex3_holds = true;
  }

  const Vector zero = Vector::Zero(d);
  r.in_gamma_at_zero = problem.solve(view(zero)).in_gamma;

  auto test = [&](double t) {
    r.lambda0 = t * dir;
    const auto res = problem.solve(view(r.lambda0));
    r.in_gamma_at_lambda0 = res.in_gamma;
    r.theta_excess_at_lambda0 = res.theta_discrete + res.g_min;
    return !res.in_gamma;
  };
  if (r.ex3_holds) {
    test(0.5 * (lo + hi));
  } else {
    for (int i = 1; i <= 40; ++i)
      if (test(0.5 * i)) break;
  }
  return r;
}

std::vector<GammaCandidate> default_gamma_candidates() {
  std::vector<GammaCandidate> out;
  for (double alpha1 : {0.001, 0.01})
    for (double c : {0.05, 0.1})
      for (double z0 : {0.4, 0.25}) {
        GammaCandidate g;
        g.alpha1 = alpha1;
        g.c = c;
        g.z0 = {z0};
        out.push_back(g);
      }
  return out;
}

GammaSearch search_gamma_example(const std::vector<GammaCandidate>& candidates, int grid_n,
                                 const SpectralSettings& settings) {
  GammaSearch s;
  for (const auto& c : candidates) {
    s.reports.push_back(evaluate_gamma_candidate(c, grid_n, settings));
    if (!s.found && s.reports.back().reproduced()) s.found = s.reports.size() - 1;
  }
  return s;
}

}  // namespace ldp
