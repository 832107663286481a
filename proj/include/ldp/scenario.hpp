#pragma once

#include "ldp/field_library.hpp"
#include "ldp/kernel.hpp"
#include "ldp/torus_spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ldp {

/// Free parameters of the separable example with Gamma != R^d: box kernel,
/// Lambda(xi, eta) = b(xi) Lambda0(xi - eta) with a cusp b and a single-peak Lambda0.
struct GammaCandidate {
  int dim = 1;
  double alpha1 = 0.001;
  double c = 0.05;
  std::vector<double> z0{0.4};
  double b_min = 0.05;
  double beta = 0.25;
  std::vector<double> x_star{0.5};

  RateField field() const;
  std::string description() const;
};

struct GammaReport {
  GammaCandidate candidate;
  double alpha2 = 0.0;
  int grid_n = 0;
  /// || b / (b - b_min) ||_{L^2}; the construction needs it below 1 + delta, delta < 1.
  double ex2_norm = 0.0;
  bool ex2_holds = false;
  /// Tilts t z0/|z0| with sup_z a(z) Lambda0(z) exp(-lambda.z) < 1/2, as an interval in t.
  std::optional<std::pair<double, double>> ex3_range;
  bool ex3_holds = false;
  /// Tilt where membership was tested: middle of the ex3 range, else the first scanned
  /// tilt found outside Gamma, else the last scanned tilt.
  Vector lambda0;
  bool in_gamma_at_lambda0 = true;
  bool in_gamma_at_zero = false;
  double theta_excess_at_lambda0 = 0.0;
  /// Gamma != R^d reproduced: outside Gamma at lambda0 with |lambda0| <= 20, inside at 0.
  bool reproduced() const { return !in_gamma_at_lambda0 && in_gamma_at_zero && lambda0.norm() <= 20.0; }
};

/// sup over the torus of Lambda0(z) exp(-lambda.z), z in [-1/2, 1/2]^d (box kernel a = 1).
double ex3_sup(const fields::PeakProfile& peak, ConstPoint lambda);

GammaReport evaluate_gamma_candidate(const GammaCandidate& candidate, int grid_n,
                                     const SpectralSettings& settings = {});

/// Candidates tried by default, most promising first.
std::vector<GammaCandidate> default_gamma_candidates();

struct GammaSearch {
  std::vector<GammaReport> reports;
  /// Index of the first reproducing candidate.
  std::optional<std::size_t> found;
};

GammaSearch search_gamma_example(const std::vector<GammaCandidate>& candidates, int grid_n,
                                 const SpectralSettings& settings = {});

}  // namespace ldp
