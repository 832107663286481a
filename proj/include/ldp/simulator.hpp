#pragma once

#include "ldp/environment.hpp"
#include "ldp/kernel.hpp"
#include "ldp/legendre.hpp"
#include "ldp/path.hpp"
#include "ldp/path_rate.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ldp {

struct SimConfig {
  double eps = 0.1;
  double T = 1.0;
  Vector x0;
  std::uint64_t seed = 1;
  /// Exponential tilt of the jump law; unset means plain simulation.
  std::optional<Vector> tilt;
  std::size_t replications = 1;
  int workers = 1;

  void check(int dim) const;
};

/// Piecewise-constant path: states[k] holds on [times[k], times[k+1]), times[0] = 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  /// log dP/dQ of the untilted law against the simulated one; 0 when untilted.
  double log_weight = 0.0;
  std::size_t proposals = 0;
  /// Sum over proposals of the acceptance probability Lambda^eps / Lambda+.
  double acceptance_sum = 0.0;
  double horizon = 0.0;

  const Vector& terminal() const { return states.back(); }
  std::size_t jumps() const { return states.size() - 1; }
  /// State at time t (right-continuous).
  const Vector& at(double t) const;

  /// "t x_1 ... x_d" lines after a "# log_weight=..." and "# horizon=..." header.
  void print(std::ostream& out) const;
  static Trajectory parse(std::istream& in);
};

/// sup_{t <= T} |xi(t) - reference(t)|.
double sup_deviation(const Trajectory& xi, const Path& reference);

/// Exact simulation of the jump process with generator
///   (1/eps) int a(z) Lambda^eps(x, x - eps z) (u(x - eps z) - u(x)) dz
/// by thinning against the constant bound Lambda+.
class Simulator {
 public:
  Simulator(JumpKernel kernel, RateField field);

  const JumpKernel& kernel() const { return kernel_; }
  const RateField& field() const { return field_; }

  Trajectory simulate(const SimConfig& config, Rng& rng) const;
  /// Same, reusing a sampler built by `sampler(config)`.
  Trajectory simulate(const SimConfig& config, const TiltedSampler& sampler, Rng& rng) const;
  TiltedSampler sampler(const SimConfig& config) const;
  /// Replication `index` on its own stream make_stream(seed, index).
  Trajectory simulate(const SimConfig& config, std::uint64_t index) const;

  /// All replications, in chunks of 1024 over `config.workers` threads. `visit` must be
  /// safe to call concurrently for distinct indices.
  void run(const SimConfig& config,
           const std::function<void(std::size_t, const Trajectory&)>& visit) const;

 private:
  JumpKernel kernel_;
  RateField field_;
};

struct HalfSpaceEvent {
  /// {x : normal . x >= level}.
  Vector normal;
  double level = 0.0;
};
struct BallEvent {
  Vector center;
  double radius = 0.0;
};
struct TubeEvent {
  Path reference;
  double delta = 0.0;
};
struct WholeSpaceEvent {};

/// Terminal events look at xi(T); the tube event looks at the whole path.
using Event = std::variant<HalfSpaceEvent, BallEvent, TubeEvent, WholeSpaceEvent>;

std::string describe(const Event& event);
bool occurs(const Event& event, const Trajectory& xi);

struct EventTheory {
  /// -inf of the rate over the event (NaN when not available for the regime).
  double value = 0.0;
  /// Dual tilt at the dominant point (zero when the typical behaviour lies in the event).
  Vector tilt;
};

/// Theory for homogeneous regimes: half-space via inf_{a.zeta = c} L = sup_s (s c - H(s a)),
/// balls via the nearest point (d = 1) or boundary sampling, tubes via -I(reference).
EventTheory event_theory(const Event& event, const Lagrangian& lagrangian, const SimConfig& config);

struct EventEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  /// eps ln p_hat, NaN when nothing was hit.
  double eps_log_p = 0.0;
  double theory = 0.0;
  std::size_t hits = 0;
  std::size_t replications = 0;
  /// Zero hits: one-sided 95% upper bound 3/n, times the largest observed weight when
  /// tilted; otherwise unset.
  std::optional<double> upper_bound;
  Vector tilt;
  /// Observed and expected number of accepted proposals (thinning diagnostic).
  double accepted = 0.0;
  double expected_accepted = 0.0;
};

EventEstimate estimate_event(const Simulator& sim, const SimConfig& config, const Event& event,
                             const EventTheory& theory);

}  // namespace ldp
