#include "ldp/simulator.hpp"

#include "ldp/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace ldp {

namespace {

constexpr std::size_t kChunk = 1024;

}  // namespace

void SimConfig::check(int dim) const {
  if (!(eps > 0.0) || eps > 1.0) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]", eps);
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon T must be positive", T);
  if (x0.size() != dim) throw Error(ErrorKind::InvalidArgument, "x0 has the wrong dimension");
  if (tilt && tilt->size() != dim) throw Error(ErrorKind::InvalidArgument, "tilt has the wrong dimension");
  if (replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be at least 1");
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be at least 1");
}

const Vector& Trajectory::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return states[static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0))];
}

void Trajectory::print(std::ostream& out) const {
  out << std::setprecision(17) << "# log_weight=" << log_weight << "\n# horizon=" << horizon << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << times[k];
    for (Eigen::Index a = 0; a < states[k].size(); ++a) out << ' ' << states[k][a];
    out << '\n';
  }
}

Trajectory Trajectory::parse(std::istream& in) {
  std::stringstream body;
  Trajectory tr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# log_weight=", 0) == 0) tr.log_weight = std::stod(line.substr(13));
    else if (line.rfind("# horizon=", 0) == 0) tr.horizon = std::stod(line.substr(10));
    else body << line << '\n';
  }
  Path p;
  // A trajectory without jumps has a single line; pad it so Path::parse accepts it.
  std::string text = body.str();
  std::size_t rows = 0;
  for (std::istringstream s(text); std::getline(s, line);)
    if (line.find_first_not_of(" \t") != std::string::npos && line[line.find_first_not_of(" \t")] != '#') ++rows;
  if (rows == 1) {
    std::istringstream s(text);
    double t = 0.0;
    s >> t;
    std::vector<double> x;
    for (double v; s >> v;) x.push_back(v);
    tr.times = {t};
    tr.states = {Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()))};
  } else {
    std::istringstream s(text);
    p = Path::parse(s);
    tr.times = p.times;
    tr.states = p.points;
  }
  if (tr.horizon == 0.0) tr.horizon = tr.times.back();
  return tr;
}

double sup_deviation(const Trajectory& xi, const Path& reference) {
  double m = 0.0;
  const double T = xi.horizon;
  for (std::size_t k = 0; k < xi.times.size(); ++k) {
    const double a = xi.times[k];
    const double b = k + 1 < xi.times.size() ? xi.times[k + 1] : T;
    const Vector& s = xi.states[k];
    // |s - reference(t)| is convex between breakpoints of the reference.
    m = std::max(m, (s - reference.at(a)).norm());
    m = std::max(m, (s - reference.at(b)).norm());
    for (auto it = std::upper_bound(reference.times.begin(), reference.times.end(), a);
         it != reference.times.end() && *it < b; ++it)
      m = std::max(m, (s - reference.at(*it)).norm());
  }
  return m;
}

Simulator::Simulator(JumpKernel kernel, RateField field)
    : kernel_(std::move(kernel)), field_(std::move(field)) {
  if (kernel_.dim() != field_.dim())
    throw Error(ErrorKind::InvalidArgument, "kernel and field dimensions differ");
}

TiltedSampler Simulator::sampler(const SimConfig& config) const {
  config.check(kernel_.dim());
  const bool tilted = config.tilt && config.tilt->norm() > 0.0;
  return kernel_.tilted(view(tilted ? *config.tilt : Vector(Vector::Zero(kernel_.dim()))));
}

Trajectory Simulator::simulate(const SimConfig& config, Rng& rng) const {
  return simulate(config, sampler(config), rng);
}

Trajectory Simulator::simulate(const SimConfig& config, const TiltedSampler& sampler, Rng& rng) const {
  const int d = kernel_.dim();
  const double eps = config.eps, T = config.T;
  const double lam_plus = field_.lambda_plus();
  const bool tilted = config.tilt && config.tilt->norm() > 0.0;
  const double mgf = tilted ? std::exp(sampler.log_mgf()) : 1.0;
  // Proposal clock; under tilting it runs M(lambda) times faster.
  const double clock = lam_plus * mgf / eps;
  std::exponential_distribution<double> wait(clock);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Trajectory tr;
  tr.horizon = T;
  tr.times.push_back(0.0);
  tr.states.push_back(config.x0);
  Vector x = config.x0, y(d), z(d);
  const std::span<double> zs(z.data(), static_cast<std::size_t>(d));
  double t = 0.0, sum_lz = 0.0;
  const bool homogeneous_clock = field_.regime() == Regime::Constant;
  while (true) {
    t += wait(rng);
    if (t > T) break;
    sampler.sample(rng, zs);
    ++tr.proposals;
    if (tilted) sum_lz += config.tilt->dot(z);
    y = x - eps * z;
    const double accept = homogeneous_clock ? 1.0 : field_.eval_scaled(view(x), view(y), eps) / lam_plus;
    tr.acceptance_sum += accept;
    if (homogeneous_clock || unif(rng) < accept) {
      x = y;
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
  }
  // dP/dQ over the marked proposal process: exp((Lambda+ T / eps)(M - 1)) prod exp(lambda.z).
  if (tilted) tr.log_weight = sum_lz + lam_plus * T / eps * (mgf - 1.0);
  return tr;
}

Trajectory Simulator::simulate(const SimConfig& config, std::uint64_t index) const {
  Rng rng = make_stream(config.seed, index);
  return simulate(config, rng);
}

void Simulator::run(const SimConfig& config,
                    const std::function<void(std::size_t, const Trajectory&)>& visit) const {
  config.check(kernel_.dim());
  const std::size_t n = config.replications;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  const TiltedSampler shared = sampler(config);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t c; (c = next++) < chunks && !failed;) {
      try {
        for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
          Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(i));
          visit(i, simulate(config, shared, rng));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config.workers), chunks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string describe(const Event& event) {
  std::ostringstream out;
  out << std::setprecision(10);
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, HalfSpaceEvent>) {
          out << "halfspace(normal=" << e.normal.transpose() << ";level=" << e.level << ")";
        } else if constexpr (std::is_same_v<E, BallEvent>) {
          out << "ball(center=" << e.center.transpose() << ";radius=" << e.radius << ")";
        } else if constexpr (std::is_same_v<E, TubeEvent>) {
          out << "tube(delta=" << e.delta << ";breakpoints=" << e.reference.size() << ")";
        } else {
          out << "whole-space";
        }
      },
      event);
  return out.str();
}

bool occurs(const Event& event, const Trajectory& xi) {
  return std::visit(
      [&](const auto& e) -> bool {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, HalfSpaceEvent>) {
          return e.normal.dot(xi.terminal()) >= e.level;
        } else if constexpr (std::is_same_v<E, BallEvent>) {
          return (xi.terminal() - e.center).norm() <= e.radius;
        } else if constexpr (std::is_same_v<E, TubeEvent>) {
          return sup_deviation(xi, e.reference) <= e.delta;
        } else {
          return true;
        }
      },
      event);
}

namespace {

// Maximizes a concave function of s >= 0 that eventually decreases.
template <class F>
double maximize_ray(F&& f) {
  double hi = 1.0;
  while (f(2.0 * hi) > f(hi)) {
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::SearchOverflow, "event dual search ran off", hi);
  }
  double a = 0.0, b = 2.0 * hi;
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), dd = a + g * (b - a);
  double fc = f(c), fd = f(dd);
  while (b - a > 1e-11 * std::max(1.0, b)) {
    if (fc >= fd) {
      b = dd, dd = c, fd = fc, c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = dd, fc = fd, dd = a + g * (b - a), fd = f(dd);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

EventTheory event_theory(const Event& event, const Lagrangian& lagrangian, const SimConfig& config) {
  const Hamiltonian& h = lagrangian.hamiltonian();
  const int d = h.dim();
  EventTheory out;
  out.tilt = Vector::Zero(d);
  const double T = config.T;
  const ConstPoint none{};
  if (const auto* tube = std::get_if<TubeEvent>(&event)) {
    out.value = -rate(tube->reference, lagrangian).value;
    const Vector vbar = (tube->reference.points.back() - tube->reference.points.front()) / tube->reference.horizon();
    const ConstPoint x = h.x_dependent() ? view(tube->reference.points.front()) : none;
    out.tilt = lagrangian(x, view(vbar)).argmax;
    return out;
  }
  if (std::holds_alternative<WholeSpaceEvent>(event)) return out;
  if (h.x_dependent()) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Vector zstar = lagrangian.zeta_star(none);
  if (const auto* hs = std::get_if<HalfSpaceEvent>(&event)) {
    const double nn = hs->normal.norm();
    const Vector n = hs->normal / nn;
    const double c = (hs->level / nn - n.dot(config.x0)) / T;
    if (n.dot(zstar) >= c) return out;
    auto phi = [&](double s) {
      const Vector lam = s * n;
      return s * c - h.value(none, view(lam)).value;
    };
    const double s = maximize_ray(phi);
    out.value = -T * phi(s);
    out.tilt = s * n;
    return out;
  }
  const auto& ball = std::get<BallEvent>(event);
  const Vector typical = config.x0 + T * zstar;
  if ((typical - ball.center).norm() <= ball.radius) return out;
  std::vector<Vector> dirs;
  if (d == 1) {
    dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  } else {
    // Fibonacci-like fixed directions.
    for (int i = 0; i < 256; ++i) {
      Vector e(d);
      for (int a = 0; a < d; ++a) e[a] = std::sin(1.0 + 12.9898 * (i + 1) + 78.233 * (a + 1));
      dirs.push_back(e.normalized());
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : dirs) {
    const Vector zeta = (ball.center + ball.radius * e - config.x0) / T;
    const auto v = lagrangian(none, view(zeta));
    if (T * v.value < best) {
      best = T * v.value;
      out.tilt = v.argmax;
    }
  }
  out.value = -best;
  return out;
}

EventEstimate estimate_event(const Simulator& sim, const SimConfig& config, const Event& event,
                             const EventTheory& theory) {
  const std::size_t n = config.replications;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  struct Acc {
    double w = 0.0, w2 = 0.0, accepted = 0.0, expected = 0.0, max_log_w = -INFINITY;
    std::size_t hits = 0;
  };
  std::vector<Acc> acc(chunks);
  sim.run(config, [&](std::size_t i, const Trajectory& tr) {
    Acc& a = acc[i / kChunk];
    a.accepted += static_cast<double>(tr.jumps());
    a.expected += tr.acceptance_sum;
    a.max_log_w = std::max(a.max_log_w, tr.log_weight);
    if (occurs(event, tr)) {
      const double w = std::exp(tr.log_weight);
      ++a.hits;
      a.w += w;
      a.w2 += w * w;
    }
  });
  Acc total;
  for (const auto& a : acc) {
    total.w += a.w;
    total.w2 += a.w2;
    total.hits += a.hits;
    total.accepted += a.accepted;
    total.expected += a.expected;
    total.max_log_w = std::max(total.max_log_w, a.max_log_w);
  }
  EventEstimate out;
  const double nn = static_cast<double>(n);
  out.replications = n;
  out.hits = total.hits;
  out.p_hat = total.w / nn;
  const double var = n > 1 ? std::max(0.0, (total.w2 - nn * out.p_hat * out.p_hat) / (nn - 1.0)) : 0.0;
  out.std_error = std::sqrt(var / nn);
  out.eps_log_p = total.hits > 0 ? config.eps * std::log(out.p_hat) : std::numeric_limits<double>::quiet_NaN();
  out.theory = theory.value;
  out.tilt = config.tilt ? *config.tilt : Vector(Vector::Zero(sim.kernel().dim()));
  out.accepted = total.accepted;
  out.expected_accepted = total.expected;
  if (total.hits == 0) {
    const bool tilted = config.tilt && config.tilt->norm() > 0.0;
    out.upper_bound = 3.0 / nn * (tilted ? std::exp(total.max_log_w) : 1.0);
  }
  return out;
}

}  // namespace ldp
