#include "ldp/environment.hpp"

#include "ldp/error.hpp"
#include "ldp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ldp {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Constant: return "constant";
    case Regime::Periodic: return "periodic";
    case Regime::Slow: return "slow";
    case Regime::LocallyPeriodic: return "locally-periodic";
  }
  return "unknown";
}

namespace {

constexpr double kBoundSlack = 1e-12;

void check_bounds(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
    throw Error(ErrorKind::InvalidArgument, "rate field bounds need 0 < Lambda- <= Lambda+ < inf");
}

std::vector<double> fractional(ConstPoint p, double eps) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p[i] / eps;
    out[i] = v - std::floor(v);
  }
  return out;
}

std::vector<double> uniform_point(Rng& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (auto& v : p) v = u(rng);
  return p;
}

ConstPoint cp(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

PeriodicPairField::PeriodicPairField(int dim, PairFn f, double lambda_minus, double lambda_plus,
                                     std::string description)
    : dim_(dim), fn_(std::move(f)), lo_(lambda_minus), hi_(lambda_plus),
      description_(std::move(description)) {
  check_bounds(lo_, hi_);
}

PeriodicPairField PeriodicPairField::constant(int dim, double value) {
  std::ostringstream desc;
  desc.precision(17);
  desc << "constant(" << value << ")";
  PeriodicPairField field(dim, [value](ConstPoint, ConstPoint) { return value; }, value, value,
                          desc.str());
  field.constant_ = true;
  return field;
}

RateField RateField::constant(int dim, double value) {
  check_bounds(value, value);
  RateField f;
  f.regime_ = Regime::Constant;
  f.dim_ = dim;
  f.lo_ = f.hi_ = f.value_ = value;
  std::ostringstream desc;
  desc.precision(17);
  desc << "constant(" << value << ")";
  f.description_ = desc.str();
  return f;
}

RateField RateField::periodic(int dim, PairFn fn, double lambda_minus, double lambda_plus,
                              std::string description) {
  check_bounds(lambda_minus, lambda_plus);
  RateField f;
  f.regime_ = Regime::Periodic;
  f.dim_ = dim;
  f.lo_ = lambda_minus;
  f.hi_ = lambda_plus;
  f.pair_ = std::move(fn);
  f.description_ = std::move(description);
  return f;
}

RateField RateField::slow(int dim, PairFn fn, double lambda_minus, double lambda_plus,
                          std::string description) {
  RateField f = periodic(dim, std::move(fn), lambda_minus, lambda_plus, std::move(description));
  f.regime_ = Regime::Slow;
  return f;
}

RateField RateField::locally_periodic(int dim, QuadFn fn, double lambda_minus, double lambda_plus,
                                      std::string description) {
  check_bounds(lambda_minus, lambda_plus);
  RateField f;
  f.regime_ = Regime::LocallyPeriodic;
  f.dim_ = dim;
  f.lo_ = lambda_minus;
  f.hi_ = lambda_plus;
  f.quad_ = std::move(fn);
  f.description_ = std::move(description);
  return f;
}

double RateField::eval(ConstPoint x, ConstPoint y, ConstPoint xi, ConstPoint eta) const {
  switch (regime_) {
    case Regime::Constant: return value_;
    case Regime::Periodic: return pair_(xi, eta);
    case Regime::Slow: return pair_(x, y);
    case Regime::LocallyPeriodic: return quad_(x, y, xi, eta);
  }
  return value_;
}

double RateField::eval_scaled(ConstPoint x, ConstPoint y, double eps) const {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eval_scaled needs eps > 0", eps);
  double v = value_;
  switch (regime_) {
    case Regime::Constant: return value_;
    case Regime::Periodic: {
      const auto xi = fractional(x, eps), eta = fractional(y, eps);
      v = pair_(cp(xi), cp(eta));
      break;
    }
    case Regime::Slow: v = pair_(x, y); break;
    case Regime::LocallyPeriodic: {
      const auto xi = fractional(x, eps), eta = fractional(y, eps);
      v = quad_(x, y, cp(xi), cp(eta));
      break;
    }
  }
  if (!(v >= lo_ - kBoundSlack) || !(v <= hi_ + kBoundSlack))
    throw Error(ErrorKind::Validation,
                "rate field value outside [Lambda-, Lambda+] for " + description_, v);
  return v;
}

double RateField::diagonal(ConstPoint x) const {
  switch (regime_) {
    case Regime::Constant: return value_;
    case Regime::Slow: return pair_(x, x);
    default:
      throw Error(ErrorKind::InvalidArgument,
                  "diagonal() is defined for constant and slow regimes only");
  }
}

PeriodicPairField RateField::freeze(ConstPoint x) const {
  switch (regime_) {
    case Regime::Constant: return PeriodicPairField::constant(dim_, value_);
    case Regime::Slow: return PeriodicPairField::constant(dim_, pair_(x, x));
    case Regime::Periodic: return PeriodicPairField(dim_, pair_, lo_, hi_, description_);
    case Regime::LocallyPeriodic: {
      std::vector<double> xv(x.begin(), x.end());
      std::ostringstream desc;
      desc.precision(17);
      desc << description_ << "@x=";
      for (double v : xv) desc << v << ',';
      auto fn = quad_;
      return PeriodicPairField(
          dim_, [fn, xv](ConstPoint xi, ConstPoint eta) { return fn(cp(xv), cp(xv), xi, eta); },
          lo_, hi_, desc.str());
    }
  }
  return PeriodicPairField::constant(dim_, value_);
}

ValidationReport RateField::validate(std::uint64_t seed, double continuity_threshold) const {
  ValidationReport report;
  Rng rng = make_stream(seed, 1);
  const int samples = 2000;
  double vmin = INFINITY, vmax = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const auto x = uniform_point(rng, dim_, -2.0, 2.0), y = uniform_point(rng, dim_, -2.0, 2.0);
    const auto xi = uniform_point(rng, dim_, 0.0, 1.0), eta = uniform_point(rng, dim_, 0.0, 1.0);
    const double v = eval(cp(x), cp(y), cp(xi), cp(eta));
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  report.add("environment.lower-bound", vmin >= lo_ - kBoundSlack, vmin, "min sampled Lambda");
  report.add("environment.upper-bound", vmax <= hi_ + kBoundSlack, vmax, "max sampled Lambda");

  if (regime_ == Regime::Periodic || regime_ == Regime::LocallyPeriodic) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = uniform_point(rng, dim_, -2.0, 2.0), y = uniform_point(rng, dim_, -2.0, 2.0);
      auto xi = uniform_point(rng, dim_, 0.0, 1.0), eta = uniform_point(rng, dim_, 0.0, 1.0);
      const double base = eval(cp(x), cp(y), cp(xi), cp(eta));
      for (int a = 0; a < dim_; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        xi[ai] += 1.0;
        worst = std::max(worst, std::abs(eval(cp(x), cp(y), cp(xi), cp(eta)) - base));
        xi[ai] -= 1.0;
        eta[ai] -= 1.0;
        worst = std::max(worst, std::abs(eval(cp(x), cp(y), cp(xi), cp(eta)) - base));
        eta[ai] += 1.0;
      }
    }
    report.add("environment.periodicity", worst <= 1e-10 * hi_, worst,
               "max change under unit lattice shifts");
  }

  double worst_freeze = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = uniform_point(rng, dim_, -2.0, 2.0);
    const auto xi = uniform_point(rng, dim_, 0.0, 1.0), eta = uniform_point(rng, dim_, 0.0, 1.0);
    const PeriodicPairField frozen = freeze(cp(x));
    const double direct = eval(cp(x), cp(x), cp(xi), cp(eta));
    worst_freeze = std::max(worst_freeze, std::abs(frozen(cp(xi), cp(eta)) - direct));
  }
  report.add("environment.freeze-consistency", worst_freeze <= 1e-12 * hi_, worst_freeze,
             "max |freeze(x)(xi,eta) - Lambda(x,x,xi,eta)|");

  if (regime_ == Regime::Slow || regime_ == Regime::LocallyPeriodic) {
    const double h = 1e-3;
    double jump = 0.0;
    for (int i = 0; i < 200; ++i) {
      auto x = uniform_point(rng, dim_, -2.0, 2.0);
      const auto xi = uniform_point(rng, dim_, 0.0, 1.0), eta = uniform_point(rng, dim_, 0.0, 1.0);
      const double base = eval(cp(x), cp(x), cp(xi), cp(eta));
      for (int a = 0; a < dim_; ++a) {
        x[static_cast<std::size_t>(a)] += h;
        jump = std::max(jump, std::abs(eval(cp(x), cp(x), cp(xi), cp(eta)) - base));
        x[static_cast<std::size_t>(a)] -= h;
      }
    }
    report.add("environment.continuity-probe", jump <= continuity_threshold * hi_, jump,
               "max change of Lambda(x,x,.) over slow steps of 1e-3");
  }
  return report;
}

}  // namespace ldp
