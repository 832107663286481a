#include "ldp/hamiltonian.hpp"

#include "ldp/error.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace ldp {

namespace {

void append_rounded(std::ostringstream& out, ConstPoint p) {
  for (double v : p) out << std::llround(v * 1e12) << ',';
}

void check_lambda(const Hamiltonian& h, ConstPoint lambda) {
  if (lambda.size() != static_cast<std::size_t>(h.dim()))
    throw Error(ErrorKind::InvalidArgument, "Hamiltonian: lambda has the wrong dimension");
  for (double l : lambda)
    if (!std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "Hamiltonian: non-finite lambda");
}

}  // namespace

Hamiltonian::Hamiltonian(JumpKernel kernel, RateField field, HamiltonianSettings settings)
    : kernel_(std::move(kernel)), field_(std::move(field)), settings_(std::move(settings)) {
  if (kernel_.dim() != field_.dim())
    throw Error(ErrorKind::InvalidArgument, "kernel and rate field dimensions differ");
  switch (field_.regime()) {
    case Regime::Constant: backing_ = Backing::ClosedForm; break;
    case Regime::Slow: backing_ = Backing::Slow; break;
    default: backing_ = Backing::Spectral; break;
  }
  if (backing_ == Backing::Spectral && settings_.cache_dir) disk_.emplace(*settings_.cache_dir);
}

double Hamiltonian::scale(ConstPoint x) const {
  if (backing_ == Backing::ClosedForm) return field_.diagonal({});
  if (x.size() != static_cast<std::size_t>(dim()))
    throw Error(ErrorKind::InvalidArgument, "slow-regime Hamiltonian needs a point x of dimension d");
  return field_.diagonal(x);
}

std::string Hamiltonian::point_key(ConstPoint x) const {
  if (field_.regime() != Regime::LocallyPeriodic) return {};
  if (x.size() != static_cast<std::size_t>(dim()))
    throw Error(ErrorKind::InvalidArgument,
                "locally periodic Hamiltonian needs a point x of dimension d");
  std::ostringstream out;
  append_rounded(out, x);
  return out.str();
}

std::string Hamiltonian::entry_key(ConstPoint x, ConstPoint lambda) const {
  std::ostringstream out;
  out << point_key(x) << '|';
  append_rounded(out, lambda);
  return out.str();
}

Hamiltonian::Entry Hamiltonian::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = cache_.find(key);
  return it == cache_.end() ? Entry{} : it->second;
}

void Hamiltonian::remember(const std::string& key, const Entry& update) const {
  std::unique_lock lock(mutex_);
  Entry& e = cache_[key];
  if (update.value) e.value = update.value;
  if (update.grad) e.grad = update.grad;
  if (update.hess) e.hess = update.hess;
}

std::shared_ptr<const TorusProblem> Hamiltonian::problem(ConstPoint x) const {
  if (backing_ != Backing::Spectral)
    throw Error(ErrorKind::InvalidArgument, "problem(): Hamiltonian is not spectral");
  const std::string key = point_key(x);
  {
    std::shared_lock lock(mutex_);
    auto it = problems_.find(key);
    if (it != problems_.end()) return it->second;
  }
  auto p = std::make_shared<const TorusProblem>(kernel_, field_.freeze(x),
                                                TorusGrid(dim(), settings_.grid_n),
                                                settings_.spectral);
  std::unique_lock lock(mutex_);
  return problems_.emplace(key, std::move(p)).first->second;
}

SpectralResult Hamiltonian::spectral(ConstPoint x, ConstPoint lambda) const {
  check_lambda(*this, lambda);
  const auto p = problem(x);
  if (disk_)
    if (auto hit = disk_->load(p->identity(), lambda)) return *hit;
  SpectralResult r = p->solve(lambda);
  if (disk_) disk_->store(p->identity(), lambda, r);
  return r;
}

HValue Hamiltonian::value(ConstPoint x, ConstPoint lambda) const {
  check_lambda(*this, lambda);
  if (backing_ != Backing::Spectral) return {scale(x) * (kernel_.exp_moment(lambda) - 1.0), true};
  const std::string key = entry_key(x, lambda);
  if (auto e = lookup(key); e.value) return *e.value;
  const SpectralResult r = spectral(x, lambda);
  const HValue v{r.theta, r.in_gamma};
  remember(key, {v, std::nullopt, std::nullopt});
  return v;
}

Vector Hamiltonian::grad(ConstPoint x, ConstPoint lambda) const {
  check_lambda(*this, lambda);
  if (backing_ != Backing::Spectral) return scale(x) * kernel_.exp_moment_grad(lambda);
  const std::string key = entry_key(x, lambda);
  if (auto e = lookup(key); e.grad) return *e.grad;
  if (auto e = lookup(key); e.value && !e.value->in_gamma)
    throw Error(ErrorKind::NotInGamma, "Hamiltonian gradient requested on the flat branch");
  const auto p = problem(x);
  const SkewedOperator op = p->assemble(lambda, true);
  const SpectralResult r = principal_eig(op, settings_.spectral);
  if (!r.in_gamma) {
    remember(key, {HValue{r.theta, false}, std::nullopt, std::nullopt});
    throw Error(ErrorKind::NotInGamma, "Hamiltonian gradient requested on the flat branch");
  }
  const Vector g = theta_grad(op, r);
  remember(key, {HValue{r.theta, true}, g, std::nullopt});
  return g;
}

Matrix Hamiltonian::hess(ConstPoint x, ConstPoint lambda) const {
  check_lambda(*this, lambda);
  if (backing_ != Backing::Spectral) return scale(x) * kernel_.exp_moment_hess(lambda);
  const std::string key = entry_key(x, lambda);
  if (auto e = lookup(key); e.hess) return *e.hess;
  const auto p = problem(x);
  const SkewedOperator op = p->assemble(lambda, true);
  const SpectralResult r = principal_eig(op, settings_.spectral);
  if (!r.in_gamma) {
    remember(key, {HValue{r.theta, false}, std::nullopt, std::nullopt});
    throw Error(ErrorKind::NotInGamma, "Hamiltonian Hessian requested on the flat branch");
  }
  const Vector g = theta_grad(op, r);
  const Matrix H = theta_hess(op, r, settings_.spectral);
  remember(key, {HValue{r.theta, true}, g, H});
  return H;
}

double Hamiltonian::g_min(ConstPoint x) const {
  if (backing_ != Backing::Spectral) return scale(x);
  return problem(x)->g_min();
}

std::string Hamiltonian::description() const {
  std::ostringstream out;
  out << kernel_.description() << "|" << field_.description() << "|N=" << settings_.grid_n;
  return out.str();
}

}  // namespace ldp
