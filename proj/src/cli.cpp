#include "ldp/cli.hpp"

#include "ldp/error.hpp"
#include "ldp/experiment.hpp"
#include "ldp/rng.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace ldp::cli {

namespace fs = std::filesystem;
using experiment::Experiment;
using experiment::Json;

namespace {

struct Options {
  std::string config = "builtin:gaussian-constant";
  std::string out = "out";
  std::string cache;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::vector<std::string> overrides;
  std::string path;
};

// Fills results[i] = f(i) over a pool; the output order never depends on scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F&& f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1 || n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min<int>(workers, static_cast<int>(n)); ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  return line;
}

std::vector<std::string> indexed(const std::string& prefix, int d) {
  std::vector<std::string> v;
  for (int i = 1; i <= d; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

void append(std::vector<std::string>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(num(v[i]));
}

class Output {
 public:
  Output(fs::path dir, std::string command, const Experiment& e)
      : dir_(std::move(dir)), command_(std::move(command)), e_(e) {
    fs::create_directories(dir_);
  }

  void metadata(std::ostream& out) const {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    out << "# ldp-cli " << experiment::kVersion << "\n# command: " << command_
        << "\n# config_hash: " << experiment::config_hash(e_.config) << "\n# seed: " << e_.seed
        << "\n# rng: " << kRngName << "\n# created: " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  }

  fs::path csv(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) const {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    metadata(out);
    out << join(header) << '\n';
    for (const auto& r : rows) out << join(r) << '\n';
    std::cout << "wrote " << p.string() << '\n';
    return p;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string command_;
  const Experiment& e_;
};

Vector point_or_zero(const Experiment& e, const char* key) {
  if (const Json* v = experiment::find(e.config, key)) return experiment::make_vector(*v, e.dim);
  return Vector::Zero(e.dim);
}

// Spatial point for x-dependent Hamiltonians; empty otherwise.
ConstPoint slow_point(const Hamiltonian& h, const Vector& x) { return h.x_dependent() ? view(x) : ConstPoint{}; }

Vector direction(const Experiment& e, const char* key) {
  Vector dir = Vector::Zero(e.dim);
  dir[0] = 1.0;
  if (const Json* v = experiment::find(e.config, key)) dir = experiment::make_vector(*v, e.dim);
  if (dir.norm() == 0.0) throw Error(ErrorKind::Config, std::string(key) + " must be nonzero");
  return dir;
}

std::vector<double> grid_or(const Experiment& e, const char* key, double from, double to, int count) {
  if (const Json* g = experiment::find(e.config, key)) return experiment::make_grid(*g);
  return experiment::make_grid(Json{{"from", from}, {"to", to}, {"count", count}});
}

int cmd_validate(const Experiment& e, const Output& out) {
  ValidationReport report = e.kernel.validate(e.seed);
  report.append(e.field.validate(e.seed));
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Vector x = Vector::Zero(e.dim), zero = Vector::Zero(e.dim);
  const double h0 = h.value(slow_point(h, x), view(zero)).value;
  report.add("hamiltonian-vanishes-at-zero", std::abs(h0) < 1e-10, h0);
  std::vector<std::vector<std::string>> rows;
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    rows.push_back({c.name, c.passed ? "true" : "false", num(c.value), "\"" + c.detail + "\""});
    passed += c.passed;
  }
  out.csv("validate.csv", {"check", "passed", "value", "detail"}, rows);
  std::cout << "validate: " << passed << "/" << report.checks.size() << " checks passed\n";
  return report.all_passed() ? 0 : 3;
}

int cmd_hamiltonian_scan(const Experiment& e, const Output& out) {
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const auto ts = grid_or(e, "scan.lambda", -2.0, 2.0, 41);
  const Vector dir = direction(e, "scan.direction"), x = point_or_zero(e, "scan.x");
  auto rows = parallel_map<std::vector<std::string>>(ts.size(), e.workers, [&](std::size_t i) {
    const Vector lam = ts[i] * dir;
    const HValue v = h.value(slow_point(h, x), view(lam));
    std::vector<std::string> row{num(ts[i])};
    append(row, lam);
    row.push_back(num(v.value));
    row.push_back(v.in_gamma ? "true" : "false");
    return row;
  });
  auto header = indexed("lambda_", e.dim);
  header.insert(header.begin(), "t");
  header.push_back("H");
  header.push_back("in_gamma");
  out.csv("hamiltonian_scan.csv", header, rows);
  return 0;
}

int cmd_lagrangian_scan(const Experiment& e, const Output& out) {
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Lagrangian L(h, e.legendre_settings);
  const auto ts = grid_or(e, "scan.zeta", -2.0, 2.0, 41);
  const Vector dir = direction(e, "scan.direction"), x = point_or_zero(e, "scan.x");
  auto rows = parallel_map<std::vector<std::string>>(ts.size(), e.workers, [&](std::size_t i) {
    const Vector zeta = ts[i] * dir;
    const LagrangianValue v = L(slow_point(h, x), view(zeta));
    std::vector<std::string> row{num(ts[i])};
    append(row, zeta);
    row.push_back(num(v.value));
    append(row, v.argmax);
    row.push_back(v.method);
    row.push_back(v.boundary ? "true" : "false");
    row.push_back(v.exposed ? "true" : "false");
    row.push_back(v.on_linear_segment ? "true" : "false");
    return row;
  });
  auto header = indexed("zeta_", e.dim);
  header.insert(header.begin(), "t");
  header.push_back("L");
  for (const auto& s : indexed("argmax_", e.dim)) header.push_back(s);
  for (const char* s : {"method", "boundary", "exposed", "on_linear_segment"}) header.push_back(s);
  out.csv("lagrangian_scan.csv", header, rows);
  return 0;
}

int cmd_gamma_region(const Experiment& e, const Output& out) {
  JumpKernel kernel = e.kernel;
  RateField field = e.field;
  if (const Json* s = experiment::find(e.config, "scenario.search"); s && s->get<bool>()) {
    std::vector<GammaCandidate> candidates;
    if (const Json* list = experiment::find(e.config, "scenario.candidates")) {
      for (const auto& c : *list) candidates.push_back(experiment::make_gamma_candidate(c, e.dim));
    } else if (const Json* env = experiment::find(e.config, "environment"); env && env->value("type", "") == "separable") {
      candidates.push_back(experiment::make_gamma_candidate(*env, e.dim));
    }
    for (auto& c : default_gamma_candidates()) {
      bool seen = false;
      for (const auto& k : candidates) seen = seen || k.description() == c.description();
      if (c.dim == e.dim && !seen) candidates.push_back(c);
    }
    const GammaSearch search = search_gamma_example(candidates, e.hamiltonian_settings.grid_n,
                                                    e.hamiltonian_settings.spectral);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < search.reports.size(); ++i) {
      const auto& r = search.reports[i];
      rows.push_back({std::to_string(i), num(r.candidate.alpha1), num(r.alpha2), num(r.candidate.c),
                      num(r.candidate.z0[0]), num(r.candidate.b_min), num(r.candidate.beta),
                      num(r.ex2_norm), r.ex2_holds ? "true" : "false", r.ex3_holds ? "true" : "false",
                      r.ex3_range ? num(r.ex3_range->first) : "", r.ex3_range ? num(r.ex3_range->second) : "",
                      num(r.lambda0.norm()), r.in_gamma_at_zero ? "true" : "false",
                      r.in_gamma_at_lambda0 ? "true" : "false", r.reproduced() ? "true" : "false"});
    }
    out.csv("gamma_search.csv",
            {"candidate", "alpha1", "alpha2", "c", "z0_1", "b_min", "beta", "ex2_norm", "ex2_holds",
             "ex3_holds", "ex3_from", "ex3_to", "lambda0_norm", "in_gamma_at_zero",
             "in_gamma_at_lambda0", "reproduced"},
            rows);
    if (search.found) {
      const auto& c = search.reports[*search.found].candidate;
      std::cout << "scenario: candidate " << *search.found << " reproduces Gamma != R^d (" << c.description() << ")\n";
      kernel = JumpKernel::box(e.dim);
      field = c.field();
    } else {
      std::cout << "scenario: no candidate reproduced Gamma != R^d\n";
    }
  }
  const Hamiltonian h(kernel, field, e.hamiltonian_settings);
  const auto ts = grid_or(e, "scan.gamma", -20.0, 20.0, 81);
  std::vector<Vector> lams;
  if (e.dim == 1) {
    for (double t : ts) lams.push_back(Vector::Constant(1, t));
  } else {
    // Plane spanned by the first two axes.
    for (double a : ts)
      for (double b : ts) {
        Vector l = Vector::Zero(e.dim);
        l[0] = a;
        l[1] = b;
        lams.push_back(l);
      }
  }
  const Vector x = point_or_zero(e, "scan.x");
  auto rows = parallel_map<std::vector<std::string>>(lams.size(), e.workers, [&](std::size_t i) {
    std::vector<std::string> row;
    append(row, lams[i]);
    if (h.backing() == Hamiltonian::Backing::Spectral) {
      const SpectralResult r = h.spectral(slow_point(h, x), view(lams[i]));
      row.push_back(r.in_gamma ? "true" : "false");
      row.push_back(num(r.theta_discrete + r.g_min));
      row.push_back(num(r.margin));
      row.push_back(r.method);
    } else {
      row.push_back("true");
      row.push_back(num(h.value(slow_point(h, x), view(lams[i])).value + h.g_min(slow_point(h, x))));
      row.push_back("0");
      row.push_back("closed-form");
    }
    return row;
  });
  std::size_t outside = 0;
  for (const auto& r : rows) outside += r[static_cast<std::size_t>(e.dim)] == "false";
  auto header = indexed("lambda_", e.dim);
  for (const char* s : {"in_gamma", "theta_plus_gmin", "margin", "method"}) header.push_back(s);
  out.csv("gamma_region.csv", header, rows);
  std::cout << "gamma-region: " << outside << " of " << rows.size() << " cells outside Gamma\n";
  return 0;
}

int cmd_effective_coeffs(const Experiment& e, const Output& out) {
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Vector x = point_or_zero(e, "scan.x");
  const int d = e.dim;
  Vector b;
  Matrix Theta, hess;
  std::vector<std::vector<std::string>> kappa_rows;
  if (h.backing() == Hamiltonian::Backing::Spectral) {
    const auto problem = h.problem(slow_point(h, x));
    const EffectiveCoefficients c = effective_coeffs(*problem);
    b = c.b;
    Theta = c.Theta;
    hess = c.hessian;
    for (std::size_t n = 0; n < problem->grid().size(); ++n) {
      std::vector<std::string> row{std::to_string(n)};
      for (double v : problem->grid().node(n)) row.push_back(num(v));
      for (const auto& k : c.kappa) row.push_back(num(k[static_cast<Eigen::Index>(n)]));
      kappa_rows.push_back(row);
    }
  } else {
    const Vector zero = Vector::Zero(d);
    b = -h.grad(slow_point(h, x), view(zero));
    hess = h.hess(slow_point(h, x), view(zero));
    Theta = 0.5 * hess;
  }
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < d; ++i) rows.push_back({"b", std::to_string(i + 1), "", num(b[i])});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rows.push_back({"Theta", std::to_string(i + 1), std::to_string(j + 1), num(Theta(i, j))});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rows.push_back({"hessian", std::to_string(i + 1), std::to_string(j + 1), num(hess(i, j))});
  out.csv("effective_coeffs.csv", {"quantity", "i", "j", "value"}, rows);
  if (!kappa_rows.empty()) {
    auto header = indexed("xi_", d);
    header.insert(header.begin(), "node");
    for (const auto& s : indexed("kappa_", d)) header.push_back(s);
    out.csv("kappa.csv", header, kappa_rows);
  }
  return 0;
}

int cmd_rate(const Experiment& e, const Output& out, const std::string& path_flag) {
  std::string file = path_flag;
  if (file.empty()) {
    const Json* p = experiment::find(e.config, "rate.path");
    if (!p) throw Error(ErrorKind::Config, "rate needs --path or rate.path");
    file = (e.base_dir.empty() || fs::path(p->get<std::string>()).is_absolute())
               ? p->get<std::string>()
               : (e.base_dir / p->get<std::string>()).string();
  }
  const Path path = Path::read(file);
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Lagrangian L(h, e.legendre_settings);
  const RateReport r = rate(path, L, e.rate_settings);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < r.segments.size(); ++j) {
    std::vector<std::string> row{std::to_string(j), num(path.times[j]), num(path.times[j + 1])};
    append(row, path.velocity(j));
    row.push_back(num(r.segments[j]));
    row.push_back(std::to_string(r.nodes_used[j]));
    rows.push_back(row);
  }
  std::vector<std::string> total{"total", num(0.0), num(path.horizon())};
  for (int i = 0; i < e.dim; ++i) total.push_back("");
  total.push_back(num(r.value));
  total.push_back("");
  rows.push_back(total);
  auto header = std::vector<std::string>{"segment", "t0", "t1"};
  for (const auto& s : indexed("v_", e.dim)) header.push_back(s);
  header.push_back("contribution");
  header.push_back("nodes");
  out.csv("rate.csv", header, rows);
  std::cout << "rate: I = " << num(r.value) << (r.infinite ? " (infinite)" : "") << '\n';
  return 0;
}

int cmd_flow(const Experiment& e, const Output& out) {
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Vector x0 = point_or_zero(e, "flow.x0");
  const Path p = effective_flow(h, x0, e.get("flow.T", 1.0), e.get("flow.steps", 512));
  const fs::path file = out.dir() / "flow.txt";
  std::ofstream f(file, std::ios::binary);
  out.metadata(f);
  p.print(f);
  std::cout << "wrote " << file.string() << '\n';
  return 0;
}

SimConfig sim_config(const Experiment& e, double eps) {
  SimConfig c;
  c.eps = eps;
  c.T = e.get("simulation.T", 1.0);
  c.x0 = point_or_zero(e, "simulation.x0");
  c.seed = e.seed;
  c.replications = e.get<std::size_t>("simulation.replications", 1000);
  c.workers = e.workers;
  return c;
}

std::vector<double> eps_list(const Experiment& e) {
  const Json* v = experiment::find(e.config, "simulation.eps");
  if (!v) return {0.1};
  return v->is_array() ? v->get<std::vector<double>>() : std::vector<double>{v->get<double>()};
}

void set_tilt(const Experiment& e, SimConfig& c, const EventTheory& theory) {
  const Json* t = experiment::find(e.config, "simulation.tilt");
  if (!t || (t->is_string() && t->get<std::string>() == "none")) return;
  if (t->is_string() && t->get<std::string>() == "auto") {
    if (theory.tilt.norm() > 0.0) c.tilt = theory.tilt;
    return;
  }
  c.tilt = experiment::make_vector(*t, e.dim);
}

int cmd_simulate(const Experiment& e, const Output& out) {
  SimConfig c = sim_config(e, eps_list(e).front());
  if (const Json* t = experiment::find(e.config, "simulation.tilt"); t && !t->is_string())
    c.tilt = experiment::make_vector(*t, e.dim);
  const Simulator sim(e.kernel, e.field);
  const std::size_t dump = e.get<std::size_t>("simulation.dump", 3);
  std::vector<std::vector<std::string>> rows(c.replications);
  std::mutex m;
  sim.run(c, [&](std::size_t i, const Trajectory& tr) {
    std::vector<std::string> row{std::to_string(i), std::to_string(tr.jumps()), std::to_string(tr.proposals),
                                 num(tr.log_weight)};
    append(row, tr.terminal());
    rows[i] = std::move(row);
    if (i < dump) {
      std::ostringstream body;
      tr.print(body);
      std::lock_guard lock(m);
      std::ofstream f(out.dir() / ("trajectory_" + std::to_string(i) + ".txt"), std::ios::binary);
      f << body.str();
    }
  });
  auto header = std::vector<std::string>{"replication", "jumps", "proposals", "log_weight"};
  for (const auto& s : indexed("x_T_", e.dim)) header.push_back(s);
  out.csv("simulate.csv", header, rows);
  return 0;
}

int cmd_ldp_verify(const Experiment& e, const Output& out) {
  const Hamiltonian h(e.kernel, e.field, e.hamiltonian_settings);
  const Lagrangian L(h, e.legendre_settings);
  const Simulator sim(e.kernel, e.field);
  const Json event_block = experiment::find(e.config, "simulation.event") ? *experiment::find(e.config, "simulation.event")
                                                                            : Json{{"type", "whole"}};
  std::vector<std::vector<std::string>> rows;
  for (double eps : eps_list(e)) {
    SimConfig c = sim_config(e, eps);
    const Event event = experiment::make_event(event_block, e.dim, c.x0, c.T, e.base_dir);
    const EventTheory theory = event_theory(event, L, c);
    set_tilt(e, c, theory);
    const EventEstimate est = estimate_event(sim, c, event, theory);
    const double gap = std::abs(est.eps_log_p - est.theory) / std::abs(est.theory);
    rows.push_back({num(eps), std::to_string(est.replications), std::to_string(est.hits), num(est.p_hat),
                    num(est.std_error), num(est.eps_log_p), num(est.theory), num(gap),
                    est.upper_bound ? num(*est.upper_bound) : "", num(c.tilt ? (*c.tilt)[0] : 0.0)});
    std::cout << "eps=" << num(eps) << " p_hat=" << num(est.p_hat) << " eps_log_p=" << num(est.eps_log_p)
              << " theory=" << num(est.theory) << '\n';
  }
  out.csv("ldp_verify.csv",
          {"eps", "replications", "hits", "p_hat", "stderr", "eps_log_p", "neg_rate_theory", "rel_gap",
           "upper_bound", "tilt_1"},
          rows);
  return 0;
}

void error_record(const fs::path& dir, const std::string& kind, const std::string& message, double value) {
  const Json rec = {{"status", "error"}, {"kind", kind}, {"message", message}, {"value", value}};
  std::cerr << rec.dump() << '\n';
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!ec) std::ofstream(dir / "error.json") << rec.dump(2) << '\n';
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? std::optional<std::string>(v) : std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Large deviations toolkit for jump processes in periodic and slowly varying media", "ldp-cli"};
  app.require_subcommand(1);
  Options o;
  if (auto v = env("LDP_CONFIG")) o.config = *v;
  if (auto v = env("LDP_OUT")) o.out = *v;
  if (auto v = env("LDP_CACHE")) o.cache = *v;
  if (auto v = env("LDP_WORKERS")) o.workers = std::stoi(*v);
  if (auto v = env("LDP_SEED")) o.seed = std::stoull(*v);
  if (auto v = env("LDP_OVERRIDE")) {
    std::istringstream s(*v);
    for (std::string item; std::getline(s, item, ';');)
      if (!item.empty()) o.overrides.push_back(item);
  }
  std::uint64_t seed_flag = 0;
  app.add_option("--config", o.config, "JSON config file or builtin:NAME")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--cache", o.cache, "Spectral cache directory");
  auto* seed_opt = app.add_option("--seed", seed_flag, "Master seed");
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  std::vector<std::string> extra;
  app.add_option("--override", extra, "KEY=VALUE config override (repeatable)");
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "Kernel and environment invariant suites"},
      {"hamiltonian-scan", "H along a lambda grid"},
      {"lagrangian-scan", "L along a zeta grid"},
      {"gamma-region", "In-Gamma map over a lambda grid"},
      {"effective-coeffs", "Effective drift b, corrector kappa and diffusion Theta"},
      {"rate", "Rate functional of a path file"},
      {"flow", "Effective flow path"},
      {"simulate", "Simulate trajectories"},
      {"ldp-verify", "Monte Carlo eps-sequence against the rate function"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "rate") sub->add_option("--path", o.path, "Path file (t x1 ... xd per line)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (*seed_opt) o.seed = seed_flag;
  o.overrides.insert(o.overrides.end(), extra.begin(), extra.end());
  const std::string command = app.get_subcommands().front()->get_name();
  const fs::path out_dir(o.out);
  try {
    Json config = experiment::load_config(o.config);
    for (const auto& ov : o.overrides) experiment::apply_override(config, ov);
    const fs::path base = o.config.rfind("builtin:", 0) == 0 ? fs::path() : fs::path(o.config).parent_path();
    const Experiment e = experiment::build(config, base, o.workers, o.seed,
                                           o.cache.empty() ? std::nullopt : std::optional<fs::path>(o.cache));
    const Output out(out_dir, command, e);
    if (command == "validate") return cmd_validate(e, out);
    if (command == "hamiltonian-scan") return cmd_hamiltonian_scan(e, out);
    if (command == "lagrangian-scan") return cmd_lagrangian_scan(e, out);
    if (command == "gamma-region") return cmd_gamma_region(e, out);
    if (command == "effective-coeffs") return cmd_effective_coeffs(e, out);
    if (command == "rate") return cmd_rate(e, out, o.path);
    if (command == "flow") return cmd_flow(e, out);
    if (command == "simulate") return cmd_simulate(e, out);
    return cmd_ldp_verify(e, out);
  } catch (const Error& err) {
    error_record(out_dir, to_string(err.kind()), err.what(), err.value());
  } catch (const std::exception& err) {
    error_record(out_dir, "internal", err.what(), 0.0);
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"ldp-cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ldp::cli
