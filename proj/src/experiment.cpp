#include "ldp/experiment.hpp"

#include "ldp/error.hpp"
#include "ldp/field_library.hpp"
#include "ldp/hash.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace ldp::experiment {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

template <class T>
T value_or(const Json& block, const char* key, T fallback) {
  if (!block.is_object() || !block.contains(key)) return fallback;
  try {
    return block.at(key).get<T>();
  } catch (const Json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T required(const Json& block, const char* key) {
  if (!block.is_object() || !block.contains(key)) config_error(std::string("missing key '") + key + "'");
  return value_or<T>(block, key, T{});
}

std::vector<double> doubles(const Json& v) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error("expected a number or an array of numbers");
  return v.get<std::vector<double>>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

fields::TrigPolynomial make_trig(const Json& block, int dim) {
  fields::TrigPolynomial poly;
  poly.dim = dim;
  poly.c0 = value_or(block, "c0", 1.0);
  for (const auto& t : block.value("terms", Json::array())) {
    fields::TrigTerm term;
    term.coeff = required<double>(t, "coeff");
    term.k_xi = value_or(t, "k_xi", std::vector<int>{});
    term.k_eta = value_or(t, "k_eta", std::vector<int>{});
    term.sine = value_or(t, "sine", false);
    poly.terms.push_back(term);
  }
  return poly;
}

Json shifted_gaussian_table() {
  // N(-1, 1) density on [-8, 8], step 0.02.
  Json grid = Json::array(), values = Json::array();
  for (int i = -400; i <= 400; ++i) {
    const double z = 0.02 * i;
    grid.push_back(z);
    values.push_back(std::exp(-0.5 * (z + 1.0) * (z + 1.0)) / std::sqrt(2.0 * std::numbers::pi));
  }
  return {{"grid", grid}, {"values", values}};
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"gaussian-constant", "compound-poisson", "gamma-example", "slow"};
}

Json builtin(const std::string& name) {
  const Json gaussian = {{"family", "generalized-gaussian"}, {"dim", 1}, {"k", 0.5}, {"p", 2.0}};
  if (name == "gaussian-constant") {
    return {{"kernel", gaussian},
            {"environment", {{"regime", "constant"}, {"value", 1.0}}},
            {"grid", {{"n", 64}}},
            {"scan", {{"lambda", {{"from", -2.0}, {"to", 2.0}, {"count", 41}}},
                      {"zeta", {{"from", -2.0}, {"to", 2.0}, {"count", 41}}}}},
            {"flow", {{"x0", {0.0}}, {"T", 1.0}, {"steps", 512}}},
            {"simulation", {{"eps", {0.1}}, {"T", 1.0}, {"x0", {0.0}}, {"replications", 1000},
                            {"tilt", "none"}, {"event", {{"type", "whole"}}}}},
            {"seed", 1}};
  }
  if (name == "compound-poisson") {
    return {{"kernel", gaussian},
            {"environment", {{"regime", "constant"}, {"value", 1.0}}},
            {"simulation", {{"eps", {0.1, 0.05, 0.02}}, {"T", 1.0}, {"x0", {0.0}},
                            {"replications", 100000}, {"tilt", "auto"},
                            {"event", {{"type", "halfspace"}, {"normal", {1.0}}, {"level", 1.0}}}}},
            {"seed", 20240601}};
  }
  if (name == "gamma-example") {
    return {{"kernel", {{"family", "box"}, {"dim", 1}}},
            {"environment", {{"regime", "periodic"}, {"type", "separable"},
                             {"cusp", {{"b_min", 0.05}, {"beta", 0.25}, {"center", {0.5}}}},
                             {"peak", {{"alpha1", 0.001}, {"c", 0.05}, {"z0", {0.4}}}}}},
            {"grid", {{"n", 128}}},
            {"scan", {{"gamma", {{"from", -20.0}, {"to", 20.0}, {"count", 81}}}}},
            {"scenario", {{"search", true}}},
            {"seed", 1}};
  }
  if (name == "slow") {
    Json kernel = shifted_gaussian_table();
    kernel["family"] = "tabulated";
    kernel["dim"] = 1;
    kernel["envelope"] = {{"C", std::exp(0.5) / std::sqrt(2.0 * std::numbers::pi)}, {"k", 0.25}, {"p", 2.0}};
    return {{"kernel", kernel},
            {"environment", {{"regime", "slow"}, {"type", "diag-quadratic"}, {"c0", 1.0}, {"c1", 1.0}, {"cap", 10.0}}},
            {"flow", {{"x0", {0.0}}, {"T", 1.0}, {"steps", 512}}},
            {"simulation", {{"eps", {0.01}}, {"T", 1.0}, {"x0", {0.0}}, {"replications", 200},
                            {"tilt", "none"}, {"event", {{"type", "whole"}}}}},
            {"acceptance", {{"flow_constant", 5.0}}},
            {"seed", 11}};
  }
  config_error("unknown built-in config '" + name + "'");
}

Json load_config(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) return builtin(source.substr(8));
  std::ifstream in(source);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + source);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    config_error("config " + source + " does not parse: " + e.what());
  }
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error("override must look like KEY=VALUE: " + assignment);
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::exception&) {
    value = text;
  }
  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) config_error("override key has an empty component: " + key);
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
}

const Json* find(const Json& config, const std::string& dotted) {
  const Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &node->at(part);
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

JumpKernel make_kernel(const Json& block, const std::filesystem::path& base_dir) {
  if (!block.is_object()) config_error("kernel block is missing");
  const std::string family = required<std::string>(block, "family");
  const int dim = value_or(block, "dim", 1);
  KernelSettings ks;
  ks.tail_tol = value_or(block, "tail_tol", ks.tail_tol);
  ks.rel_tol = value_or(block, "rel_tol", ks.rel_tol);
  if (family == "generalized-gaussian" || family == "gaussian") {
    return JumpKernel::generalized_gaussian(dim, value_or(block, "k", 0.5), value_or(block, "p", 2.0), ks);
  }
  if (family == "box") return JumpKernel::box(dim, ks);
  if (family == "tabulated") {
    if (dim != 1) config_error("tabulated kernels are one-dimensional");
    const Json env = block.value("envelope", Json::object());
    const DecayEnvelope envelope{required<double>(env, "C"), required<double>(env, "k"),
                                 required<double>(env, "p")};
    if (block.contains("table"))
      return JumpKernel::from_table_file(resolve(base_dir, required<std::string>(block, "table")).string(),
                                         envelope, ks);
    return JumpKernel::tabulated(required<std::vector<double>>(block, "grid"),
                                 required<std::vector<double>>(block, "values"), envelope, ks);
  }
  config_error("unknown kernel family '" + family + "'");
}

RateField make_field(const Json& block, int dim) {
  if (!block.is_object()) config_error("environment block is missing");
  const std::string regime = required<std::string>(block, "regime");
  if (regime == "constant") return fields::constant(dim, value_or(block, "value", 1.0));
  const std::string type = value_or<std::string>(block, "type", "");
  if (regime == "periodic") {
    if (type == "trig") return fields::periodic_trig(make_trig(block, dim));
    if (type == "separable") {
      const Json cusp = block.value("cusp", Json::object()), peak = block.value("peak", Json::object());
      return fields::separable(
          fields::CuspProfile(dim, required<double>(cusp, "b_min"), required<double>(cusp, "beta"),
                              doubles(cusp.value("center", Json(std::vector<double>(dim, 0.5))))),
          fields::PeakProfile(dim, required<double>(peak, "alpha1"), required<double>(peak, "c"),
                              doubles(required<Json>(peak, "z0"))));
    }
    config_error("unknown periodic field type '" + type + "'");
  }
  if (regime == "slow") {
    if (type == "diag-quadratic")
      return fields::diag_quadratic(dim, value_or(block, "c0", 1.0), value_or(block, "c1", 1.0),
                                    value_or(block, "cap", 10.0));
    config_error("unknown slow field type '" + type + "'");
  }
  if (regime == "locally-periodic") {
    if (type == "quadratic-times-trig")
      return fields::quadratic_times_trig(value_or(block, "c0", 1.0), value_or(block, "c1", 1.0),
                                          value_or(block, "cap", 10.0),
                                          make_trig(block.value("trig", Json::object()), dim));
    config_error("unknown locally periodic field type '" + type + "'");
  }
  config_error("unknown regime '" + regime + "'");
}

GammaCandidate make_gamma_candidate(const Json& block, int dim) {
  GammaCandidate c;
  c.dim = dim;
  const Json cusp = block.value("cusp", Json::object()), peak = block.value("peak", Json::object());
  c.alpha1 = value_or(peak, "alpha1", c.alpha1);
  c.c = value_or(peak, "c", c.c);
  c.z0 = peak.contains("z0") ? doubles(peak.at("z0")) : std::vector<double>(dim, 0.4);
  c.b_min = value_or(cusp, "b_min", c.b_min);
  c.beta = value_or(cusp, "beta", c.beta);
  c.x_star = cusp.contains("center") ? doubles(cusp.at("center")) : std::vector<double>(dim, 0.5);
  return c;
}

SpectralSettings make_spectral_settings(const Json& block) {
  SpectralSettings s;
  s.tol = value_or(block, "tol", s.tol);
  s.max_iter = value_or(block, "max_iter", s.max_iter);
  s.lattice_max = value_or(block, "lattice_max", s.lattice_max);
  s.tail_tol = value_or(block, "tail_tol", s.tail_tol);
  s.residual_factor = value_or(block, "residual_factor", s.residual_factor);
  s.abs_margin = value_or(block, "abs_margin", s.abs_margin);
  s.diag_factor = value_or(block, "diag_factor", s.diag_factor);
  s.dense_fallback_max = value_or(block, "dense_fallback_max", s.dense_fallback_max);
  s.min_rcond = value_or(block, "min_rcond", s.min_rcond);
  return s;
}

LegendreSettings make_legendre_settings(const Json& block) {
  LegendreSettings s;
  s.grad_tol = value_or(block, "grad_tol", s.grad_tol);
  s.bracket_tol = value_or(block, "bracket_tol", s.bracket_tol);
  s.max_newton = value_or(block, "max_newton", s.max_newton);
  s.max_step = value_or(block, "max_step", s.max_step);
  s.max_sweeps = value_or(block, "max_sweeps", s.max_sweeps);
  s.max_radius = value_or(block, "max_radius", s.max_radius);
  s.exposed_eig = value_or(block, "exposed_eig", s.exposed_eig);
  s.probe = value_or(block, "probe", s.probe);
  return s;
}

RateSettings make_rate_settings(const Json& block) {
  RateSettings s;
  s.gauss_order = value_or(block, "gauss_order", s.gauss_order);
  s.max_order = value_or(block, "max_order", s.max_order);
  s.rel_tol = value_or(block, "rel_tol", s.rel_tol);
  return s;
}

std::vector<double> make_grid(const Json& block) {
  const double from = required<double>(block, "from"), to = required<double>(block, "to");
  const int count = required<int>(block, "count");
  if (count < 1) config_error("grid count must be positive");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
  return g;
}

Vector make_vector(const Json& value, int dim) {
  const auto v = doubles(value);
  if (static_cast<int>(v.size()) != dim) config_error("vector has the wrong dimension");
  return Eigen::Map<const Vector>(v.data(), dim);
}

Event make_event(const Json& block, int dim, const Vector& x0, double T,
                     const std::filesystem::path& base_dir) {
  const std::string type = value_or<std::string>(block, "type", "whole");
  if (type == "whole") return WholeSpaceEvent{};
  if (type == "halfspace")
    return HalfSpaceEvent{make_vector(required<Json>(block, "normal"), dim), required<double>(block, "level")};
  if (type == "ball")
    return BallEvent{make_vector(required<Json>(block, "center"), dim), required<double>(block, "radius")};
  if (type == "tube") {
    const double delta = required<double>(block, "delta");
    if (block.contains("path")) return TubeEvent{Path::read(resolve(base_dir, block.at("path").get<std::string>()).string()), delta};
    const Vector v = make_vector(required<Json>(block, "velocity"), dim);
    return TubeEvent{Path::straight(x0, v, T, value_or(block, "segments", 1)), delta};
  }
  config_error("unknown event type '" + type + "'");
}

Experiment build(const Json& config, const std::filesystem::path& base_dir, int workers,
                 std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> cache) {
  if (!config.is_object()) config_error("config must be a JSON object");
  JumpKernel kernel = make_kernel(config.value("kernel", Json()), base_dir);
  const int dim = kernel.dim();
  const Json env = config.value("environment", Json());
  if (env.is_object() && env.contains("dim") && env.at("dim").get<int>() != dim)
    config_error("environment dimension differs from the kernel dimension");
  if (const Json* g = find(config, "grid.dim"); g && g->get<int>() != dim)
    config_error("grid dimension differs from the kernel dimension");
  RateField field = make_field(env, dim);

  HamiltonianSettings hs;
  hs.grid_n = value_or(config.value("grid", Json::object()), "n", hs.grid_n);
  hs.spectral = make_spectral_settings(config.value("spectral", Json::object()));
  if (cache) hs.cache_dir = *cache;
  else if (config.contains("cache")) hs.cache_dir = resolve(base_dir, config.at("cache").get<std::string>());

  Experiment e{config,
               base_dir,
               dim,
               std::move(kernel),
               std::move(field),
               hs,
               make_legendre_settings(config.value("legendre", Json::object())),
               make_rate_settings(config.value("rate", Json::object())),
               workers,
               seed ? *seed : value_or<std::uint64_t>(config, "seed", 1)};
  e.rate_settings.workers = workers;
  return e;
}

std::string config_hash(const Json& config) { return hex64(fnv1a(config.dump())); }

}  // namespace ldp::experiment
