#include "ldp/spectral_cache.hpp"

#include "ldp/error.hpp"
#include "ldp/hash.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace ldp {

namespace {

using nlohmann::json;

json to_json_vector(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector from_json_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

SpectralCache::SpectralCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create cache directory " + dir_.string());
}

std::string SpectralCache::key(const std::string& identity, ConstPoint lambda) {
  std::ostringstream out;
  out << identity << "|lambda=";
  for (double l : lambda) out << std::llround(l * 1e12) << ",";
  return hex64(fnv1a(out.str()));
}

std::optional<SpectralResult> SpectralCache::load(const std::string& identity,
                                                  ConstPoint lambda) const {
  std::ifstream in(dir_ / (key(identity, lambda) + ".json"));
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.at("identity").get<std::string>() != identity) return std::nullopt;
    SpectralResult r;
    r.lambda = from_json_vector(j.at("lambda"));
    r.theta = j.at("theta").get<double>();
    r.theta_discrete = j.at("theta_discrete").get<double>();
    r.u = from_json_vector(j.at("u"));
    r.u_star = from_json_vector(j.at("u_star"));
    r.g_min = j.at("g_min").get<double>();
    r.g_max = j.at("g_max").get<double>();
    r.in_gamma = j.at("in_gamma").get<bool>();
    r.margin = j.at("margin").get<double>();
    r.residual = j.at("residual").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.method = j.at("method").get<std::string>();
    return r;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void SpectralCache::store(const std::string& identity, ConstPoint lambda,
                          const SpectralResult& r) const {
  json j;
  j["identity"] = identity;
  j["lambda"] = to_json_vector(r.lambda);
  j["theta"] = r.theta;
  j["theta_discrete"] = r.theta_discrete;
  j["u"] = to_json_vector(r.u);
  j["u_star"] = to_json_vector(r.u_star);
  j["g_min"] = r.g_min;
  j["g_max"] = r.g_max;
  j["in_gamma"] = r.in_gamma;
  j["margin"] = r.margin;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["method"] = r.method;
  static std::atomic<unsigned> counter{0};
  const std::string name = key(identity, lambda);
  std::ostringstream tmp_name;
  tmp_name << name << ".tmp" << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << counter++;
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorKind::Io, "cannot write cache file " + tmp.string());
    out << j.dump(1) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, dir_ / (name + ".json"), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot finalize cache file " + name);
}

}  // namespace ldp
