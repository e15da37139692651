#include "efcap/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "efcap/error.hpp"

namespace efcap {

namespace {

using nlohmann::json;

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string meta_line(std::string_view kind, const Params& p, const std::string& hash) {
  return fmt::format("# kind={} N={} p={} config_hash={}\n", kind, p.N, format_real(p.p), hash);
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json to_json(const IntegratorConfig& c) {
  return {{"rel_tol", c.rel_tol},         {"abs_tol", c.abs_tol},
          {"theta_start", c.theta_start}, {"max_step", real_or_null(c.max_step)},
          {"max_steps", c.max_steps},     {"estimate_error", c.estimate_error}};
}

json to_json(const RunConfig& c) {
  json j = to_json(c.integrator);
  j["N"] = c.params.N;
  j["p"] = c.params.p;
  j["gamma"] = c.gamma;
  j["gamma_min"] = c.gamma_min;
  j["gamma_max"] = c.gamma_max;
  j["points"] = c.points;
  j["theta"] = c.theta ? json(*c.theta) : json(nullptr);
  j["theta_star"] = c.theta_star ? json(*c.theta_star) : json(nullptr);
  j["t_end"] = c.t_end;
  j["lambda_list"] = c.lambda_list;
  j["p_list"] = c.p_list;
  j["theta_list"] = c.theta_list;
  j["suite"] = c.suite;
  j["out"] = c.out;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known{
      "rel_tol", "abs_tol", "theta_start", "max_step", "max_steps", "estimate_error",
      "N", "p", "gamma", "gamma_min", "gamma_max", "points", "theta", "theta_star",
      "t_end", "lambda_list", "p_list", "theta_list", "suite", "out", "threads", "seed"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw InvalidArgument("unknown config key '" + k + "'");
  try {
    auto& ic = c.integrator;
    if (j.contains("rel_tol")) ic.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("abs_tol")) ic.abs_tol = j["abs_tol"].get<double>();
    if (j.contains("theta_start")) ic.theta_start = j["theta_start"].get<double>();
    if (j.contains("max_step")) ic.max_step = real_from(j["max_step"]);
    if (j.contains("max_steps")) ic.max_steps = j["max_steps"].get<long>();
    if (j.contains("estimate_error")) ic.estimate_error = j["estimate_error"].get<bool>();
    if (j.contains("N")) c.params.N = j["N"].get<int>();
    if (j.contains("p")) c.params.p = j["p"].get<double>();
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("gamma_min")) c.gamma_min = j["gamma_min"].get<double>();
    if (j.contains("gamma_max")) c.gamma_max = j["gamma_max"].get<double>();
    if (j.contains("points")) c.points = j["points"].get<int>();
    if (j.contains("theta") && !j["theta"].is_null()) c.theta = j["theta"].get<double>();
    if (j.contains("theta_star") && !j["theta_star"].is_null())
      c.theta_star = j["theta_star"].get<double>();
    if (j.contains("t_end")) c.t_end = j["t_end"].get<double>();
    if (j.contains("lambda_list")) c.lambda_list = j["lambda_list"].get<std::vector<double>>();
    if (j.contains("p_list")) c.p_list = j["p_list"].get<std::vector<double>>();
    if (j.contains("theta_list")) c.theta_list = j["theta_list"].get<std::vector<double>>();
    if (j.contains("suite")) c.suite = j["suite"].get<std::string>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::string config_hash(const RunConfig& cfg) {
  // Output location and thread count do not change any result.
  json j = to_json(cfg);
  j.erase("out");
  j.erase("threads");
  return fmt::format("{:016x}", fnv1a64(j.dump()));
}

json to_json(const Exponents& e) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"p_S", e.p_S}, {"p_JL", real_or_null(e.p_JL)}, {"mu", e.mu},       {"q", e.q},
          {"a", opt(e.a)}, {"m", opt(e.m)},                {"alpha", opt(e.alpha)},
          {"beta", opt(e.beta)}};
}

json to_json(const Regime& r) {
  return {{"criticality", std::string(to_string(r.criticality))},
          {"jl_position", std::string(to_string(r.jl_position))},
          {"spiral", r.spiral}};
}

std::string profile_csv(const RadialProfile& profile, const std::string& hash) {
  std::string s = fmt::format("# kind={} config_hash={}\nx,value,derivative\n",
                              to_string(profile.kind), hash);
  for (std::size_t i = 0; i < profile.grid.size(); ++i)
    s += fmt::format("{:.17g},{:.17g},{:.17g}\n", profile.grid[i], profile.value[i],
                     profile.derivative[i]);
  return s;
}

std::string branch_csv(const Branch& branch, const std::string& hash) {
  std::string s = meta_line("branch", branch.params, hash);
  s += "Gamma,gamma,Theta,R,slope_sign,w_end\n";
  for (const BranchPoint& b : branch.points)
    s += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", b.Gamma, b.gamma, b.Theta,
                     b.R, b.slope_sign, b.w_end);
  return s;
}

json branch_json(const Branch& branch, const RunConfig& cfg, const std::string& hash) {
  json tps = json::array();
  for (const auto& t : branch.turning_points)
    tps.push_back({{"Gamma_low", t.Gamma_low}, {"Gamma_high", t.Gamma_high}});
  json fails = json::array();
  for (const auto& f : branch.failures) fails.push_back({{"Gamma", f.Gamma}, {"message", f.message}});
  json j{{"config_hash", hash},
         {"config", to_json(cfg)},
         {"params", {{"N", branch.params.N}, {"p", branch.params.p}}},
         {"exponents", to_json(compute_exponents(branch.params))},
         {"regime", to_json(classify(branch.params))},
         {"turning_points", tps},
         {"theta_min", branch.theta_min},
         {"theta_min_Gamma", branch.theta_min_Gamma},
         {"single_valued_above", branch.single_valued_above},
         {"failures", fails}};
  j["oscillation_count"] = branch.oscillation_count >= 0 ? json(branch.oscillation_count)
                                                         : json(nullptr);
  return j;
}

std::string singular_csv(const SingularProfile& s, const std::string& hash) {
  std::string out = meta_line("singular", s.params, hash);
  out += "theta,U*,dU*\n";
  const RadialProfile& p = s.profile;
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.grid[i], p.value[i], p.derivative[i]);
  return out;
}

json singular_json(const SingularProfile& s, const std::string& hash) {
  json j{{"config_hash", hash},
         {"params", {{"N", s.params.N}, {"p", s.params.p}}},
         {"Theta_star", s.Theta_star},
         {"Theta_star_complement", s.Theta_star_complement},
         {"R_star", s.R_star},
         {"refinement_estimate", s.refinement_estimate},
         {"theta_start", s.theta_start},
         {"raw_zeros", s.raw_zeros}};
  j["observed_order"] = s.observed_order > 0.0 ? json(s.observed_order) : json(nullptr);
  return j;
}

std::string orbit_csv(const PhaseOrbit& orbit, const std::string& hash) {
  std::string s = fmt::format("# kind={} config_hash={}\nt,y,z,J,E\n",
                              orbit.cap ? "cap_orbit" : "flat_orbit", hash);
  for (std::size_t i = 0; i < orbit.t.size(); ++i) {
    s += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},", orbit.t[i], orbit.y[i], orbit.z[i],
                     orbit.J_trace[i]);
    s += orbit.E_trace ? format_real((*orbit.E_trace)[i]) + "\n" : "\n";
  }
  return s;
}

json equilibrium_json(const EquilibriumReport& r, const std::string& hash) {
  auto c = [](std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
  return {{"config_hash", hash},
          {"location", {r.y, r.z}},
          {"eigenvalues", {c(r.lambda_plus), c(r.lambda_minus)}},
          {"discriminant", r.discriminant},
          {"spiral", r.spiral}};
}

json eigen_json(const EigenResult& e, const std::string& hash) {
  return {{"config_hash", hash},
          {"N", e.N},
          {"Theta", e.Theta},
          {"lambda1", e.lambda1},
          {"bracket", {e.bracket.first, e.bracket.second}},
          {"first_zero", e.phi_profile.first_zero ? json(*e.phi_profile.first_zero) : json(nullptr)}};
}

std::string region_csv(const std::vector<RegionCell>& cells, const std::string& hash) {
  std::string s = fmt::format("# kind=nonexistence_region config_hash={}\nTheta,p,F_sup,certified\n",
                              hash);
  for (const RegionCell& c : cells)
    s += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", c.Theta, c.p, c.F_sup, c.certified ? 1 : 0);
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace efcap
