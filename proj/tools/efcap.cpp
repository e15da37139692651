// Command-line front end. Every subcommand reads a RunConfig assembled from
// defaults, an optional JSON file and flags (flags win), and stamps its files
// with the config hash.
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"
#include "efcap/io.hpp"
#include "efcap/model.hpp"
#include "efcap/phase.hpp"
#include "efcap/singular.hpp"
#include "efcap/spectral.hpp"
#include "efcap/verify.hpp"

namespace {

using efcap::RunConfig;
using nlohmann::json;

enum ExitCode { kOk = 0, kIoError = 1, kInvalid = 2, kNumerical = 3, kAcceptance = 4 };

struct Flags {
  std::string config;
  int N = 0;
  double p = 0, gamma = 0, gamma_min = 0, gamma_max = 0, theta = 0, theta_star = 0;
  double rel_tol = 0, abs_tol = 0, t_end = 0;
  int points = 0;
  unsigned threads = 0;
  std::string out, suite;
  std::vector<double> lambda_list, p_list, theta_list;
  bool cap = false;
  bool bessel = false;
};

// Options registered on the top-level app; subcommands fall through to them.
struct Registered {
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T, class Field>
  void add(CLI::App& app, const std::string& name, T& store, Field apply, const std::string& help) {
    CLI::Option* o = app.add_option(name, store, help);
    setters.emplace_back(o, [&store, apply](RunConfig& c) { apply(c, store); });
  }
};

RunConfig assemble(const Flags& f, const Registered& reg) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = efcap::load_config(f.config, cfg);
  for (const auto& [opt, set] : reg.setters)
    if (opt->count() > 0) set(cfg);
  cfg.params.validate();
  cfg.integrator.validate();
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

std::string g6(double x) { return fmt::format("{:.6g}", x); }

int cmd_exponents(const RunConfig& cfg) {
  json j{{"params", {{"N", cfg.params.N}, {"p", cfg.params.p}}},
         {"exponents", efcap::to_json(efcap::compute_exponents(cfg.params))},
         {"regime", efcap::to_json(efcap::classify(cfg.params))}};
  fmt::print("{}\n", j.dump(2));
  return kOk;
}

int cmd_shoot(const RunConfig& cfg) {
  const std::string hash = efcap::config_hash(cfg);
  const auto prof = efcap::integrate_sphere_regular(cfg.params, cfg.gamma, cfg.integrator);
  efcap::write_file(out_path(cfg, "shoot.csv"), efcap::profile_csv(prof, hash));
  if (!prof.first_zero) throw efcap::NumericalFailure("no zero before the south pole");
  const double Theta = *prof.first_zero;
  fmt::print("Gamma {}  Theta {}  R {}  U'(Theta) {}\nconfig_hash {}\n", g6(cfg.gamma), g6(Theta),
             g6(efcap::stereographic_r(Theta, *prof.first_zero_complement)), g6(prof.end_derivative),
             hash);
  return kOk;
}

int cmd_branch(RunConfig cfg) {
  const std::string hash = efcap::config_hash(cfg);
  efcap::BranchOptions opts;
  opts.threads = cfg.threads;
  efcap::Branch br =
      efcap::trace_branch(cfg.params, cfg.gamma_min, cfg.gamma_max, cfg.points, cfg.integrator, opts);
  if (cfg.theta_star) br.oscillation_count = efcap::oscillation_count(br, *cfg.theta_star);

  efcap::write_file(out_path(cfg, "branch.csv"), efcap::branch_csv(br, hash));
  efcap::write_file(out_path(cfg, "branch.json"), efcap::branch_json(br, cfg, hash).dump(2) + "\n");

  fmt::print("points {}  theta_min {} at Gamma {}\nturning points {}\n", br.points.size(),
             g6(br.theta_min), g6(br.theta_min_Gamma), br.turning_points.size());
  for (const auto& t : br.turning_points)
    fmt::print("  Gamma in [{}, {}]\n", g6(t.Gamma_low), g6(t.Gamma_high));
  if (cfg.theta_star)
    fmt::print("oscillations about {}: {}\n", g6(*cfg.theta_star), br.oscillation_count);
  fmt::print("config_hash {}\n", hash);

  if (!br.failures.empty()) {
    for (const auto& f : br.failures)
      fmt::print(stderr, "shoot failed at Gamma {}: {}\n", g6(f.Gamma), f.message);
    return kNumerical;
  }
  return kOk;
}

int cmd_singular(const RunConfig& cfg) {
  const std::string hash = efcap::config_hash(cfg);
  const auto s = efcap::compute_theta_star(cfg.params, cfg.integrator);
  efcap::write_file(out_path(cfg, "singular.csv"), efcap::singular_csv(s, hash));
  efcap::write_file(out_path(cfg, "singular.json"), efcap::singular_json(s, hash).dump(2) + "\n");
  fmt::print("Theta* {}\nR* {}\nrefinement estimate {}\nconfig_hash {}\n", g6(s.Theta_star),
             g6(s.R_star), g6(s.refinement_estimate), hash);
  return kOk;
}

int cmd_phase(const RunConfig& cfg, bool cap) {
  const std::string hash = efcap::config_hash(cfg);
  const auto exp = efcap::compute_exponents(cfg.params);
  const auto eq = efcap::equilibrium_report(exp, cfg.params.p);
  const double t0 = cap ? efcap::cap_orbit_start_time(cfg.params, cfg.gamma)
                        : efcap::flat_orbit_start_time(cfg.params, cfg.gamma);
  if (t0 >= cfg.t_end) throw efcap::InvalidArgument("t_end must exceed the orbit start time");
  const auto orbit = cap ? efcap::cap_orbit(cfg.params, cfg.gamma, {t0, cfg.t_end}, cfg.integrator)
                         : efcap::flat_orbit(cfg.params, cfg.gamma, {t0, cfg.t_end}, cfg.integrator);
  efcap::write_file(out_path(cfg, cap ? "cap_orbit.csv" : "flat_orbit.csv"),
                    efcap::orbit_csv(orbit, hash));
  efcap::write_file(out_path(cfg, "equilibrium.json"), efcap::equilibrium_json(eq, hash).dump(2) + "\n");

  double rise = 0.0;
  for (std::size_t i = 1; i < orbit.J_trace.size(); ++i)
    rise = std::max(rise, orbit.J_trace[i] - orbit.J_trace[i - 1]);
  fmt::print("equilibrium (1, 0): {} (discriminant {})\n", eq.spiral ? "spiral" : "node",
             g6(eq.discriminant));
  fmt::print("t in [{}, {}]  samples {}\n", g6(orbit.t.front()), g6(orbit.t.back()), orbit.t.size());
  fmt::print("end (y, z) = ({}, {})  max J increase {}\n", g6(orbit.y.back()), g6(orbit.z.back()),
             g6(rise));
  if (cap) {
    if (orbit.zero_time) fmt::print("y vanishes at t = {}\n", g6(*orbit.zero_time));
    const auto tr = efcap::trapping_monitor(orbit, cfg.params, efcap::trapping_epsilon(cfg.params.p));
    if (tr.entered)
      fmt::print("trapped region entered at t = {}, stayed until {}: {}\n", g6(tr.t_enter),
                 g6(tr.t_horizon), tr.stayed ? "yes" : "no");
    else
      fmt::print("trapped region not entered\n");
  }
  fmt::print("config_hash {}\n", hash);
  return kOk;
}

int cmd_eigen(const RunConfig& cfg, bool bessel) {
  const std::string hash = efcap::config_hash(cfg);
  const int N = cfg.params.N;
  if (bessel) {
    fmt::print("Bessel zero j {}\n{:>12} {:>12} {:>12}\n", g6(efcap::bessel_zero(N)), "lambda", "r1",
               "sqrt(l) r1");
    for (const auto& b : efcap::bessel_limit_check(N, cfg.lambda_list, cfg.integrator))
      fmt::print("{:>12} {:>12} {:>12}\n", g6(b.lambda), g6(b.r1), g6(b.product));
    return kOk;
  }
  if (!cfg.theta) throw efcap::InvalidArgument("eigen needs --theta");
  const auto e = efcap::lambda1(N, *cfg.theta, cfg.integrator);
  efcap::write_file(out_path(cfg, "eigen.json"), efcap::eigen_json(e, hash).dump(2) + "\n");
  efcap::write_file(out_path(cfg, "eigenfunction.csv"), efcap::profile_csv(e.phi_profile, hash));
  fmt::print("lambda1 {}\n", g6(e.lambda1));
  if (N == 3) fmt::print("(pi/Theta)^2 - 1 = {}\n", g6(std::pow(std::numbers::pi / *cfg.theta, 2) - 1));
  fmt::print("config_hash {}\n", hash);
  return kOk;
}

// Largest cap radius certified by the Pohozaev bound, or nullopt if none.
// The certified set is an initial interval of (0, pi).
std::optional<double> certified_radius(int N, double p) {
  double lo = 1e-3, hi = std::numbers::pi - 1e-9;
  if (!efcap::nonexistence_certificate(N, p, lo)) return std::nullopt;
  if (efcap::nonexistence_certificate(N, p, hi)) return hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (efcap::nonexistence_certificate(N, p, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int cmd_bounds(const RunConfig& cfg) {
  const std::string hash = efcap::config_hash(cfg);
  const int N = cfg.params.N;
  const double p = cfg.params.p;
  json j{{"N", N}, {"p", p}, {"config_hash", hash}};
  const auto rc = certified_radius(N, p);
  j["certified_radius"] = rc ? json(*rc) : json(nullptr);
  if (N == 3 && p > 5) j["closed_form"] = std::numbers::pi - std::asin(4.0 / (p - 1.0));
  if (cfg.theta) {
    const auto s = efcap::pohozaev_F_sup(N, *cfg.theta);
    j["Theta"] = *cfg.theta;
    j["F_sup"] = s.value;
    j["certified"] = efcap::nonexistence_certificate(N, p, *cfg.theta);
  }
  std::vector<double> thetas = cfg.theta_list;
  if (thetas.empty())
    for (int i = 1; i <= 64; ++i) thetas.push_back(std::numbers::pi * i / 65.0);
  efcap::write_file(out_path(cfg, "region.csv"),
                    efcap::region_csv(efcap::nonexistence_region(N, thetas, {p}), hash));
  fmt::print("{}\n", j.dump(2));
  return kOk;
}

int cmd_limit_p1(const RunConfig& cfg) {
  const std::string hash = efcap::config_hash(cfg);
  const int N = cfg.params.N;
  const double td = efcap::theta_dagger(N, cfg.integrator);
  const double gd = efcap::gamma_dagger(N, cfg.integrator);
  const double Theta = cfg.theta.value_or(td);
  const auto trend = efcap::gamma_p_trend(N, Theta, cfg.p_list, cfg.integrator);
  std::string csv = fmt::format("# kind=limit_p1 N={} Theta={} config_hash={}\np,Gamma\n", N,
                                efcap::format_real(Theta), hash);
  for (const auto& [p, G] : trend) csv += fmt::format("{:.17g},{:.17g}\n", p, G);
  efcap::write_file(out_path(cfg, "limit_p1.csv"), csv);

  fmt::print("Theta_dagger {}\nGamma_dagger {}\nTheta {}\n{:>10} {:>12} {:>12}\n", g6(td), g6(gd),
             g6(Theta), "p", "Gamma", "Gamma/Gd-1");
  for (const auto& [p, G] : trend) fmt::print("{:>10} {:>12} {:>12}\n", g6(p), g6(G), g6(G / gd - 1));
  fmt::print("config_hash {}\n", hash);
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  const auto results = efcap::run_suite(cfg.suite, cfg.integrator);
  int passed = 0;
  for (const auto& r : results) {
    fmt::print("{}\n", efcap::format_result(r));
    passed += r.pass ? 1 : 0;
  }
  fmt::print("{} of {} criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive solutions of the Lane-Emden equation on spherical caps"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  Registered reg;
  app.add_option("--config", f.config, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  reg.add(app, "--N", f.N, [](RunConfig& c, int v) { c.params.N = v; }, "dimension N >= 3");
  reg.add(app, "--p", f.p, [](RunConfig& c, double v) { c.params.p = v; }, "exponent p > 1");
  reg.add(app, "--gamma", f.gamma, [](RunConfig& c, double v) { c.gamma = v; },
          "centre value (shoot, phase)");
  reg.add(app, "--gamma-min", f.gamma_min, [](RunConfig& c, double v) { c.gamma_min = v; },
          "branch start");
  reg.add(app, "--gamma-max", f.gamma_max, [](RunConfig& c, double v) { c.gamma_max = v; },
          "branch end");
  reg.add(app, "--points", f.points, [](RunConfig& c, int v) { c.points = v; }, "branch grid size");
  reg.add(app, "--theta", f.theta, [](RunConfig& c, double v) { c.theta = v; }, "cap radius");
  reg.add(app, "--theta-star", f.theta_star, [](RunConfig& c, double v) { c.theta_star = v; },
          "count branch oscillations about this value");
  reg.add(app, "--rel-tol", f.rel_tol, [](RunConfig& c, double v) { c.integrator.rel_tol = v; },
          "integrator relative tolerance");
  reg.add(app, "--abs-tol", f.abs_tol, [](RunConfig& c, double v) { c.integrator.abs_tol = v; },
          "integrator absolute tolerance");
  reg.add(app, "--t-end", f.t_end, [](RunConfig& c, double v) { c.t_end = v; },
          "end of the phase-plane orbit");
  reg.add(app, "--lambda-list", f.lambda_list,
          [](RunConfig& c, const std::vector<double>& v) { c.lambda_list = v; },
          "lambda values for eigen --bessel");
  reg.add(app, "--p-list", f.p_list, [](RunConfig& c, const std::vector<double>& v) { c.p_list = v; },
          "exponents for limit-p1");
  reg.add(app, "--theta-list", f.theta_list,
          [](RunConfig& c, const std::vector<double>& v) { c.theta_list = v; },
          "cap radii for the bounds region scan");
  reg.add(app, "--suite", f.suite, [](RunConfig& c, const std::string& v) { c.suite = v; },
          "acceptance suite for verify");
  reg.add(app, "--out", f.out, [](RunConfig& c, const std::string& v) { c.out = v; },
          "output directory");
  reg.add(app, "--threads", f.threads, [](RunConfig& c, unsigned v) { c.threads = v; },
          "worker threads for branch sweeps (0: all cores)");

  auto* exponents = app.add_subcommand("exponents", "print exponents and regime as JSON");
  auto* shoot = app.add_subcommand("shoot", "regular solution with U(0) = gamma");
  auto* branch = app.add_subcommand("branch", "trace Theta(Gamma) over [gamma-min, gamma-max]");
  auto* singular = app.add_subcommand("singular", "singular solution, Theta* and R*");
  auto* phase = app.add_subcommand("phase", "Emden phase-plane orbit");
  phase->add_flag("--cap", f.cap, "cap orbit of the regular solution instead of the flat one");
  auto* eigen = app.add_subcommand("eigen", "first Dirichlet eigenvalue of the cap");
  eigen->add_flag("--bessel", f.bessel, "small-cap Bessel limit over the lambda list");
  auto* bounds = app.add_subcommand("bounds", "Pohozaev nonexistence radius");
  auto* limit = app.add_subcommand("limit-p1", "Gamma as p decreases to 1");
  auto* verify = app.add_subcommand("verify", "run an acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    const RunConfig cfg = assemble(f, reg);
    if (*exponents) return cmd_exponents(cfg);
    if (*shoot) return cmd_shoot(cfg);
    if (*branch) return cmd_branch(cfg);
    if (*singular) return cmd_singular(cfg);
    if (*phase) return cmd_phase(cfg, f.cap);
    if (*eigen) return cmd_eigen(cfg, f.bessel);
    if (*bounds) return cmd_bounds(cfg);
    if (*limit) return cmd_limit_p1(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const efcap::InvalidArgument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kInvalid;
  } catch (const efcap::OutOfRange& e) {
    fmt::print(stderr, "out of range: {}\n", e.what());
    return kInvalid;
  } catch (const efcap::NumericalFailure& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIoError;
  }
  return kOk;
}
