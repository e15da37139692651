// Run configuration, its hash, and the CSV/JSON writers of the command line
// tool. Machine files carry 17 significant digits and the config hash.
#ifndef EFCAP_IO_HPP
#define EFCAP_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "efcap/branch.hpp"
#include "efcap/integrate.hpp"
#include "efcap/model.hpp"
#include "efcap/phase.hpp"
#include "efcap/singular.hpp"
#include "efcap/spectral.hpp"

namespace efcap {

struct RunConfig {
  Params params{3, 7.0};
  IntegratorConfig integrator;
  double gamma = 1.0;
  double gamma_min = 1e-2;
  double gamma_max = 1e4;
  int points = 121;
  std::optional<double> theta;
  std::optional<double> theta_star;
  double t_end = 60.0;
  std::vector<double> lambda_list{1e2, 1e3, 1e4};
  std::vector<double> p_list{1.5, 1.2, 1.1, 1.05};
  std::vector<double> theta_list;
  std::string suite = "all";
  std::string out = ".";
  unsigned threads = 0;
  std::uint64_t seed = 0;  // reserved
};

nlohmann::json to_json(const RunConfig& cfg);
/// Fields absent from `j` keep their values in `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// FNV-1a 64 of the canonical JSON of the config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

/// 17 significant digits.
std::string format_real(double x);

nlohmann::json to_json(const Exponents& e);
nlohmann::json to_json(const Regime& r);
nlohmann::json to_json(const IntegratorConfig& c);

/// Columns x, value, derivative, after a `# ...` metadata line.
std::string profile_csv(const RadialProfile& profile, const std::string& hash);

/// Columns Gamma, gamma, Theta, R, slope_sign, w_end.
std::string branch_csv(const Branch& branch, const std::string& hash);
nlohmann::json branch_json(const Branch& branch, const RunConfig& cfg, const std::string& hash);

/// Columns theta, U*, dU*.
std::string singular_csv(const SingularProfile& s, const std::string& hash);
nlohmann::json singular_json(const SingularProfile& s, const std::string& hash);

/// Columns t, y, z, J, E (E empty for flat orbits).
std::string orbit_csv(const PhaseOrbit& orbit, const std::string& hash);
nlohmann::json equilibrium_json(const EquilibriumReport& r, const std::string& hash);

nlohmann::json eigen_json(const EigenResult& e, const std::string& hash);
/// Columns Theta, p, F_sup, certified.
std::string region_csv(const std::vector<RegionCell>& cells, const std::string& hash);

/// Writes `text` to `path`, creating parent directories. Throws Error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace efcap

#endif  // EFCAP_IO_HPP
