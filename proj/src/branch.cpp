#include "efcap/branch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "efcap/error.hpp"

namespace efcap {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_gamma(double Gamma) {
  if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw InvalidArgument("Gamma must be positive");
}

struct Evaluation {
  std::optional<BranchPoint> point;
  std::string error;
};

// Evaluates theta_of_gamma at every Gamma on a pool of threads. Results are
// stored by index so the outcome does not depend on scheduling.
std::vector<Evaluation> evaluate_all(const Params& params, const std::vector<double>& gammas,
                                     const IntegratorConfig& cfg, unsigned threads) {
  std::vector<Evaluation> out(gammas.size());
  if (gammas.empty()) return out;
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, gammas.size()));
  auto work = [&](std::size_t start) {
    for (std::size_t i = start; i < gammas.size(); i += n) {
      try {
        out[i].point = theta_of_gamma(params, gammas[i], cfg);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (n == 1) {
    work(0);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
  return out;
}

// Points keyed by ln Gamma; map ordering keeps the branch sorted.
using PointMap = std::map<double, BranchPoint>;

void absorb(PointMap& pts, std::vector<BranchFailure>& failures, const std::vector<double>& gammas,
            const std::vector<Evaluation>& evals) {
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (evals[i].point)
      pts.emplace(std::log(gammas[i]), *evals[i].point);
    else
      failures.push_back({gammas[i], evals[i].error});
  }
}

bool opposite(int a, int b) { return a * b < 0; }

// Two consecutive points with equal slope sign but a Theta change of the
// opposite sign hide an even number of turning points between them.
bool hides_turning_pair(const BranchPoint& a, const BranchPoint& b) {
  if (a.slope_sign == 0 || a.slope_sign != b.slope_sign) return false;
  const double d = b.Theta - a.Theta;
  const double noise = 10.0 * (a.theta_error + b.theta_error);
  return d * a.slope_sign < 0.0 && std::abs(d) > noise;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    g[static_cast<std::size_t>(i)] = i == n - 1 ? hi : (i == 0 ? lo : std::exp(a + t * (b - a)));
  }
  return g;
}

}  // namespace

BranchPoint theta_of_gamma(const Params& params, double Gamma, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  check_gamma(Gamma);
  const SphereProblem prob{params.N, params.p, 1.0};
  const SphereVariation sv = shoot_sphere_variational(prob, Gamma, cfg);
  const double k = (params.N - 2.0) / 2.0;

  BranchPoint bp;
  bp.Gamma = Gamma;
  bp.gamma = std::pow(2.0, k) * Gamma;
  bp.Theta = *sv.U.first_zero;
  bp.Theta_complement = *sv.U.first_zero_complement;
  bp.R = stereographic_r(bp.Theta, bp.Theta_complement);
  const double A = 2.0 * std::pow(std::sin(bp.Theta_complement / 2.0), 2.0);
  bp.w_end = std::pow(A / 2.0, k) * sv.W_at_zero;
  // u_r < 0 at a simple zero, so dR/dgamma = -w/u_r has the sign of w.
  bp.slope_sign = (bp.w_end > 0.0) - (bp.w_end < 0.0);
  bp.theta_error = sv.U.error_estimate;
  if (cfg.estimate_error) {
    const RadialProfile fine = shoot_sphere_regular(prob, Gamma, cfg.tightened(16.0));
    const bool south = bp.Theta > kPi / 2;
    const double d = south ? bp.Theta_complement - *fine.first_zero_complement
                           : bp.Theta - *fine.first_zero;
    bp.theta_error = 2.0 * std::abs(d) + 4.0 * std::numeric_limits<double>::epsilon() * bp.Theta;
  }
  return bp;
}

Branch trace_branch(const Params& params, double Gamma_min, double Gamma_max, int n_points,
                    const IntegratorConfig& cfg, const BranchOptions& opts) {
  params.validate();
  cfg.validate();
  check_gamma(Gamma_min);
  check_gamma(Gamma_max);
  if (!(Gamma_max > Gamma_min)) throw InvalidArgument("Gamma_max must exceed Gamma_min");
  if (n_points < 2) throw InvalidArgument("a branch needs at least two points");
  if (!(opts.bracket_width > 0.0) || opts.dense_per_decade < 1)
    throw InvalidArgument("invalid branch refinement options");

  Branch br;
  br.params = params;
  PointMap pts;

  const std::vector<double> grid = log_grid(Gamma_min, Gamma_max, n_points);
  absorb(pts, br.failures, grid, evaluate_all(params, grid, cfg, opts.threads));
  if (pts.size() < 2) throw NumericalFailure("branch evaluation failed at almost every point");

  // Hidden turning pairs: bisect suspicious intervals until the slope signs
  // reveal the turning points or the depth budget runs out.
  for (int depth = 0; depth < opts.max_hidden_refinements; ++depth) {
    std::vector<double> mids;
    for (auto it = pts.begin(), nx = std::next(it); nx != pts.end(); ++it, ++nx)
      if (hides_turning_pair(it->second, nx->second))
        mids.push_back(std::exp(0.5 * (it->first + nx->first)));
    if (mids.empty()) break;
    absorb(pts, br.failures, mids, evaluate_all(params, mids, cfg, opts.threads));
  }

  // Densify around every slope sign change.
  const double dense_step = std::log(10.0) / opts.dense_per_decade;
  {
    std::vector<double> extra;
    for (auto it = pts.begin(), nx = std::next(it); nx != pts.end(); ++it, ++nx) {
      if (!opposite(it->second.slope_sign, nx->second.slope_sign)) continue;
      const double w = nx->first - it->first;
      const int n = static_cast<int>(std::ceil(w / dense_step));
      for (int j = 1; j < n; ++j) extra.push_back(std::exp(it->first + w * j / n));
    }
    absorb(pts, br.failures, extra, evaluate_all(params, extra, cfg, opts.threads));
  }

  // Bisect each remaining sign change in ln Gamma.
  std::vector<std::pair<double, double>> brackets;
  for (auto it = pts.begin(), nx = std::next(it); nx != pts.end(); ++it, ++nx)
    if (opposite(it->second.slope_sign, nx->second.slope_sign))
      brackets.emplace_back(it->first, nx->first);
  for (auto& [lo, hi] : brackets) {
    int s_lo = pts.at(lo).slope_sign;
    while (hi - lo > opts.bracket_width) {
      const double mid = 0.5 * (lo + hi);
      BranchPoint bp;
      try {
        bp = theta_of_gamma(params, std::exp(mid), cfg);
      } catch (const std::exception& e) {
        br.failures.push_back({std::exp(mid), e.what()});
        break;
      }
      pts.emplace(mid, bp);
      if (bp.slope_sign == 0) break;
      if (opposite(bp.slope_sign, s_lo)) {
        hi = mid;
      } else {
        lo = mid;
        s_lo = bp.slope_sign;
      }
    }
    br.turning_points.push_back({std::exp(lo), std::exp(hi)});
  }

  br.points.reserve(pts.size());
  for (const auto& [lg, bp] : pts) br.points.push_back(bp);

  const auto mn = std::min_element(br.points.begin(), br.points.end(),
                                   [](const auto& a, const auto& b) { return a.Theta < b.Theta; });
  br.theta_min = mn->Theta;
  br.theta_min_Gamma = mn->Gamma;

  br.single_valued_above = br.theta_min;
  for (const auto& tp : br.turning_points) {
    for (const auto& bp : br.points)
      if (bp.Gamma >= tp.Gamma_low && bp.Gamma <= tp.Gamma_high)
        br.single_valued_above = std::max(br.single_valued_above, bp.Theta);
  }
  return br;
}

int oscillation_count(const std::vector<double>& thetas, double theta_star, double dead_band) {
  int count = 0;
  int last = 0;
  for (double t : thetas) {
    const double d = t - theta_star;
    if (std::abs(d) <= dead_band) continue;
    const int s = d > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

int oscillation_count(const Branch& branch, double theta_star, double dead_band) {
  std::vector<double> t;
  t.reserve(branch.points.size());
  for (const auto& bp : branch.points) t.push_back(bp.Theta);
  return oscillation_count(t, theta_star, dead_band);
}

double gamma_of_theta(const SphereProblem& prob, double Theta_target, const IntegratorConfig& cfg) {
  cfg.validate();
  if (prob.N < 3) throw InvalidArgument("N must be at least 3");
  const double pS = (prob.N + 2.0) / (prob.N - 2.0);
  if (!(prob.p > 1.0) || prob.p > pS * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
    throw InvalidArgument("the inverse map is defined for 1 < p <= p_S");
  if (!(prob.coefficient > 0.0)) throw InvalidArgument("coefficient must be positive");
  if (!(Theta_target > 0.0) || !(Theta_target < kPi))
    throw InvalidArgument("Theta must lie in (0, pi)");

  // For N = 3 the critical branch stays above the equator and only tends to
  // it; the bisection would otherwise converge to rounding noise at huge Gamma.
  if (prob.N == 3 && prob.p > pS * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()) &&
      Theta_target <= kPi / 2)
    throw OutOfRange("the critical branch for N = 3 lies in (pi/2, pi)");

  // Theta decreases in Gamma, so pi - Theta increases. Work with the
  // complement to keep targets near the pole well conditioned.
  const double target_comp = kPi - Theta_target;
  auto comp_at = [&](double lnG) {
    const RadialProfile prof = shoot_sphere_regular(prob, std::exp(lnG), cfg);
    return *prof.first_zero_complement;
  };
  auto f = [&](double lnG) { return comp_at(lnG) - target_comp; };

  // Keep c Gamma^(p-1) representable: beyond it the start offset underflows.
  const double lnG_cap = (std::log(1e200) - std::log(prob.coefficient)) / (prob.p - 1.0);
  const double lnG_floor = std::log(1e-300);
  const double step = std::log(10.0);

  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
  double x = 0.0;
  double fx = f(x);
  if (fx < 0.0) {
    lo = x;
    f_lo = fx;
    for (;;) {
      x += step;
      if (x > lnG_cap) throw OutOfRange("Theta is not attained on the branch");
      fx = f(x);
      if (fx >= 0.0) break;
      lo = x;
      f_lo = fx;
    }
    hi = x;
    f_hi = fx;
  } else {
    hi = x;
    f_hi = fx;
    for (;;) {
      x -= step;
      if (x < lnG_floor) throw OutOfRange("Theta is not attained on the branch");
      fx = f(x);
      if (fx < 0.0) break;
      hi = x;
      f_hi = fx;
    }
    lo = x;
    f_lo = fx;
  }
  if (f_hi == 0.0) return std::exp(hi);

  std::uintmax_t it = 200;
  auto done = [](double a, double b) { return std::abs(b - a) < 2e-11; };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, done, it);
  return std::exp(0.5 * (r.first + r.second));
}

double gamma_of_theta(const Params& params, double Theta_target, const IntegratorConfig& cfg) {
  params.validate();
  return gamma_of_theta(SphereProblem{params.N, params.p, 1.0}, Theta_target, cfg);
}

ThetaMinEstimate underline_theta_estimate(const Branch& branch) {
  if (branch.points.empty()) throw InvalidArgument("empty branch");
  const auto& pts = branch.points;
  std::size_t i = 0;
  for (std::size_t j = 1; j < pts.size(); ++j)
    if (pts[j].Theta < pts[i].Theta) i = j;
  ThetaMinEstimate e;
  e.theta_min = pts[i].Theta;
  e.Gamma = pts[i].Gamma;
  e.Gamma_low = pts[i == 0 ? 0 : i - 1].Gamma;
  e.Gamma_high = pts[std::min(i + 1, pts.size() - 1)].Gamma;
  return e;
}

SlopeEstimate finite_difference_slope(const Params& params, double Gamma, double rel_step,
                                      const IntegratorConfig& cfg) {
  check_gamma(Gamma);
  if (!(rel_step > 0.0) || !(rel_step < 0.5)) throw InvalidArgument("rel_step must lie in (0, 0.5)");
  IntegratorConfig c = cfg;
  c.estimate_error = true;
  auto theta = [&](double G) { return theta_of_gamma(params, G, c); };
  const double h = rel_step * Gamma;
  const BranchPoint p1 = theta(Gamma + h), m1 = theta(Gamma - h);
  const BranchPoint p2 = theta(Gamma + 2 * h), m2 = theta(Gamma - 2 * h);
  const double d1 = (p1.Theta - m1.Theta) / (2 * h);
  const double d2 = (p2.Theta - m2.Theta) / (4 * h);
  SlopeEstimate s;
  s.slope = d1;
  // Truncation is O(h^2): d1 - d2 estimates three times the error of d1.
  s.error = std::abs(d1 - d2) / 3.0 + (p1.theta_error + m1.theta_error) / (2 * h);
  return s;
}

}  // namespace efcap
