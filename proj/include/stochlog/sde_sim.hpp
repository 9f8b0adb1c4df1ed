#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stochlog/model.hpp"
#include "stochlog/parallel.hpp"

namespace stochlog {

/// States on the uniform grid t0 + k dt. States are non-negative and 0 is
/// absorbing.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> states;

  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double horizon() const { return time_at(states.empty() ? 0 : states.size() - 1); }
  bool extinct() const { return !states.empty() && states.back() == 0.0; }
  /// Index of the first zero state, or states.size() when the path survives.
  std::size_t extinction_index() const;
};

/// xi_0..xi_M observed every delta_obs. Needs M >= 1 and non-negative values.
struct ObservationSeries {
  double delta_obs = 0.0;
  std::vector<double> values;

  ObservationSeries() = default;
  ObservationSeries(double delta_obs, std::vector<double> values);

  std::size_t transitions() const { return values.size() - 1; }
};

/// n such that horizon = n * delta; throws ConfigError when not an integer.
std::size_t step_count(double horizon, double delta);

/// One truncated Euler-Maruyama step max(0, x + delta b(x) + sqrt(delta) sigma(x) w).
template <DiffusionCoefficients C>
double em_step(const C& c, double x, double delta, double w) {
  if (x == 0.0) return 0.0;
  const double proposal = x + delta * c.drift(x) + std::sqrt(delta * c.diffusion_sq(x)) * w;
  return proposal > 0.0 ? proposal : 0.0;
}

inline double em_step(const Params& p, double x, double delta, double w) {
  return em_step(LogisticCoefficients{p}, x, delta, w);
}

/// Truncated Euler-Maruyama path on [0, horizon]. The random stream is keyed
/// by (seed, path_index).
Trajectory simulate_em(const Params& p, double x0, double horizon, double delta, std::uint64_t seed,
                       std::uint64_t path_index = 0);

/// Paths 0..n_paths-1 of simulate_em, in path order.
std::vector<Trajectory> simulate_em_ensemble(const Params& p, double x0, double horizon, double delta,
                                             std::size_t n_paths, std::uint64_t seed,
                                             Exec exec = Exec::parallel);

/// Endpoints only; same random streams as simulate_em_ensemble.
std::vector<double> simulate_em_endpoints(const Params& p, double x0, double horizon, double delta,
                                          std::size_t n_paths, std::uint64_t seed,
                                          Exec exec = Exec::parallel);

/// Fraction of paths at 0 at the largest grid time <= t.
double extinction_frequency(std::span<const Trajectory> ensemble, double t);

/// Exact (Gillespie) simulation of the logistic birth-death chain from n0,
/// recorded as right-continuous counts on the grid k * grid_dt.
Trajectory bd_simulate(const MicroParams& mp, std::int64_t n0, double horizon, double grid_dt,
                       std::uint64_t seed, std::uint64_t path_index = 0);

/// Every (delta_obs / dt)-th state of a trajectory.
ObservationSeries sample_observations(const Trajectory& traj, double delta_obs);

}  // namespace stochlog
