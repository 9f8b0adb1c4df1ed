#include "stochlog/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stochlog/errors.hpp"
#include "stochlog/rng.hpp"

namespace stochlog {

std::size_t Trajectory::extinction_index() const {
  auto it = std::find(states.begin(), states.end(), 0.0);
  return static_cast<std::size_t>(it - states.begin());
}

ObservationSeries::ObservationSeries(double delta_obs_, std::vector<double> values_)
    : delta_obs(delta_obs_), values(std::move(values_)) {
  if (!(delta_obs > 0.0)) throw ConfigError("observation spacing must be > 0");
  if (values.size() < 2) throw ConfigError("an observation series needs M >= 1");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("observations must be finite and >= 0");
  }
}

std::size_t step_count(double horizon, double delta) {
  if (!(delta > 0.0) || !(horizon >= 0.0)) throw ConfigError("need delta > 0 and horizon >= 0");
  const double ratio = horizon / delta;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("horizon " + std::to_string(horizon) + " is not a multiple of step " +
                      std::to_string(delta));
  }
  return static_cast<std::size_t>(n);
}

namespace {

void check_start(double x0) {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ConfigError("initial state must be finite and >= 0");
}

template <class Sink>
void run_em_path(const Params& p, double x0, std::size_t n, double delta, std::uint64_t seed,
                 std::uint64_t path_index, Sink&& sink) {
  const LogisticCoefficients c{p};
  double x = x0;
  sink(0, x);
  if (x == 0.0) {
    for (std::size_t k = 1; k <= n; ++k) sink(k, 0.0);
    return;
  }
  Engine eng = make_engine(seed, stream_tag::kEuler, path_index);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 1; k <= n; ++k) {
    if (x != 0.0) x = em_step(c, x, delta, gauss(eng));
    sink(k, x);
  }
}

}  // namespace

Trajectory simulate_em(const Params& p, double x0, double horizon, double delta, std::uint64_t seed,
                       std::uint64_t path_index) {
  check_start(x0);
  const std::size_t n = step_count(horizon, delta);
  Trajectory traj{0.0, delta, std::vector<double>(n + 1)};
  run_em_path(p, x0, n, delta, seed, path_index, [&](std::size_t k, double x) { traj.states[k] = x; });
  return traj;
}

std::vector<Trajectory> simulate_em_ensemble(const Params& p, double x0, double horizon, double delta,
                                             std::size_t n_paths, std::uint64_t seed, Exec exec) {
  check_start(x0);
  step_count(horizon, delta);
  std::vector<Trajectory> out(n_paths);
  const auto count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = simulate_em(p, x0, horizon, delta, seed, static_cast<std::uint64_t>(i));
  }
  return out;
}

std::vector<double> simulate_em_endpoints(const Params& p, double x0, double horizon, double delta,
                                          std::size_t n_paths, std::uint64_t seed, Exec exec) {
  check_start(x0);
  const std::size_t n = step_count(horizon, delta);
  std::vector<double> out(n_paths);
  const auto count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    double last = 0.0;
    run_em_path(p, x0, n, delta, seed, static_cast<std::uint64_t>(i), [&](std::size_t, double x) { last = x; });
    out[static_cast<std::size_t>(i)] = last;
  }
  return out;
}

double extinction_frequency(std::span<const Trajectory> ensemble, double t) {
  if (ensemble.empty()) throw ConfigError("extinction_frequency: empty ensemble");
  std::size_t dead = 0;
  for (const auto& traj : ensemble) {
    if (traj.states.empty()) throw ConfigError("extinction_frequency: empty trajectory");
    if (t < traj.t0 || t > traj.horizon() * (1.0 + 1e-12) + 1e-12) {
      throw ConfigError("extinction_frequency: time outside trajectory horizon");
    }
    const double pos = (t - traj.t0) / traj.dt;
    auto k = static_cast<std::size_t>(std::floor(pos + 1e-9));
    k = std::min(k, traj.states.size() - 1);
    if (traj.states[k] == 0.0) ++dead;
  }
  return static_cast<double>(dead) / static_cast<double>(ensemble.size());
}

Trajectory bd_simulate(const MicroParams& mp, std::int64_t n0, double horizon, double grid_dt,
                       std::uint64_t seed, std::uint64_t path_index) {
  if (n0 < 0) throw ConfigError("bd_simulate: negative initial population");
  const std::size_t n_grid = step_count(horizon, grid_dt);
  Trajectory traj{0.0, grid_dt, std::vector<double>(n_grid + 1, 0.0)};
  Engine eng = make_engine(seed, stream_tag::kBirthDeath, path_index);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::int64_t n = n0;
  double t = 0.0;
  std::size_t k = 0;  // next grid index to fill
  while (k <= n_grid) {
    if (n == 0) break;
    const BdRates r = bd_rates(mp, n);
    const double total = r.birth + r.death;
    t += std::exponential_distribution<double>(total)(eng);
    // Grid points strictly before the jump see the current state.
    while (k <= n_grid && traj.time_at(k) < t) traj.states[k++] = static_cast<double>(n);
    n += (unif(eng) * total < r.birth) ? 1 : -1;
  }
  return traj;  // remaining entries stay 0 after absorption
}

ObservationSeries sample_observations(const Trajectory& traj, double delta_obs) {
  const std::size_t stride = step_count(delta_obs, traj.dt);
  if (stride == 0) throw ConfigError("observation spacing smaller than the simulation step");
  std::vector<double> values;
  for (std::size_t k = 0; k < traj.states.size(); k += stride) values.push_back(traj.states[k]);
  return ObservationSeries(delta_obs, std::move(values));
}

}  // namespace stochlog
