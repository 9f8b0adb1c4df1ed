#include "stochlog/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stochlog/errors.hpp"
#include "stochlog/mc_kernels.hpp"

namespace stochlog {

namespace {

std::string context(std::size_t k, double x, double y) {
  std::ostringstream os;
  os.precision(17);
  os << " (transition " << k << ", x=" << x << ", y=" << y << ")";
  return os.str();
}

McSettings mc_settings(double delta_obs, const LikelihoodSettings& s, std::uint64_t stream) {
  return {delta_obs, s.delta, s.n_paths, s.seed, stream};
}

double mc_term(const Params& theta, double x, double y, double delta_obs, const LikelihoodSettings& s,
               std::uint64_t stream) {
  const McSettings mc = mc_settings(delta_obs, s, stream);
  switch (s.backend) {
    case Backend::pedersen:
      return pedersen_density(theta, x, y, mc, s.exec).value;
    case Backend::bridge_plain:
      return bridge_density(theta, x, y, mc, BridgeVariant::plain, s.exec).value;
    case Backend::bridge_modified:
      return bridge_density(theta, x, y, mc, BridgeVariant::modified, s.exec).value;
    case Backend::nonparametric:
      return nonparam_density(theta, x, y, mc, std::nullopt, s.exec).value;
    case Backend::fd:
      break;
  }
  throw ConfigError("mc_term called with the fd backend");
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::fd: return "fd";
    case Backend::pedersen: return "pedersen";
    case Backend::bridge_plain: return "bridge-plain";
    case Backend::bridge_modified: return "bridge-modified";
    case Backend::nonparametric: return "nonparametric";
  }
  return "?";
}

Backend parse_backend(std::string_view name) {
  for (Backend b : {Backend::fd, Backend::pedersen, Backend::bridge_plain, Backend::bridge_modified,
                    Backend::nonparametric}) {
    if (name == to_string(b)) return b;
  }
  throw ConfigError("unknown backend '" + std::string(name) + "'");
}

void LikelihoodSettings::validate(double delta_obs) const {
  if (!(floor > 0.0)) throw ConfigError("likelihood floor must be > 0");
  if (!(delta > 0.0)) throw ConfigError("likelihood delta must be > 0");
  step_count(delta_obs, delta);
  if (backend == Backend::fd) {
    if (!(h > 0.0)) throw ConfigError("grid step h must be > 0");
    if (x_upper && !(*x_upper > 0.0)) throw ConfigError("grid upper bound must be > 0");
  } else if (n_paths == 0) {
    throw ConfigError("Monte Carlo backends need n_paths >= 1");
  }
}

Grid likelihood_grid(const Params& p, double max_obs, const LikelihoodSettings& s) {
  const double needed = std::max(4.0 * p.carrying_capacity(), 2.0 * max_obs);
  const double upper = std::max(s.x_upper.value_or(0.0), needed);
  return Grid::covering(p, max_obs, s.h, upper);
}

double transition_term(const Params& theta, double x, double y, double delta_obs, const LikelihoodSettings& s,
                       std::uint64_t stream) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw ConfigError("transition_term: states must be >= 0");
  s.validate(delta_obs);
  if (x == 0.0) return y == 0.0 ? 1.0 : 0.0;
  if (s.backend == Backend::fd) {
    const Grid g = likelihood_grid(theta, std::max(x, y), s);
    const KernelQuery q{x, y};
    return kernel_values(theta, {&q, 1}, delta_obs, g, s.delta, s.exec).front();
  }
  return mc_term(theta, x, y, delta_obs, s, stream);
}

NllResult neg_log_likelihood(const Params& theta, const ObservationSeries& obs, const LikelihoodSettings& s) {
  if (obs.values.size() < 2) throw ConfigError("neg_log_likelihood: need at least one transition");
  s.validate(obs.delta_obs);
  const std::size_t m = obs.transitions();
  std::vector<double> density(m, 0.0);

  if (s.backend == Backend::fd) {
    std::vector<KernelQuery> queries(m);
    for (std::size_t k = 0; k < m; ++k) queries[k] = {obs.values[k], obs.values[k + 1]};
    const double max_obs = *std::max_element(obs.values.begin(), obs.values.end());
    const Grid g = likelihood_grid(theta, max_obs, s);
    density = kernel_values(theta, queries, obs.delta_obs, g, s.delta, s.exec);
  } else {
    for (std::size_t k = 0; k < m; ++k) {
      const double x = obs.values[k];
      const double y = obs.values[k + 1];
      if (x == 0.0) {
        density[k] = y == 0.0 ? 1.0 : 0.0;
        continue;
      }
      try {
        density[k] = mc_term(theta, x, y, obs.delta_obs, s, k);
      } catch (const NumericalError& e) {
        throw NumericalError(e.what() + context(k, x, y), e.diagnostic());
      } catch (const ConfigError& e) {
        throw ConfigError(e.what() + context(k, x, y));
      }
    }
  }

  NllResult out;
  out.terms.resize(m);
  std::vector<double> neg_logs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double q = density[k];
    if (std::isnan(q)) {
      throw NumericalError("NaN transition density" + context(k, obs.values[k], obs.values[k + 1]));
    }
    const bool floored = q < s.floor;
    neg_logs[k] = -std::log(floored ? s.floor : q);
    out.terms[k] = {q, neg_logs[k], floored};
    if (floored) ++out.n_floored;
  }
  // Index-order sum: appending absorbed transitions (exact zeros) leaves the value bit-identical.
  out.value = std::accumulate(neg_logs.begin(), neg_logs.end(), 0.0);
  return out;
}

}  // namespace stochlog
