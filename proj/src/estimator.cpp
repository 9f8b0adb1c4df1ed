#include "stochlog/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "stochlog/errors.hpp"

namespace stochlog {

void OptimOptions::validate(std::size_t dim) const {
  if (dim == 0) throw ConfigError("optimizer: no free coordinates");
  if (!initial_scale.empty() && initial_scale.size() != dim) {
    throw ConfigError("optimizer: initial_scale has the wrong length");
  }
  for (double s : initial_scale) {
    if (!(s != 0.0) || !std::isfinite(s)) throw ConfigError("optimizer: initial_scale entries must be nonzero");
  }
  if (!(f_abs_tol > 0.0) || !(f_rel_tol > 0.0) || !(x_tol > 0.0)) {
    throw ConfigError("optimizer: tolerances must be > 0");
  }
  if (max_evals < dim + 1) throw ConfigError("optimizer: max_evals must be >= dimension + 1");
}

namespace {

std::string describe(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

struct Vertex {
  std::vector<double> u;
  double f;
};

}  // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimOptions& opts) {
  const std::size_t n = x0.size();
  opts.validate(n);
  const bool logs = opts.positivity == Positivity::log_space;
  if (logs) {
    for (double& v : x0) {
      if (!(v > 0.0)) throw ConfigError("optimizer: log-space start must be positive, got " + describe(x0));
      v = std::log(v);
    }
  }

  OptimResult res;
  std::vector<double> x(n);
  auto eval = [&](const std::vector<double>& u) {
    for (std::size_t i = 0; i < n; ++i) x[i] = logs ? std::exp(u[i]) : u[i];
    const double v = f(x);
    ++res.n_evals;
    if (std::isnan(v)) throw NumericalError("objective returned NaN at " + describe(x));
    if (opts.keep_trace) res.trace.push_back({x, v});
    return v;
  };

  std::vector<Vertex> s;
  s.reserve(n + 1);
  s.push_back({x0, eval(x0)});
  if (!std::isfinite(s[0].f)) throw NumericalError("objective not finite at the starting point " + describe(x0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> u = x0;
    const double step = opts.initial_scale.empty() ? (logs ? 0.1 : 0.1 * std::max(1.0, std::abs(u[i])))
                                                   : opts.initial_scale[i];
    u[i] += step;
    const double v = eval(u);
    s.push_back({std::move(u), v});
  }

  auto order = [&] {
    std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto converged = [&] {
    const double best = s.front().f;
    const double worst = s.back().f;
    if (!(worst - best <= opts.f_abs_tol + opts.f_rel_tol * std::abs(best))) return false;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(s[v].u[i] - s[0].u[i]) > opts.x_tol) return false;
      }
    }
    return true;
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = c[i] + t * (w[i] - c[i]);
    return u;
  };

  order();
  while (!(res.converged = converged()) && res.n_evals < opts.max_evals) {
    std::vector<double> c(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) c[i] += s[v].u[i];
    }
    for (double& ci : c) ci /= static_cast<double>(n);
    Vertex& worst = s.back();
    const double f_best = s.front().f;
    const double f_second = s[n - 1].f;

    std::vector<double> ur = along(c, worst.u, -1.0);
    const double fr = eval(ur);
    if (fr < f_best) {
      std::vector<double> ue = along(c, worst.u, -2.0);
      const double fe = eval(ue);
      if (fe < fr) worst = {std::move(ue), fe};
      else worst = {std::move(ur), fr};
    } else if (fr < f_second) {
      worst = {std::move(ur), fr};
    } else {
      bool shrink = false;
      if (fr < worst.f) {
        std::vector<double> uc = along(c, worst.u, -0.5);
        const double fc = eval(uc);
        if (fc <= fr) worst = {std::move(uc), fc};
        else shrink = true;
      } else {
        std::vector<double> uc = along(c, worst.u, 0.5);
        const double fc = eval(uc);
        if (fc < worst.f) worst = {std::move(uc), fc};
        else shrink = true;
      }
      if (shrink) {
        for (std::size_t v = 1; v <= n; ++v) {
          s[v].u = along(s[0].u, s[v].u, 0.5);
          s[v].f = eval(s[v].u);
        }
      }
    }
    order();
  }

  res.x = s.front().u;
  if (logs) {
    for (double& v : res.x) v = std::exp(v);
  }
  res.value = s.front().f;
  return res;
}

std::size_t ParamMask::size() const {
  return static_cast<std::size_t>(lambda) + static_cast<std::size_t>(mu) + static_cast<std::size_t>(alpha) +
         static_cast<std::size_t>(rho);
}

std::vector<double> ParamMask::pack(const Params& p) const {
  std::vector<double> out;
  if (lambda) out.push_back(p.lambda);
  if (mu) out.push_back(p.mu);
  if (alpha) out.push_back(p.alpha);
  if (rho) out.push_back(p.rho);
  return out;
}

Params ParamMask::unpack(std::span<const double> free, const Params& base) const {
  if (free.size() != size()) throw ConfigError("parameter mask: wrong number of free values");
  double v[4] = {base.lambda, base.mu, base.alpha, base.rho};
  const bool on[4] = {lambda, mu, alpha, rho};
  std::size_t k = 0;
  for (int i = 0; i < 4; ++i) {
    if (on[i]) v[i] = free[k++];
  }
  return Params(v[0], v[1], v[2], v[3]);
}

FitResult fit(const ObservationSeries& obs, const LikelihoodSettings& settings, const Params& theta_init,
              const OptimOptions& opts, const ParamMask& mask) {
  settings.validate(obs.delta_obs);
  auto objective = [&](std::span<const double> free) {
    for (double v : free) {
      // exp() overflow or underflow leaves the admissible region.
      if (!(v > 0.0) || !std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    return neg_log_likelihood(mask.unpack(free, theta_init), obs, settings).value;
  };
  OptimResult r = nelder_mead(objective, mask.pack(theta_init), opts);

  FitResult out;
  out.theta_hat = mask.unpack(r.x, theta_init);
  out.nll = r.value;
  out.n_evaluations = r.n_evals;
  out.converged = r.converged;
  out.trace = std::move(r.trace);
  if (settings.backend != Backend::fd) {
    out.warnings.push_back("Monte Carlo backend " + std::string(to_string(settings.backend)) +
                           " drives the optimizer; the objective is noisy in theta");
  }
  if (!out.converged) out.warnings.push_back("evaluation budget exhausted before convergence");

  const double K_hat = out.theta_hat.carrying_capacity();
  const bool absorbed = obs.values.back() == 0.0;
  if (absorbed) {
    out.low_information = K_hat <= 0.0 || classify_extinction(obs.values, K_hat) == ExtinctionClass::transient;
  }
  if (out.low_information) {
    out.warnings.push_back("series absorbed before reaching half the fitted carrying capacity; low information");
  }
  return out;
}

std::string_view to_string(ExtinctionClass c) {
  switch (c) {
    case ExtinctionClass::never: return "never";
    case ExtinctionClass::transient: return "transient";
    case ExtinctionClass::after_stationarity: return "after_stationarity";
  }
  return "?";
}

ExtinctionClass classify_extinction(std::span<const double> states, double K) {
  const auto dead = std::find(states.begin(), states.end(), 0.0);
  if (dead == states.end()) return ExtinctionClass::never;
  const bool reached = std::any_of(states.begin(), dead, [&](double v) { return v >= 0.5 * K; });
  return reached ? ExtinctionClass::after_stationarity : ExtinctionClass::transient;
}

void ReplicateScenario::validate() const {
  if (!(x0 >= 0.0)) throw ConfigError("replicate: x0 must be >= 0");
  if (M == 0) throw ConfigError("replicate: M must be >= 1");
  const std::size_t obs_stride = step_count(delta_obs, delta_sim);
  const std::size_t total = step_count(horizon, delta_sim);
  if (obs_stride * M > total) throw ConfigError("replicate: M delta_obs exceeds the horizon");
  likelihood.validate(delta_obs);
  optim.validate(mask.size());
}

ObservationSeries replicate_series(const ReplicateScenario& sc, std::uint64_t master_seed, std::size_t rep,
                                   ExtinctionClass* cls) {
  const Trajectory traj = simulate_em(sc.truth, sc.x0, sc.horizon, sc.delta_sim, master_seed, rep);
  if (cls) *cls = classify_extinction(traj.states, sc.truth.carrying_capacity());
  ObservationSeries all = sample_observations(traj, sc.delta_obs);
  all.values.resize(sc.M + 1);
  return all;
}

std::vector<ReplicateRow> replicate(const ReplicateScenario& sc, std::size_t n_reps, std::uint64_t master_seed,
                                    Exec exec) {
  if (n_reps == 0) throw ConfigError("replicate: n_reps must be >= 1");
  sc.validate();
  ReplicateScenario inner = sc;
  if (exec == Exec::parallel) inner.likelihood.exec = Exec::serial;

  std::vector<ReplicateRow> rows(n_reps);
  const auto count = static_cast<std::ptrdiff_t>(n_reps);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    ReplicateRow& row = rows[static_cast<std::size_t>(r)];
    row.rep = static_cast<std::size_t>(r);
    try {
      const ObservationSeries obs = replicate_series(inner, master_seed, row.rep, &row.extinction);
      row.fit = fit(obs, inner.likelihood, inner.theta_init, inner.optim, inner.mask);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace stochlog
