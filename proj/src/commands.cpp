#include "stochlog/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "stochlog/csv.hpp"
#include "stochlog/errors.hpp"
#include "stochlog/estimator.hpp"
#include "stochlog/fpe_solver.hpp"
#include "stochlog/likelihood.hpp"
#include "stochlog/mc_kernels.hpp"

namespace stochlog {

void CommandOutput::add(std::string name, std::string content) {
  files.push_back({std::move(name), std::move(content)});
}

void CommandOutput::add_recipe(const std::string& csv_name, const std::string& recipe) {
  const std::string stem = csv_name.substr(0, csv_name.rfind('.'));
  add(stem + ".recipe", csv_name + ": " + recipe + "\n");
}

namespace {

constexpr std::size_t kMaxDataSearch = 10000;

double linspace(double lo, double hi, std::size_t n, std::size_t i) {
  return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::string observations_csv(const ObservationSeries& obs) {
  CsvBuilder csv{"t", "x"};
  for (std::size_t k = 0; k < obs.values.size(); ++k) {
    csv.add(static_cast<double>(k) * obs.delta_obs).add(obs.values[k]);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace

std::string transition_density_csv(const TransitionDensity& td) {
  std::string text = "atom," + format_double(td.atom) + "\n";
  CsvBuilder csv{"y", "p"};
  for (std::size_t l = 0; l < td.values.size(); ++l) {
    csv.add(td.grid.node(l)).add(td.values[l]);
    csv.end_row();
  }
  return text + csv.str();
}

ObservationSeries data_series(const ExperimentConfig& cfg, std::size_t* path_index) {
  const Params p = cfg.params();
  for (std::size_t i = 0; i < kMaxDataSearch; ++i) {
    const Trajectory traj = simulate_em(p, cfg.x0, cfg.T, cfg.delta, cfg.seed, i);
    if (cfg.require_survival && traj.extinct()) continue;
    if (path_index) *path_index = i;
    ObservationSeries obs = sample_observations(traj, cfg.Delta);
    obs.values.resize(cfg.M + 1);
    return obs;
  }
  throw ConfigError("no path survives to T among the first " + std::to_string(kMaxDataSearch) +
                    " simulated paths");
}

CommandOutput cmd_simulate(const ExperimentConfig& cfg) {
  const std::vector<Trajectory> paths =
      simulate_em_ensemble(cfg.params(), cfg.x0, cfg.T, cfg.delta, cfg.n_paths, cfg.seed);
  const std::size_t n = paths.front().states.size();
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; k += cfg.output_stride) kept.push_back(k);
  if (kept.back() != n - 1) kept.push_back(n - 1);

  CsvBuilder traj{"path_id", "t", "x"};
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t k : kept) {
      traj.add(i).add(paths[i].time_at(k)).add(paths[i].states[k]);
      traj.end_row();
    }
  }
  CsvBuilder ext{"t", "extinction_frequency"};
  for (std::size_t k : kept) {
    std::size_t dead = 0;
    for (const Trajectory& path : paths) dead += path.states[k] == 0.0 ? 1 : 0;
    ext.add(paths.front().time_at(k)).add(static_cast<double>(dead) / static_cast<double>(paths.size()));
    ext.end_row();
  }

  CommandOutput out;
  out.add("trajectories.csv", traj.str());
  out.add_recipe("trajectories.csv", "lines x=t y=x group=path_id");
  out.add("extinction.csv", ext.str());
  out.add_recipe("extinction.csv", "step x=t y=extinction_frequency");
  return out;
}

CommandOutput cmd_fpe(const ExperimentConfig& cfg) {
  const Params p = cfg.params();
  const Grid g = cfg.grid();
  CommandOutput out;
  const double ratio = holding_time_ratio(build_generator(p, g), cfg.delta);
  if (ratio > kHoldingTimeWarnThreshold) {
    out.notes.push_back("warning: delta * max|A_ll| = " + format_double(ratio) +
                        "; the time step is coarse relative to the fastest jump rate");
  }
  const KernelEvolution ev = evolve_kernel(p, cfg.x0, cfg.T, g, cfg.delta, cfg.fpe_snapshot_every);

  CsvBuilder density{"t", "y", "p"};
  CsvBuilder mass{"t", "atom", "total_mass"};
  for (std::size_t s = 0; s < ev.snapshots.size(); ++s) {
    const TransitionDensity& td = ev.snapshots[s];
    const double t = ev.snapshot_times[s];
    for (std::size_t l = 0; l < g.nodes(); l += cfg.fpe_node_stride) {
      density.add(t).add(g.node(l)).add(td.values[l]);
      density.end_row();
    }
    mass.add(t).add(td.atom).add(td.total_mass());
    mass.end_row();
  }
  CsvBuilder atom{"t", "atom"};
  for (std::size_t k = 0; k < ev.trace.atom.size(); ++k) {
    atom.add(static_cast<double>(k) * ev.trace.dt).add(ev.trace.atom[k]);
    atom.end_row();
  }
  out.notes.push_back("max |total mass - 1| = " + format_double(ev.max_mass_error));

  out.add("fpe_density.csv", density.str());
  out.add_recipe("fpe_density.csv", "surface x=y y=t z=p");
  out.add("fpe_atom.csv", atom.str());
  out.add_recipe("fpe_atom.csv", "line x=t y=atom");
  out.add("fpe_mass.csv", mass.str());
  out.add_recipe("fpe_mass.csv", "line x=t y=total_mass");
  return out;
}

CommandOutput cmd_kernel(const ExperimentConfig& cfg) {
  const Params p = cfg.params();
  CsvBuilder csv{"method", "y", "replicate", "estimate"};
  CommandOutput out;
  for (const std::string& name : cfg.kernel_methods) {
    const Backend method = parse_backend(name);
    if (method == Backend::fd) {
      const Grid g = Grid::covering(p, std::max(cfg.x0, cfg.kernel_x), cfg.h, cfg.x_L);
      const TransitionDensity td = solve_kernel(p, cfg.kernel_x, cfg.kernel_Delta, g, cfg.delta);
      out.add("kernel_fd_density.csv", transition_density_csv(td));
      for (double y : cfg.kernel_y) {
        csv.add(name).add(y).add(std::size_t{0}).add(density_at(td, y).value);
        csv.end_row();
      }
      continue;
    }
    for (double y : cfg.kernel_y) {
      for (std::size_t r = 0; r < cfg.kernel_replicates; ++r) {
        const McSettings mc{cfg.kernel_Delta, cfg.delta, cfg.n_particles, cfg.seed, r};
        KernelEstimate est;
        switch (method) {
          case Backend::pedersen: est = pedersen_density(p, cfg.kernel_x, y, mc); break;
          case Backend::bridge_plain: est = bridge_density(p, cfg.kernel_x, y, mc, BridgeVariant::plain); break;
          case Backend::bridge_modified:
            est = bridge_density(p, cfg.kernel_x, y, mc, BridgeVariant::modified);
            break;
          case Backend::nonparametric: est = nonparam_density(p, cfg.kernel_x, y, mc); break;
          case Backend::fd: break;
        }
        csv.add(name).add(y).add(r).add(est.value);
        csv.end_row();
      }
    }
  }
  out.add("kernel.csv", csv.str());
  out.add_recipe("kernel.csv", "boxplot x=method y=estimate facet=y");
  return out;
}

CommandOutput cmd_nll_surface(const ExperimentConfig& cfg) {
  std::size_t path = 0;
  const ObservationSeries obs = data_series(cfg, &path);
  const LikelihoodSettings s = cfg.likelihood();
  CsvBuilder csv{"lambda", "mu", "nll"};
  for (std::size_t i = 0; i < cfg.surface_lambda_n; ++i) {
    const double lambda = linspace(cfg.surface_lambda_min, cfg.surface_lambda_max, cfg.surface_lambda_n, i);
    for (std::size_t j = 0; j < cfg.surface_mu_n; ++j) {
      const double mu = linspace(cfg.surface_mu_min, cfg.surface_mu_max, cfg.surface_mu_n, j);
      const NllResult r = neg_log_likelihood(Params(lambda, mu, cfg.alpha, cfg.rho), obs, s);
      csv.add(lambda).add(mu).add(r.value);
      csv.end_row();
    }
  }
  CommandOutput out;
  out.notes.push_back("data series: simulated path " + std::to_string(path));
  out.add("observations.csv", observations_csv(obs));
  out.add_recipe("observations.csv", "points x=t y=x");
  out.add("nll_surface.csv", csv.str());
  out.add_recipe("nll_surface.csv", "contour x=lambda y=mu z=nll");
  return out;
}

CommandOutput cmd_fit(const ExperimentConfig& cfg) {
  std::size_t path = 0;
  const ObservationSeries obs = data_series(cfg, &path);
  const ReplicateScenario sc = cfg.scenario();
  const FitResult r = fit(obs, sc.likelihood, sc.theta_init, sc.optim, sc.mask);

  CsvBuilder csv{"lambda_hat", "mu_hat", "nll", "n_evaluations", "converged", "low_information"};
  csv.add(r.theta_hat.lambda).add(r.theta_hat.mu).add(r.nll).add(r.n_evaluations).add(r.converged);
  csv.add(r.low_information);
  csv.end_row();
  CsvBuilder trace{"eval", "lambda", "mu", "nll"};
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    trace.add(k).add(r.trace[k].x[0]).add(r.trace[k].x[1]).add(r.trace[k].value);
    trace.end_row();
  }
  CommandOutput out;
  out.notes.push_back("data series: simulated path " + std::to_string(path));
  for (const auto& w : r.warnings) out.notes.push_back("warning: " + w);
  out.add("observations.csv", observations_csv(obs));
  out.add_recipe("observations.csv", "points x=t y=x");
  out.add("fit.csv", csv.str());
  out.add("fit_trace.csv", trace.str());
  out.add_recipe("fit_trace.csv", "path x=lambda y=mu color=nll");
  return out;
}

CommandOutput cmd_replicate(const ExperimentConfig& cfg) {
  const std::vector<ReplicateRow> rows = replicate(cfg.scenario(), cfg.n_reps, cfg.seed);
  CsvBuilder csv{"rep", "lambda_hat", "mu_hat", "nll", "extinction_class", "converged"};
  CommandOutput out;
  for (const ReplicateRow& row : rows) {
    const double nan = std::nan("");
    csv.add(row.rep);
    if (row.fit) csv.add(row.fit->theta_hat.lambda).add(row.fit->theta_hat.mu).add(row.fit->nll);
    else csv.add(nan).add(nan).add(nan);
    csv.add(to_string(row.extinction)).add(row.fit && row.fit->converged);
    csv.end_row();
    if (!row.error.empty()) out.notes.push_back("rep " + std::to_string(row.rep) + " failed: " + row.error);
  }
  out.add("replicate.csv", csv.str());
  out.add_recipe("replicate.csv", "scatter x=lambda_hat y=mu_hat marker=extinction_class");
  return out;
}

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names{"simulate", "fpe", "kernel", "nll-surface", "fit", "replicate"};
  return names;
}

int run_command(std::string_view name, const ExperimentConfig& cfg, std::ostream& err) {
  static const std::map<std::string_view, std::function<CommandOutput(const ExperimentConfig&)>> table{
      {"simulate", cmd_simulate}, {"fpe", cmd_fpe},  {"kernel", cmd_kernel},
      {"nll-surface", cmd_nll_surface}, {"fit", cmd_fit}, {"replicate", cmd_replicate},
  };
  try {
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown command " + std::string(name));
    cfg.validate();
    const CommandOutput out = it->second(cfg);
    for (const auto& note : out.notes) err << note << '\n';
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& f : out.files) write_file(cfg.out_dir / f.name, f.content);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfGrid& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ScaleOverflow& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace stochlog
