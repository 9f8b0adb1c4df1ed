#include "stochlog/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "stochlog/errors.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config: " + key + ": cannot parse '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'block.key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || key.find('.') == std::string::npos) throw ConfigError(where + ": key must be block.key");
    if (value.empty()) throw ConfigError(where + ": empty value for " + key);
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": duplicate key " + key);
  }
  return kv;
}

ExperimentConfig ExperimentConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, std::string_view)>;
  auto dbl = [](double& dst) -> Setter {
    return [&dst](const std::string& k, std::string_view v) { dst = parse_number<double>(k, v); };
  };
  auto size = [](std::size_t& dst) -> Setter {
    return [&dst](const std::string& k, std::string_view v) { dst = parse_number<std::size_t>(k, v); };
  };
  const std::map<std::string, Setter> setters{
      {"model.lambda", dbl(c.lambda)},
      {"model.mu", dbl(c.mu)},
      {"model.alpha", dbl(c.alpha)},
      {"model.rho", dbl(c.rho)},
      {"model.x0", dbl(c.x0)},
      {"model.T", dbl(c.T)},
      {"simulation.h", dbl(c.h)},
      {"simulation.delta", dbl(c.delta)},
      {"simulation.n_paths", size(c.n_paths)},
      {"simulation.x_L", [&](const std::string& k, std::string_view v) { c.x_L = parse_number<double>(k, v); }},
      {"simulation.seed",
       [&](const std::string& k, std::string_view v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"simulation.output_stride", size(c.output_stride)},
      {"observation.Delta", dbl(c.Delta)},
      {"observation.M", size(c.M)},
      {"observation.require_survival",
       [&](const std::string& k, std::string_view v) { c.require_survival = parse_bool(k, v); }},
      {"likelihood.backend", [&](const std::string&, std::string_view v) { c.backend = parse_backend(v); }},
      {"likelihood.n_particles", size(c.n_particles)},
      {"likelihood.floor", dbl(c.floor)},
      {"kernel.x", dbl(c.kernel_x)},
      {"kernel.Delta", dbl(c.kernel_Delta)},
      {"kernel.y",
       [&](const std::string& k, std::string_view v) {
         c.kernel_y.clear();
         for (std::string_view item : split_list(v)) c.kernel_y.push_back(parse_number<double>(k, item));
       }},
      {"kernel.replicates", size(c.kernel_replicates)},
      {"kernel.methods",
       [&](const std::string&, std::string_view v) {
         c.kernel_methods.clear();
         for (std::string_view item : split_list(v)) c.kernel_methods.emplace_back(item);
       }},
      {"fpe.snapshot_every", size(c.fpe_snapshot_every)},
      {"fpe.node_stride", size(c.fpe_node_stride)},
      {"surface.lambda_min", dbl(c.surface_lambda_min)},
      {"surface.lambda_max", dbl(c.surface_lambda_max)},
      {"surface.lambda_n", size(c.surface_lambda_n)},
      {"surface.mu_min", dbl(c.surface_mu_min)},
      {"surface.mu_max", dbl(c.surface_mu_max)},
      {"surface.mu_n", size(c.surface_mu_n)},
      {"fit.lambda0", dbl(c.fit_lambda0)},
      {"fit.mu0", dbl(c.fit_mu0)},
      {"optim.initial_scale", dbl(c.optim_initial_scale)},
      {"optim.max_evals", size(c.optim_max_evals)},
      {"optim.f_abs_tol", dbl(c.optim_f_abs_tol)},
      {"optim.f_rel_tol", dbl(c.optim_f_rel_tol)},
      {"optim.x_tol", dbl(c.optim_x_tol)},
      {"replicate.n_reps", size(c.n_reps)},
      {"output.dir", [&](const std::string&, std::string_view v) { c.out_dir = std::string(v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key " + key);
    it->second(key, value);
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_key_values(parse_key_values(ss.str()));
}

void ExperimentConfig::validate() const {
  const Params p = params();  // positivity of lambda, mu, alpha, rho
  require(std::isfinite(x0) && x0 >= 0.0, "model.x0 must be >= 0");
  require(T > 0.0, "model.T must be > 0");
  require(h > 0.0, "simulation.h must be > 0");
  require(delta > 0.0, "simulation.delta must be > 0");
  require(n_paths >= 1, "simulation.n_paths must be >= 1");
  require(output_stride >= 1, "simulation.output_stride must be >= 1");
  const std::size_t steps = step_count(T, delta);
  (void)Grid::covering(p, x0, h, x_L);

  require(Delta > 0.0, "observation.Delta must be > 0");
  require(M >= 1, "observation.M must be >= 1");
  const std::size_t stride = step_count(Delta, delta);
  require(stride * M <= steps, "observation.M * observation.Delta exceeds model.T");

  likelihood().validate(Delta);
  require(kernel_x >= 0.0, "kernel.x must be >= 0");
  require(kernel_Delta > 0.0, "kernel.Delta must be > 0");
  step_count(kernel_Delta, delta);
  require(!kernel_y.empty(), "kernel.y must list at least one point");
  for (double y : kernel_y) require(y >= 0.0, "kernel.y entries must be >= 0");
  require(kernel_replicates >= 1, "kernel.replicates must be >= 1");
  require(!kernel_methods.empty(), "kernel.methods must list at least one method");
  for (const auto& m : kernel_methods) parse_backend(m);
  {
    const Grid g = Grid::covering(p, std::max(x0, kernel_x), h, x_L);
    for (double y : kernel_y) require(y <= g.upper(), "kernel.y beyond the grid upper bound");
  }
  require(fpe_snapshot_every >= 1, "fpe.snapshot_every must be >= 1");
  require(fpe_node_stride >= 1, "fpe.node_stride must be >= 1");

  require(surface_lambda_min > 0.0 && surface_lambda_max >= surface_lambda_min, "surface lambda range invalid");
  require(surface_mu_min > 0.0 && surface_mu_max >= surface_mu_min, "surface mu range invalid");
  require(surface_lambda_n >= 1 && surface_mu_n >= 1, "surface point counts must be >= 1");
  require((surface_lambda_n > 1) == (surface_lambda_max > surface_lambda_min), "surface lambda range and count");
  require((surface_mu_n > 1) == (surface_mu_max > surface_mu_min), "surface mu range and count");

  require(fit_lambda0 > 0.0 && fit_mu0 > 0.0, "fit start must be positive");
  optim().validate(2);
  require(n_reps >= 1, "replicate.n_reps must be >= 1");
  require(!out_dir.empty(), "output.dir must not be empty");
}

LikelihoodSettings ExperimentConfig::likelihood() const {
  LikelihoodSettings s;
  s.backend = backend;
  s.h = h;
  s.x_upper = x_L;
  s.delta = delta;
  s.n_paths = n_particles;
  s.seed = seed;
  s.floor = floor;
  return s;
}

OptimOptions ExperimentConfig::optim() const {
  OptimOptions o;
  o.initial_scale = {optim_initial_scale, optim_initial_scale};
  o.max_evals = optim_max_evals;
  o.f_abs_tol = optim_f_abs_tol;
  o.f_rel_tol = optim_f_rel_tol;
  o.x_tol = optim_x_tol;
  o.positivity = Positivity::log_space;
  return o;
}

ReplicateScenario ExperimentConfig::scenario() const {
  ReplicateScenario sc;
  sc.truth = params();
  sc.x0 = x0;
  sc.horizon = T;
  sc.delta_sim = delta;
  sc.delta_obs = Delta;
  sc.M = M;
  sc.likelihood = likelihood();
  sc.theta_init = Params(fit_lambda0, fit_mu0, alpha, rho);
  sc.optim = optim();
  return sc;
}

}  // namespace stochlog
