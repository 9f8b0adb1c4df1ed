#include "stochlog/fpe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "stochlog/errors.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(double h_, std::size_t L_) : h(h_), L(L_) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid: mesh size must be > 0");
  if (L < 2) throw ConfigError("grid: need at least 2 intervals");
}

Grid Grid::covering(const Params& p, double x0, double h, std::optional<double> x_upper) {
  const double K = p.carrying_capacity();
  const double required = 2.0 * std::max(K, x0);
  const double upper = x_upper.value_or(std::max(4.0 * K, 2.0 * x0));
  if (!(upper > 0.0)) throw ConfigError("grid: upper bound must be > 0");
  if (upper < required * (1.0 - 1e-12)) {
    throw ConfigError("grid: upper bound " + std::to_string(upper) + " below 2 max(K, x0) = " +
                      std::to_string(required));
  }
  const auto cells = static_cast<std::size_t>(std::ceil(upper / h - 1e-9));
  return Grid(h, std::max<std::size_t>(cells, 2));
}

std::size_t Grid::nearest_node(double x) const {
  if (!(x >= 0.0)) throw ConfigError("grid: negative state");
  const double pos = x / h;
  if (pos > static_cast<double>(L) + 1e-9) throw OutOfGrid("state " + std::to_string(x) + " beyond grid upper bound");
  const double base = std::floor(pos);
  auto l = static_cast<std::size_t>(base);
  if (pos - base > 0.5) ++l;
  return std::min(l, L);
}

// ---------------------------------------------------------------------------
// Generator

GeneratorMatrix::GeneratorMatrix(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                 double to_cemetery)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)), to_cemetery_(to_cemetery) {
  if (lower_.size() != diag_.size() || upper_.size() != diag_.size() || diag_.size() < 3) {
    throw ConfigError("generator: band sizes must match (>= 3 nodes)");
  }
}

double GeneratorMatrix::at(std::ptrdiff_t row, std::ptrdiff_t col) const {
  if (row == kCemetery) return 0.0;
  const auto r = static_cast<std::size_t>(row);
  if (col == kCemetery) return r == 0 ? to_cemetery_ : 0.0;
  if (col == row) return diag_[r];
  if (col == row - 1) return lower_[r];
  if (col == row + 1) return upper_[r];
  return 0.0;
}

double GeneratorMatrix::row_sum(std::ptrdiff_t row) const {
  if (row == kCemetery) return 0.0;
  const auto r = static_cast<std::size_t>(row);
  const double off = lower_[r] + upper_[r] + (r == 0 ? to_cemetery_ : 0.0);
  return off + diag_[r];
}

double GeneratorMatrix::max_exit_rate() const {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, std::abs(d));
  return m;
}

GeneratorMatrix build_generator(const Params& p, const Grid& g) {
  const std::size_t n = g.nodes();
  const double h = g.h;
  const double h2 = h * h;
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);

  // Node 0 only leaks into the cemetery.
  const BoundaryDerivatives d0 = boundary_derivatives(p);
  diag[0] = -std::abs(d0.b_prime_0) - d0.a_prime_0 / h;
  const double to_cemetery = -diag[0];

  for (std::size_t l = 1; l + 1 < n; ++l) {
    const double x = g.node(l);
    const double b = drift(p, x);
    const double a = diffusion_sq(p, x);
    lower[l] = std::max(-b, 0.0) / h + a / (2.0 * h2);
    upper[l] = std::max(b, 0.0) / h + a / (2.0 * h2);
    diag[l] = -(lower[l] + upper[l]);
  }

  // Reflecting right boundary.
  const double xL = g.upper();
  lower[n - 1] = std::abs(drift(p, xL)) / h + diffusion_sq(p, xL) / h2;
  diag[n - 1] = -lower[n - 1];

  return GeneratorMatrix(std::move(lower), std::move(diag), std::move(upper), to_cemetery);
}

double holding_time_ratio(const GeneratorMatrix& A, double delta) { return delta * A.max_exit_rate(); }

// ---------------------------------------------------------------------------
// Probability vectors and time stepping

double ProbVector::total() const { return cemetery + pairwise_sum(masses); }

ProbVector ProbVector::dirac(const Grid& g, double x) {
  ProbVector P{0.0, std::vector<double>(g.nodes(), 0.0)};
  if (x == 0.0) {
    P.cemetery = 1.0;
  } else {
    P.masses[g.nearest_node(x)] = 1.0;
  }
  return P;
}

namespace {

struct TransposedBands {
  std::vector<double> sub, diag, super;
};

// (I - delta A)^T restricted to the nodes.
TransposedBands transposed_operator(const GeneratorMatrix& A, double delta) {
  const std::size_t n = A.nodes();
  TransposedBands m{std::vector<double>(n, 0.0), std::vector<double>(n), std::vector<double>(n, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    m.diag[j] = 1.0 - delta * A.diag()[j];
    if (j > 0) m.sub[j] = -delta * A.upper()[j - 1];
    if (j + 1 < n) m.super[j] = -delta * A.lower()[j + 1];
  }
  return m;
}

TridiagonalFactor factor_for(const GeneratorMatrix& A, double delta) {
  if (!(delta > 0.0)) throw ConfigError("implicit Euler: step must be > 0");
  const TransposedBands m = transposed_operator(A, delta);
  return TridiagonalFactor(m.sub, m.diag, m.super);
}

inline double cell_volume(std::size_t l, const Grid& g) { return (l == 0 || l == g.L) ? 0.5 * g.h : g.h; }

// Linear interpolation of node densities; node_value(l) supplies them.
// Queries within 1e-9 cells of a node return that node's value exactly.
template <class NodeValue>
double interpolate(const Grid& g, double y, NodeValue&& node_value) {
  const double pos = y / g.h;
  if (pos > static_cast<double>(g.L) + 1e-9) {
    throw OutOfGrid("query " + std::to_string(y) + " beyond grid upper bound " + std::to_string(g.upper()));
  }
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) return node_value(std::min(static_cast<std::size_t>(nearest), g.L));
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * node_value(i) + f * node_value(i + 1);
}

}  // namespace

ImplicitEulerStepper::ImplicitEulerStepper(const GeneratorMatrix& A, double delta)
    : factor_(factor_for(A, delta)), delta_(delta), cemetery_rate_(delta * A.to_cemetery()) {}

void ImplicitEulerStepper::step(ProbVector& P) const {
  factor_.solve(P.masses);
  P.cemetery += cemetery_rate_ * P.masses[0];
}

void ImplicitEulerStepper::step_block(std::span<double> block, std::span<double> cemetery) const {
  factor_.solve_block(block);
  for (std::size_t j = 0; j < TridiagonalFactor::kBlockWidth; ++j) cemetery[j] += cemetery_rate_ * block[j];
}

ProbVector implicit_euler_step(const GeneratorMatrix& A, const ProbVector& P, double delta) {
  if (P.masses.size() != A.nodes()) throw ConfigError("implicit Euler: size mismatch");
  ImplicitEulerStepper stepper(A, delta);
  ProbVector next = P;
  stepper.step(next);

  // Residual of (I - delta A)^T next = P over all states.
  const std::size_t n = A.nodes();
  double residual = 0.0;
  double scale = std::abs(P.cemetery);
  for (std::size_t j = 0; j < n; ++j) {
    double flow = A.diag()[j] * next.masses[j];
    if (j > 0) flow += A.upper()[j - 1] * next.masses[j - 1];
    if (j + 1 < n) flow += A.lower()[j + 1] * next.masses[j + 1];
    residual = std::max(residual, std::abs(next.masses[j] - delta * flow - P.masses[j]));
    scale = std::max(scale, std::abs(P.masses[j]));
  }
  const double cemetery_res = std::abs(next.cemetery - delta * A.to_cemetery() * next.masses[0] - P.cemetery);
  residual = std::max(residual, cemetery_res);
  if (!std::isfinite(residual) || residual > 1e-9 * std::max(1.0, scale)) {
    throw NumericalError("implicit Euler solve inaccurate", residual);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Transition densities

TransitionDensity TransitionDensity::from_masses(const ProbVector& P, const Grid& g) {
  TransitionDensity td{P.cemetery, g, std::vector<double>(g.nodes())};
  for (std::size_t l = 0; l < g.nodes(); ++l) td.values[l] = P.masses[l] / cell_volume(l, g);
  return td;
}

double TransitionDensity::total_mass() const {
  std::vector<double> cells(values.size());
  for (std::size_t l = 0; l < values.size(); ++l) cells[l] = values[l] * cell_volume(l, grid);
  return atom + pairwise_sum(cells);
}

double TransitionDensity::mean() const {
  std::vector<double> cells(values.size());
  for (std::size_t l = 0; l < values.size(); ++l) cells[l] = grid.node(l) * values[l] * cell_volume(l, grid);
  return pairwise_sum(cells);
}

TransitionDensity solve_kernel(const Params& p, double x, double delta_obs, const Grid& g, double delta) {
  const std::size_t n = step_count(delta_obs, delta);
  ProbVector P = ProbVector::dirac(g, x);
  if (P.cemetery == 1.0) return TransitionDensity::from_masses(P, g);
  const ImplicitEulerStepper stepper(build_generator(p, g), delta);
  for (std::size_t k = 0; k < n; ++k) stepper.step(P);
  return TransitionDensity::from_masses(P, g);
}

namespace {

constexpr std::size_t kW = TridiagonalFactor::kBlockWidth;

// Evolves one Dirac per start node, kW at a time, and hands each finished
// lane to `visit(index, block, lane, cemetery)`.
template <class Visit>
void evolve_batched(const ImplicitEulerStepper& stepper, std::span<const std::size_t> start_nodes,
                    std::size_t n_steps, Exec exec, Visit&& visit) {
  const std::size_t nodes = stepper.nodes();
  const std::size_t n_blocks = (start_nodes.size() + kW - 1) / kW;
  const auto count = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::ptrdiff_t b = 0; b < count; ++b) {
    std::vector<double> block(nodes * kW, 0.0);
    std::vector<double> cemetery(kW, 0.0);
    const std::size_t first = static_cast<std::size_t>(b) * kW;
    const std::size_t lanes = std::min(kW, start_nodes.size() - first);
    for (std::size_t j = 0; j < lanes; ++j) block[start_nodes[first + j] * kW + j] = 1.0;
    for (std::size_t k = 0; k < n_steps; ++k) stepper.step_block(block, cemetery);
    for (std::size_t j = 0; j < lanes; ++j) visit(first + j, block, j, cemetery[j]);
  }
}

}  // namespace

std::vector<TransitionDensity> solve_kernels(const Params& p, std::span<const double> starts, double delta_obs,
                                             const Grid& g, double delta, Exec exec) {
  const std::size_t n = step_count(delta_obs, delta);
  std::vector<TransitionDensity> out(starts.size());
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i] == 0.0) {
      out[i] = TransitionDensity::from_masses(ProbVector::dirac(g, 0.0), g);
    } else {
      nodes.push_back(g.nearest_node(starts[i]));
      owner.push_back(i);
    }
  }
  if (nodes.empty()) return out;
  const ImplicitEulerStepper stepper(build_generator(p, g), delta);
  evolve_batched(stepper, nodes, n, exec,
                 [&](std::size_t idx, std::span<const double> block, std::size_t lane, double cem) {
                   TransitionDensity td{cem, g, std::vector<double>(g.nodes())};
                   for (std::size_t l = 0; l < g.nodes(); ++l) td.values[l] = block[l * kW + lane] / cell_volume(l, g);
                   out[owner[idx]] = std::move(td);
                 });
  return out;
}

std::vector<double> kernel_values(const Params& p, std::span<const KernelQuery> queries, double delta_obs,
                                  const Grid& g, double delta, Exec exec) {
  const std::size_t n = step_count(delta_obs, delta);
  std::vector<double> out(queries.size(), 0.0);

  // Distinct start nodes, in increasing order for determinism.
  std::map<std::size_t, std::vector<std::size_t>> by_node;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto [x, y] = queries[i];
    if (!(y >= 0.0)) throw ConfigError("kernel_values: negative query point");
    if (x == 0.0) {
      out[i] = (y == 0.0) ? 1.0 : 0.0;
      continue;
    }
    if (y > 0.0 && y / g.h > static_cast<double>(g.L) + 1e-9) {
      throw OutOfGrid("query " + std::to_string(y) + " beyond grid upper bound " + std::to_string(g.upper()));
    }
    by_node[g.nearest_node(x)].push_back(i);
  }
  if (by_node.empty()) return out;

  std::vector<std::size_t> nodes;
  std::vector<const std::vector<std::size_t>*> members;
  for (const auto& [node, idx] : by_node) {
    nodes.push_back(node);
    members.push_back(&idx);
  }
  const ImplicitEulerStepper stepper(build_generator(p, g), delta);
  evolve_batched(stepper, nodes, n, exec,
                 [&](std::size_t idx, std::span<const double> block, std::size_t lane, double cem) {
                   auto value = [&](std::size_t l) { return block[l * kW + lane] / cell_volume(l, g); };
                   for (std::size_t q : *members[idx]) {
                     const double y = queries[q].y;
                     out[q] = (y == 0.0) ? cem : interpolate(g, y, value);
                   }
                 });
  return out;
}

DensityValue density_at(const TransitionDensity& td, double y) {
  if (!(y >= 0.0)) throw ConfigError("density_at: negative query point");
  if (y == 0.0) return {td.atom, true};
  return {interpolate(td.grid, y, [&](std::size_t l) { return td.values[l]; }), false};
}

// ---------------------------------------------------------------------------
// Time evolution and the extinction-rate diagnostic

KernelEvolution evolve_kernel(const Params& p, double x, double horizon, const Grid& g, double delta,
                              std::size_t snapshot_every) {
  const std::size_t n = step_count(horizon, delta);
  const ImplicitEulerStepper stepper(build_generator(p, g), delta);
  ProbVector P = ProbVector::dirac(g, x);

  KernelEvolution ev;
  ev.trace.dt = delta;
  ev.trace.atom.reserve(n + 1);
  ev.trace.p_zero.reserve(n + 1);
  auto record = [&](std::size_t k) {
    ev.trace.atom.push_back(P.cemetery);
    ev.trace.p_zero.push_back(P.masses[0] / cell_volume(0, g));
    const bool snap = (snapshot_every > 0 && k % snapshot_every == 0) || k == 0 || k == n;
    if (snap) {
      ev.snapshot_times.push_back(static_cast<double>(k) * delta);
      ev.snapshots.push_back(TransitionDensity::from_masses(P, g));
    }
  };
  record(0);
  double previous_total = P.total();
  for (std::size_t k = 1; k <= n; ++k) {
    stepper.step(P);
    const double total = P.total();
    ev.max_mass_error = std::max(ev.max_mass_error, std::abs(total - 1.0));
    ev.max_step_mass_change = std::max(ev.max_step_mass_change, std::abs(total - previous_total));
    previous_total = total;
    record(k);
  }
  return ev;
}

ExtinctionTrace trace_from(std::span<const TransitionDensity> sequence, double dt) {
  ExtinctionTrace tr;
  tr.dt = dt;
  for (const auto& td : sequence) {
    tr.atom.push_back(td.atom);
    tr.p_zero.push_back(td.values.empty() ? 0.0 : td.values[0]);
  }
  return tr;
}

double extinction_rate_check(const Params& p, const ExtinctionTrace& trace, const Grid& g, double t_from,
                             double t_to) {
  const BoundaryDerivatives d0 = boundary_derivatives(p);
  const double coeff = 0.5 * d0.a_prime_0 + 0.5 * g.h * std::abs(d0.b_prime_0);
  double max_dev = 0.0;
  double max_rate = 0.0;
  for (std::size_t k = 0; k + 1 < trace.atom.size(); ++k) {
    const double t = static_cast<double>(k) * trace.dt;
    if (t < t_from - 1e-12 || t > t_to + 1e-12) continue;
    const double fd_rate = (trace.atom[k + 1] - trace.atom[k]) / trace.dt;
    const double flux = coeff * trace.p_zero[k];
    max_dev = std::max(max_dev, std::abs(fd_rate - flux));
    max_rate = std::max(max_rate, flux);
  }
  return max_rate > 0.0 ? max_dev / max_rate : max_dev;
}

}  // namespace stochlog
