#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "stochlog/model.hpp"
#include "stochlog/parallel.hpp"
#include "stochlog/tridiag.hpp"

namespace stochlog {

/// Regular grid x_l = l h, l = 0..L.
struct Grid {
  double h;
  std::size_t L;

  Grid(double h, std::size_t L);

  /// Grid reaching x_upper (default max(4K, 2 x0)), rounded up to a whole
  /// number of cells. Rejects an upper bound below 2 max(K, x0).
  static Grid covering(const Params& p, double x0, double h, std::optional<double> x_upper = std::nullopt);

  std::size_t nodes() const { return L + 1; }
  double node(std::size_t l) const { return static_cast<double>(l) * h; }
  double upper() const { return node(L); }
  /// Nearest node to x, ties broken toward the lower node.
  std::size_t nearest_node(double x) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Up-wind generator of the jump process on {cemetery, x_0, ..., x_L}.
/// Rows are tridiagonal over the nodes; row 0 feeds only the cemetery and
/// the cemetery row is identically zero. Diagonals are set to minus the
/// off-diagonal row sums, so every row is conservative by construction.
class GeneratorMatrix {
 public:
  static constexpr std::ptrdiff_t kCemetery = -1;

  GeneratorMatrix(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                  double to_cemetery);

  std::size_t nodes() const { return diag_.size(); }
  /// Entry A(row, col); kCemetery addresses the cemetery state.
  double at(std::ptrdiff_t row, std::ptrdiff_t col) const;
  /// Off-diagonal entries summed first, then the diagonal.
  double row_sum(std::ptrdiff_t row) const;

  /// lower()[l] = A(l, l-1), upper()[l] = A(l, l+1); out-of-range slots are 0.
  std::span<const double> lower() const { return lower_; }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> upper() const { return upper_; }
  double to_cemetery() const { return to_cemetery_; }
  double max_exit_rate() const;

 private:
  std::vector<double> lower_;
  std::vector<double> diag_;
  std::vector<double> upper_;
  double to_cemetery_;
};

GeneratorMatrix build_generator(const Params& p, const Grid& g);

/// delta * max_l |A(l, l)|: expected jumps per time step at the fastest node.
double holding_time_ratio(const GeneratorMatrix& A, double delta);
inline constexpr double kHoldingTimeWarnThreshold = 10.0;

/// Law of the jump process: cemetery mass plus node masses.
struct ProbVector {
  double cemetery = 0.0;
  std::vector<double> masses;

  double total() const;
  static ProbVector dirac(const Grid& g, double x);
};

/// Implicit Euler for dP/dt = A* P, factored once for (A, delta).
/// Nodes solve a tridiagonal system; the cemetery is updated afterwards from
/// the new node-0 mass.
class ImplicitEulerStepper {
 public:
  ImplicitEulerStepper(const GeneratorMatrix& A, double delta);

  double delta() const { return delta_; }
  std::size_t nodes() const { return factor_.size(); }

  void step(ProbVector& P) const;

  /// Advances TridiagonalFactor::kBlockWidth laws stored row-major
  /// [node][lane]; cemetery has one entry per lane.
  void step_block(std::span<double> block, std::span<double> cemetery) const;

 private:
  TridiagonalFactor factor_;
  double delta_;
  double cemetery_rate_;  // delta * A(0, cemetery)
};

/// One implicit Euler step; throws NumericalError carrying the residual norm
/// when the solve is inaccurate.
ProbVector implicit_euler_step(const GeneratorMatrix& A, const ProbVector& P, double delta);

/// Density of Q(dy | x) with respect to delta_0(dy) + dy: an atom at 0 and
/// node values of the continuous part.
struct TransitionDensity {
  double atom = 0.0;
  Grid grid{1.0, 2};
  std::vector<double> values;

  /// Node masses divided by cell volumes (h/2 at both ends, h inside).
  static TransitionDensity from_masses(const ProbVector& P, const Grid& g);

  /// atom + trapezoid integral of the continuous part.
  double total_mass() const;
  /// Mean state (the atom contributes 0).
  double mean() const;
};

/// Evolves a Dirac at the node nearest x (x = 0: the cemetery) for
/// delta_obs / delta implicit Euler steps.
TransitionDensity solve_kernel(const Params& p, double x, double delta_obs, const Grid& g, double delta);

/// solve_kernel for many starting points sharing one factorization. Starts
/// are processed in blocks of TridiagonalFactor::kBlockWidth.
std::vector<TransitionDensity> solve_kernels(const Params& p, std::span<const double> starts, double delta_obs,
                                             const Grid& g, double delta, Exec exec = Exec::parallel);

struct KernelQuery {
  double x;
  double y;
};

/// q(y | x) for each query without materializing densities. Queries with
/// the same start node share one solve.
std::vector<double> kernel_values(const Params& p, std::span<const KernelQuery> queries, double delta_obs,
                                  const Grid& g, double delta, Exec exec = Exec::parallel);

struct DensityValue {
  double value;
  bool is_atom;
};

/// y = 0: the atom; 0 < y <= x_L: linear interpolation of node values.
/// Throws OutOfGrid above x_L.
DensityValue density_at(const TransitionDensity& td, double y);

/// Per-step extinction mass and node-0 density, index k <-> t = k dt.
struct ExtinctionTrace {
  double dt = 0.0;
  std::vector<double> atom;
  std::vector<double> p_zero;
};

struct KernelEvolution {
  ExtinctionTrace trace;
  std::vector<double> snapshot_times;
  std::vector<TransitionDensity> snapshots;
  /// max over steps of |total mass - 1|.
  double max_mass_error = 0.0;
  /// max over steps of |total mass after - total mass before|.
  double max_step_mass_change = 0.0;
};

/// Full time evolution from x over [0, horizon], recording every step in the
/// trace and a snapshot every snapshot_every steps (0: only the endpoints).
KernelEvolution evolve_kernel(const Params& p, double x, double horizon, const Grid& g, double delta,
                              std::size_t snapshot_every = 0);

ExtinctionTrace trace_from(std::span<const TransitionDensity> sequence, double dt);

/// max_k |(E_{k+1} - E_k)/dt - (a'(0)/2 + h |b'(0)|/2) p_k(0)| over steps
/// starting in [t_from, t_to], divided by the largest continuous-flux rate
/// in the window. 0 when no flux occurs.
double extinction_rate_check(const Params& p, const ExtinctionTrace& trace, const Grid& g, double t_from = 0.0,
                             double t_to = std::numeric_limits<double>::infinity());

}  // namespace stochlog
