#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stochlog {

/// Thomas-algorithm factorization of a tridiagonal matrix M, reusable for
/// any number of right-hand sides. No pivoting: M must be diagonally
/// dominant (by rows or columns), which the implicit Euler operators are.
///
/// sub[i] = M(i, i-1), diag[i] = M(i, i), super[i] = M(i, i+1); sub[0] and
/// super[n-1] are ignored.
class TridiagonalFactor {
 public:
  /// Right-hand sides solved together by solve_block; fits L2 for grids of
  /// ~10^4 nodes.
  static constexpr std::size_t kBlockWidth = 16;

  TridiagonalFactor(std::span<const double> sub, std::span<const double> diag, std::span<const double> super);

  std::size_t size() const { return sub_.size(); }

  /// Solves M x = rhs in place.
  void solve(std::span<double> rhs) const;

  /// Solves kBlockWidth systems at once; block is row-major [row][lane].
  void solve_block(std::span<double> block) const;

 private:
  std::vector<double> sub_;
  std::vector<double> inv_pivot_;
  std::vector<double> c_prime_;
};

/// Plain Thomas solve without a stored factorization (serial reference).
std::vector<double> thomas_solve(std::span<const double> sub, std::span<const double> diag,
                                 std::span<const double> super, std::span<const double> rhs);

}  // namespace stochlog
