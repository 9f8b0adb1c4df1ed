#pragma once

#include <cstddef>
#include <span>

namespace stochlog {

/// Selects the OpenMP kernel or the plain serial loop it is checked against.
/// Both produce identical results: per-item work is independent and every
/// reduction goes through pairwise_sum in index order.
enum class Exec { serial, parallel };

/// Deterministic pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

/// Number of OpenMP threads a parallel region would use.
int max_threads();

}  // namespace stochlog
