#pragma once

// Certification of the gap-count lower bound
//
//     count(J, x) >= a + b (log λ(J) + s θ(x) log x)
//
// over a finite grid of intervals J and thresholds x.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "salem/geometry.hpp"
#include "salem/measures.hpp"

namespace salem {

enum class CountMode {
  schedule,  // ψ(J, x): threshold on δ_U
  raw,       // threshold on |U|
};

struct CountBoundOptions {
  CountMode mode = CountMode::schedule;
  double s = 1.0;
  /// Multiplier θ(x) on s·log x; unset means θ ≡ 1.
  std::function<double(double)> theta;
  /// Check the line of this slope through the frontier anchor instead of
  /// solving for the steepest one.
  std::optional<double> fixed_b;
};

struct CountBoundPoint {
  Interval j;
  double x = 0.0;
  double log_mass = 0.0;
  double abscissa = 0.0;  // log λ(J) + s θ(x) log x
  std::size_t count = 0;
  double slack = 0.0;     // count - (a + b·abscissa)
};

struct CountBoundReport {
  double a = 0.0;
  double b = 0.0;
  /// Largest abscissa at which the count still equals its grid minimum; the
  /// certified line passes through (frontier, min count).
  double frontier = 0.0;
  bool degenerate = false;  // no point lies beyond the frontier
  bool feasible = false;    // b > 0, not degenerate, no violations
  std::size_t evaluated = 0;
  std::vector<CountBoundPoint> tight;       // points attaining the minimum slack
  std::vector<CountBoundPoint> violations;  // slack below -1e-9 (re-check)
  std::vector<std::pair<Interval, double>> skipped;  // λ(J) = 0
};

/// Solves max b subject to a + b·L_i <= c_i on the grid and
/// a + b·L* >= c_min, where L* is the zero-count frontier. Without the
/// second constraint b is unbounded on any finite grid.
///
/// `schedule` is required in schedule mode and ignored in raw mode.
/// Throws Error(domain) if any x < 1.
CountBoundReport verify_count_bound(const GapSet& gaps, const PerturbationSchedule* schedule,
                                    const DiscreteMeasure& measure,
                                    std::span<const Interval> j_grid,
                                    std::span<const double> x_grid,
                                    const CountBoundOptions& options);

/// x0 · 2^j for j = 0..count-1.
std::vector<double> geometric_x_grid(double x0, int count);

}  // namespace salem
