#pragma once

// Compact subsets of the line represented through their gap structure, the
// perturbation schedule attached to the gaps, and gap counting.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace salem {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return lo + 0.5 * (hi - lo); }

  /// Closed containment of `inner` in this interval.
  bool contains(const Interval& inner) const noexcept {
    return lo <= inner.lo && inner.hi <= hi;
  }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A bounded component of the complement of E. The span is an open interval.
struct Gap {
  Interval span;
  std::optional<int> generation;

  double length() const noexcept { return span.length(); }
  friend bool operator==(const Gap&, const Gap&) = default;
};

/// E represented as its convex hull minus finitely many open gaps.
///
/// Gaps are kept sorted by left endpoint; they are pairwise disjoint, have
/// positive length and lie strictly inside the hull. Since the gaps are
/// disjoint, the right endpoints are sorted as well, which lets every lookup
/// run as a binary search.
class GapSet {
 public:
  GapSet() = default;

  /// Validates and sorts `gaps`. Throws Error(construction) on overlap,
  /// non-positive length, or a gap touching the hull boundary.
  GapSet(Interval hull, std::vector<Gap> gaps);

  const Interval& hull() const noexcept { return hull_; }
  std::span<const Gap> gaps() const noexcept { return gaps_; }
  std::size_t size() const noexcept { return gaps_.size(); }
  bool empty() const noexcept { return gaps_.empty(); }
  const Gap& operator[](std::size_t i) const { return gaps_[i]; }

  /// Half-open index range [first, last) of gaps U with U ⊂ J (closed J).
  std::pair<std::size_t, std::size_t> gaps_within(const Interval& j) const;

  /// Index of the open gap containing x, if any.
  std::optional<std::size_t> gap_containing(double x) const;

  /// Number of gaps whose left endpoint is strictly below x.
  std::size_t count_starting_before(double x) const;

  /// x lies in the hull and in no open gap.
  bool contains_point(double x) const;

  /// Connected components of hull minus gaps, in order. Components may be
  /// degenerate (lo == hi) when two gaps share an endpoint.
  std::vector<Interval> components() const;

  friend bool operator==(const GapSet&, const GapSet&) = default;

 private:
  Interval hull_{0.0, 0.0};
  std::vector<Gap> gaps_;
};

/// Relative slack applied when comparing a gap quantity against a threshold
/// 1/x. Gap lengths come from endpoint subtraction and carry rounding error;
/// without the slack a gap of length exactly 3^-k can miss the threshold 3^k.
inline constexpr double kThresholdRelTol = 1e-12;

/// δ(t) = 1/max(-log t, log 2) if alpha == 0, t^alpha otherwise.
double delta_of(double t, double alpha);

struct PerturbationSchedule {
  int m = 1;
  double alpha = 1.0;
  std::vector<double> delta;  // δ_U, aligned with GapSet::gaps()
  double total = 0.0;         // Σ δ_U

  std::size_t size() const noexcept { return delta.size(); }
};

/// δ_U = |U|^m δ(|U|) for every gap.
PerturbationSchedule build_schedule(const GapSet& gaps, int m, double alpha);

/// ψ(J, x): gaps U ⊂ J with δ_U ≥ 1/x.
std::size_t psi(const GapSet& gaps, const PerturbationSchedule& schedule,
                const Interval& j, double x);

/// Gaps U ⊂ J with |U| ≥ 1/x.
std::size_t raw_gap_count(const GapSet& gaps, const Interval& j, double x);

}  // namespace salem
