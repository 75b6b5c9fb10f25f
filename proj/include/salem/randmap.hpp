#pragma once

// The random perturbation ω of a compact set's gaps and the map f_ω it
// induces on the whole line:
//
//     f_ω(x) = x + Σ_U ω_U φ((x - inf U)/|U|),   0 <= ω_U <= δ_U.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salem/bump.hpp"
#include "salem/geometry.hpp"

namespace salem {

/// Distribution ν on [0, 1] of the normalised widths ω_U/δ_U. Both options
/// have Fourier transforms tending to zero.
enum class WidthLaw {
  uniform,        // density 1
  raised_cosine,  // density 1 - cos(2πu)
};

WidthLaw parse_width_law(std::string_view name);
std::string_view to_string(WidthLaw law) noexcept;

/// Maps a uniform variate in [0, 1) to a draw from `law`.
double draw_width(WidthLaw law, double uniform);

/// One realisation of ω with precomputed prefix sums for O(log n) evaluation.
/// Immutable after construction and safe to evaluate from many threads.
class RandomMapSample {
 public:
  /// ω_U = δ_U · X_U with X_U drawn from `law` using a counter-based
  /// generator keyed on (seed, gap index).
  static RandomMapSample draw(std::shared_ptr<const GapSet> gaps,
                              std::shared_ptr<const PerturbationSchedule> schedule,
                              WidthLaw law, std::uint64_t seed, BumpFunction bump);

  /// Fixed widths, mainly for tests and hand-built examples.
  static RandomMapSample with_omega(std::shared_ptr<const GapSet> gaps,
                                    std::shared_ptr<const PerturbationSchedule> schedule,
                                    std::vector<double> omega, BumpFunction bump);

  const GapSet& gaps() const noexcept { return *gaps_; }
  const PerturbationSchedule& schedule() const noexcept { return *schedule_; }
  std::span<const double> omega() const noexcept { return omega_; }
  std::uint64_t seed() const noexcept { return seed_; }
  WidthLaw law() const noexcept { return law_; }
  const BumpFunction& bump() const noexcept { return bump_; }
  double total_width() const noexcept { return prefix_.back(); }

  /// f_ω(x) on the whole line.
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  /// f_ω(x) = x + Σ_{U left of x} ω_U for x in E. Throws Error(domain) when
  /// x is outside the hull or inside an open gap.
  double eval_restricted(double x) const;

  /// f_ω^(k)(x), 1 <= k <= m. Throws Error(parameter) when k > m or the
  /// bump cannot supply the derivative.
  double derivative(double x, int k) const;

  /// Σ_U (ω_U/|U|^k) φ^(k)((x - inf U)/|U|): f^(k) without the identity
  /// part. At most one gap contributes. Requires k <= bump().max_derivative().
  double gap_term(double x, int k) const;

 private:
  RandomMapSample(std::shared_ptr<const GapSet> gaps,
                  std::shared_ptr<const PerturbationSchedule> schedule, std::vector<double> omega,
                  std::uint64_t seed, WidthLaw law, BumpFunction bump);

  std::shared_ptr<const GapSet> gaps_;
  std::shared_ptr<const PerturbationSchedule> schedule_;
  std::vector<double> omega_;
  std::vector<double> prefix_;  // prefix_[i] = Σ_{k<i} ω_k
  std::vector<double> lows_;
  std::vector<double> lengths_;
  std::uint64_t seed_ = 0;
  WidthLaw law_ = WidthLaw::uniform;
  BumpFunction bump_;
};

struct ModulusReport {
  double max_ratio = 0.0;
  double bound = 0.0;  // 2‖φ^(m+1)‖_∞
  bool pass = false;
  double worst_x = 0.0;
  double worst_y = 0.0;
  std::size_t pairs = 0;
};

/// Relative slack on the modulus bound to absorb floating-point error.
inline constexpr double kModulusRelTol = 1e-9;

/// Samples point pairs (within one gap, across gaps, near gap endpoints) and
/// reports max |f^(m)(y) - f^(m)(x)| / δ(|y - x|) against 2‖φ^(m+1)‖_∞.
ModulusReport modulus_check(const RandomMapSample& sample, std::size_t n_pairs,
                            std::uint64_t seed);

/// Σ δ_U over the gaps not listed in `kept`: a uniform bound on the change in
/// f_ω when the omitted gaps are dropped.
double truncation_bound(const PerturbationSchedule& schedule, std::span<const std::size_t> kept);

/// truncation_bound keeping the gaps of generation <= max_generation.
double truncation_bound_by_generation(const GapSet& gaps, const PerturbationSchedule& schedule,
                                      int max_generation);

}  // namespace salem
