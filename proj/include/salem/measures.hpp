#pragma once

// Discrete probability measures and the concrete sets they live on: affine
// IFS attractors with their self-similar measures and the fat Cantor set.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "salem/geometry.hpp"

namespace salem {

struct Atom {
  double position = 0.0;
  double weight = 0.0;
};

/// Weighted atoms approximating a probability measure on the line.
///
/// Positions are strictly increasing, weights non-negative and summing to 1
/// within kMassTolerance. `resolution` is the diameter of the finest
/// construction piece an atom stands for; structure below that scale is not
/// represented.
class DiscreteMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<Atom> atoms, double resolution, std::string provenance = {});

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double resolution() const noexcept { return resolution_; }
  const std::string& provenance() const noexcept { return provenance_; }

  /// λ(J) for the closed interval J.
  double mass(const Interval& j) const;

  /// Mass of atoms with index in [first, last).
  double mass_of_range(std::size_t first, std::size_t last) const;

  double total_mass() const { return mass_of_range(0, atoms_.size()); }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;  // cumulative_[i] = Σ_{k<i} w_k
  double resolution_ = 1.0;
  std::string provenance_;
};

/// A set built level by level, with the measure on its finest level.
/// `pieces[k]` holds the closed intervals of generation k (pieces[0] is the
/// hull).
struct Construction {
  GapSet gaps;
  DiscreteMeasure measure;
  std::vector<std::vector<Interval>> pieces;
};

struct AffineMap {
  double ratio = 0.5;   // 0 < |ratio| < 1
  double offset = 0.0;

  double operator()(double x) const noexcept { return ratio * x + offset; }
};

struct AffineIFSSpec {
  std::vector<AffineMap> maps;
  std::vector<double> weights;  // empty means uniform
  int depth = 1;

  /// The middle-thirds system x/3, x/3 + 2/3 with equal weights.
  static AffineIFSSpec ternary(int depth);
};

/// Hull of the attractor, N^depth cylinders, gaps between them and the
/// self-similar measure with one atom per cylinder midpoint.
/// Throws Error(construction) when two first-level images overlap.
Construction build_ifs(const AffineIFSSpec& spec);

/// Solution s of Σ |r_i|^s = 1.
double similarity_dimension(const AffineIFSSpec& spec);

struct FatCantorSpec {
  std::function<double(int)> c;  // k -> c_k in (0, 1/2), k >= 1
  int depth = 1;

  /// c_k = 1/2 - 1/(2(k+2)^2).
  static double default_c(int k);
  static FatCantorSpec with_default_sequence(int depth);
};

struct FatCantorDiagnostics {
  double product = 1.0;        // Π_{k<=K} 2c_k, the Lebesgue measure of C_K
  double log_gap_ratio = 0.0;  // log(1 - 2c_K)/K
};

FatCantorDiagnostics fat_cantor_diagnostics(const FatCantorSpec& spec);

/// C_K: 2^K closed intervals of length Π c_i, gaps tagged by generation,
/// uniform measure at interval midpoints.
Construction build_fat_cantor(const FatCantorSpec& spec);

/// Exponent correction θ(x) for gap counting on the fat Cantor set; defined
/// for x >= 1/(1 - 2c_1) and tending to 1.
double fat_cantor_theta(const FatCantorSpec& spec, double x);

struct FrostmanResult {
  double constant = 0.0;  // A
  Interval witness;
  bool resolution_limited = false;  // the maximiser is a single atom
};

/// max λ(I)/|I|^s over intervals covering consecutive atom ranges. Each atom
/// stands for a cell of width resolution(), so the interval for atoms i..j
/// has length x_j - x_i + resolution().
FrostmanResult frostman_check(const DiscreteMeasure& measure, double s);

struct TranslationResult {
  double t = 0.0;
  double mass = 0.0;  // μ_t(C_K) before renormalisation
  DiscreteMeasure restricted;
};

/// Grid scan for the translate of `mu` carrying the most mass into the set
/// described by `set`. Ties go to the smallest t. Throws
/// Error(no_intersection) if every translate misses the set.
TranslationResult translate_intersect(const DiscreteMeasure& mu, const GapSet& set,
                                      std::span<const double> t_grid, unsigned workers = 1);

/// t values with spacing mu.resolution() covering every translate that can
/// touch the hull of `set`.
std::vector<double> default_translation_grid(const DiscreteMeasure& mu, const GapSet& set);

/// Image measure under a strictly increasing map. Throws
/// Error(map_not_increasing) if the image positions are not increasing.
DiscreteMeasure pushforward(const DiscreteMeasure& measure,
                            const std::function<double(double)>& map);

/// Uniform atoms at the midpoints of n equal cells of [lo, hi].
DiscreteMeasure uniform_grid_measure(double lo, double hi, std::size_t n);

/// One atom per connected component of hull minus gaps, equal weights.
DiscreteMeasure component_measure(const GapSet& gaps);

}  // namespace salem
