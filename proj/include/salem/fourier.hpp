#pragma once

// Fourier transforms of discrete measures, μ̂(ξ) = Σ w_k e(-ξ x_k) with
// e(y) = exp(2πiy), decay-exponent estimation from dyadic band maxima, and
// Monte-Carlo moments of randomly pushed measures.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "salem/bump.hpp"
#include "salem/geometry.hpp"
#include "salem/measures.hpp"
#include "salem/randmap.hpp"

namespace salem {

/// xi_max_valid = 1 / (kWindowDivisor · resolution). Above that frequency
/// the atomic approximation no longer tracks the continuum measure.
inline constexpr double kWindowDivisor = 32.0;

double frequency_window(double resolution) noexcept;

struct Spectrum {
  std::vector<double> xi;
  std::vector<std::complex<double>> values;
  double xi_max_valid = 0.0;

  std::size_t size() const noexcept { return xi.size(); }
};

/// Direct summation, compensated, atoms in order for each frequency.
/// Frequencies are processed in fixed blocks; within a block that forms an
/// arithmetic progression the phases advance by complex rotation. Output is
/// independent of `workers`.
Spectrum transform(const DiscreteMeasure& measure, std::span<const double> xi,
                   unsigned workers = 1);

/// transform(pushforward(measure, sample), xi) without building the
/// intermediate measure.
Spectrum spectrum_of_pushforward(const DiscreteMeasure& measure, const RandomMapSample& sample,
                                 std::span<const double> xi, unsigned workers = 1);

struct BandMax {
  int j = 0;               // band [2^j, 2^{j+1})
  double max_abs = 0.0;
  double argmax = 0.0;
  std::size_t points = 0;
};

/// Max |μ̂| over the frequencies of each dyadic band; empty bands omitted.
/// Frequencies below 1 belong to no band.
std::vector<BandMax> dyadic_band_maxima(const Spectrum& spectrum);

struct DecayFit {
  std::vector<BandMax> bands;  // bands used by the fit
  double slope = 0.0;          // of log2(band max) against j
  double intercept = 0.0;
  double s_raw = 0.0;          // -2 · slope
  double s_hat = 0.0;          // s_raw clamped to [0, 1]
  double residual = 0.0;       // RMS of the fit
  double xi_max_valid = 0.0;
};

/// Least squares on log2 of the band maxima for j in [j_min, j_max], keeping
/// only non-empty bands with 2^{j+1} <= xi_max_valid and a positive maximum.
/// Throws Error(insufficient_data) with fewer than 4 usable bands.
DecayFit estimate_fourier_dim(const Spectrum& spectrum, int j_min, int j_max);

/// `points_per_band` evenly spaced frequencies 2^j (1 + i/P) in each band
/// j_min..j_max whose upper edge does not exceed `xi_cap`.
std::vector<double> dyadic_grid(int j_min, int j_max, int points_per_band,
                                double xi_cap = std::numeric_limits<double>::infinity());

/// Same bands with a fixed spacing (at least one point per band).
std::vector<double> dyadic_grid_spacing(int j_min, int j_max, double spacing,
                                        double xi_cap = std::numeric_limits<double>::infinity());

struct MomentRow {
  double xi = 0.0;
  int q = 1;
  double mean = 0.0;    // empirical E|μ̂_ω(ξ)|^{2q}
  double std_error = 0.0;
  std::size_t n = 0;
};

struct MomentSlope {
  int q = 1;
  double slope = 0.0;  // of log2(mean) against log2(ξ)
  double intercept = 0.0;
  std::size_t points = 0;
};

struct MomentScan {
  std::vector<MomentRow> rows;  // ordered by q, then ξ
  std::vector<MomentSlope> slopes;
};

struct MomentScanConfig {
  std::vector<int> q;
  std::vector<double> xi;
  std::size_t n_samples = 2;
  std::uint64_t seed = 1;
  WidthLaw law = WidthLaw::uniform;
  unsigned workers = 1;
};

/// Sample i uses seed derive_seed(seed, i). Samples run in parallel; the
/// reduction is in sample order.
MomentScan moment_scan(std::shared_ptr<const GapSet> gaps,
                       std::shared_ptr<const PerturbationSchedule> schedule,
                       const DiscreteMeasure& measure, const BumpFunction& bump,
                       const MomentScanConfig& config);

}  // namespace salem
