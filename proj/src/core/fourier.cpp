#include "salem/fourier.hpp"

#include <algorithm>
#include <cmath>

#include "salem/error.hpp"
#include "salem/numeric.hpp"
#include "salem/parallel.hpp"
#include "salem/rng.hpp"

namespace salem {

namespace {

// Frequencies are cut into blocks of this size regardless of the worker
// count; the rotation recurrence restarts at each block.
constexpr std::size_t kBlock = 64;

// A block counts as arithmetic when every frequency matches ξ_0 + iΔ to a
// few ulps, i.e. to the rounding already present in ξ·x.
constexpr double kArithmeticRelTol = 4.0 * 0x1.0p-52;

bool is_arithmetic(std::span<const double> xi) {
  if (xi.size() < 3) return false;
  const double step = xi[1] - xi[0];
  if (!(step > 0.0)) return false;
  for (std::size_t i = 2; i < xi.size(); ++i) {
    const double expected = xi[0] + static_cast<double>(i) * step;
    if (std::abs(xi[i] - expected) > kArithmeticRelTol * std::max(1.0, std::abs(xi[i]))) {
      return false;
    }
  }
  return true;
}

void transform_block(std::span<const double> pos, std::span<const double> w,
                     std::span<const double> xi, std::span<std::complex<double>> out) {
  const std::size_t n = xi.size();
  if (is_arithmetic(xi)) {
    const double step = xi[1] - xi[0];
    std::vector<CompensatedSum> re(n);
    std::vector<CompensatedSum> im(n);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      std::complex<double> z = w[k] * unit_phase(xi[0] * pos[k]);
      const std::complex<double> rot = unit_phase(step * pos[k]);
      for (std::size_t i = 0; i < n; ++i) {
        re[i].add(z.real());
        im[i].add(z.imag());
        z *= rot;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = {re[i].value(), im[i].value()};
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedComplexSum acc;
    for (std::size_t k = 0; k < pos.size(); ++k) acc.add(w[k] * unit_phase(xi[i] * pos[k]));
    out[i] = acc.value();
  }
}

std::vector<std::complex<double>> transform_atoms(std::span<const double> pos,
                                                  std::span<const double> w,
                                                  std::span<const double> xi, unsigned workers) {
  std::vector<std::complex<double>> values(xi.size());
  const std::size_t blocks = (xi.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    const std::size_t count = std::min(kBlock, xi.size() - first);
    transform_block(pos, w, xi.subspan(first, count),
                    std::span(values).subspan(first, count));
  });
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (xi[i] == 0.0) {
      values[i] = {1.0, 0.0};
      continue;
    }
    const double mag = std::abs(values[i]);
    if (mag > 1.0) values[i] /= mag;
  }
  return values;
}

void split_atoms(const DiscreteMeasure& measure, std::vector<double>& pos,
                 std::vector<double>& w) {
  pos.resize(measure.size());
  w.resize(measure.size());
  const auto atoms = measure.atoms();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    pos[k] = atoms[k].position;
    w[k] = atoms[k].weight;
  }
}

/// Positions and resolution of the image measure, matching pushforward().
double push_positions(const DiscreteMeasure& measure, const RandomMapSample& sample,
                      std::vector<double>& pos) {
  const auto atoms = measure.atoms();
  pos.resize(atoms.size());
  double stretch = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    pos[k] = sample.eval(atoms[k].position);
    if (k > 0) {
      if (!(pos[k - 1] < pos[k])) {
        fail(ErrorKind::map_not_increasing, "image positions not increasing");
      }
      stretch = std::max(stretch, (pos[k] - pos[k - 1]) /
                                      (atoms[k].position - atoms[k - 1].position));
    }
  }
  if (atoms.size() == 1) stretch = 1.0;
  return measure.resolution() * stretch;
}

int band_of(double xi) {
  int exp = 0;
  std::frexp(xi, &exp);  // xi = m · 2^exp with m in [1/2, 1)
  return exp - 1;
}

}  // namespace

double frequency_window(double resolution) noexcept {
  return 1.0 / (kWindowDivisor * resolution);
}

Spectrum transform(const DiscreteMeasure& measure, std::span<const double> xi,
                   unsigned workers) {
  std::vector<double> pos;
  std::vector<double> w;
  split_atoms(measure, pos, w);
  Spectrum out;
  out.xi.assign(xi.begin(), xi.end());
  out.values = transform_atoms(pos, w, xi, workers);
  out.xi_max_valid = frequency_window(measure.resolution());
  return out;
}

Spectrum spectrum_of_pushforward(const DiscreteMeasure& measure, const RandomMapSample& sample,
                                 std::span<const double> xi, unsigned workers) {
  std::vector<double> pos;
  std::vector<double> w;
  split_atoms(measure, pos, w);
  const double resolution = push_positions(measure, sample, pos);
  Spectrum out;
  out.xi.assign(xi.begin(), xi.end());
  out.values = transform_atoms(pos, w, xi, workers);
  out.xi_max_valid = frequency_window(resolution);
  return out;
}

std::vector<BandMax> dyadic_band_maxima(const Spectrum& spectrum) {
  std::vector<BandMax> bands;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double xi = spectrum.xi[i];
    if (!(xi >= 1.0)) continue;
    if (i > 0 && spectrum.xi[i - 1] > xi) {
      fail(ErrorKind::parameter, "band maxima need frequencies in increasing order");
    }
    const int j = band_of(xi);
    const double mag = std::abs(spectrum.values[i]);
    if (bands.empty() || bands.back().j != j) bands.push_back({j, mag, xi, 0});
    BandMax& band = bands.back();
    ++band.points;
    if (mag > band.max_abs) {
      band.max_abs = mag;
      band.argmax = xi;
    }
  }
  return bands;
}

DecayFit estimate_fourier_dim(const Spectrum& spectrum, int j_min, int j_max) {
  DecayFit fit;
  fit.xi_max_valid = spectrum.xi_max_valid;
  for (const BandMax& band : dyadic_band_maxima(spectrum)) {
    if (band.j < j_min || band.j > j_max) continue;
    if (std::ldexp(1.0, band.j + 1) > spectrum.xi_max_valid) continue;
    if (!(band.max_abs > 0.0)) continue;
    fit.bands.push_back(band);
  }
  if (fit.bands.size() < 4) {
    fail(ErrorKind::insufficient_data,
         "decay fit needs at least 4 non-empty bands inside the frequency window, found " +
             std::to_string(fit.bands.size()));
  }
  std::vector<double> x;
  std::vector<double> y;
  for (const BandMax& band : fit.bands) {
    x.push_back(band.j);
    y.push_back(std::log2(band.max_abs));
  }
  const LineFit line = fit_line(x, y);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.residual = line.rms_residual;
  fit.s_raw = -2.0 * line.slope;
  fit.s_hat = std::clamp(fit.s_raw, 0.0, 1.0);
  return fit;
}

std::vector<double> dyadic_grid(int j_min, int j_max, int points_per_band, double xi_cap) {
  if (points_per_band < 1) fail(ErrorKind::parameter, "points per band must be >= 1");
  std::vector<double> grid;
  for (int j = j_min; j <= j_max; ++j) {
    const double lo = std::ldexp(1.0, j);
    if (2.0 * lo > xi_cap) break;
    for (int i = 0; i < points_per_band; ++i) {
      grid.push_back(lo + lo * static_cast<double>(i) / points_per_band);
    }
  }
  return grid;
}

std::vector<double> dyadic_grid_spacing(int j_min, int j_max, double spacing, double xi_cap) {
  if (!(spacing > 0.0)) fail(ErrorKind::parameter, "grid spacing must be positive");
  std::vector<double> grid;
  for (int j = j_min; j <= j_max; ++j) {
    const double lo = std::ldexp(1.0, j);
    if (2.0 * lo > xi_cap) break;
    const auto count = std::max<long long>(1, static_cast<long long>(std::ceil(lo / spacing)));
    const double step = lo / static_cast<double>(count);
    for (long long i = 0; i < count; ++i) grid.push_back(lo + step * static_cast<double>(i));
  }
  return grid;
}

MomentScan moment_scan(std::shared_ptr<const GapSet> gaps,
                       std::shared_ptr<const PerturbationSchedule> schedule,
                       const DiscreteMeasure& measure, const BumpFunction& bump,
                       const MomentScanConfig& config) {
  if (config.n_samples < 2) fail(ErrorKind::parameter, "moment scan needs n_samples >= 2");
  for (int q : config.q) {
    if (q < 1) fail(ErrorKind::parameter, "moment orders q must be positive");
  }
  const std::size_t n_xi = config.xi.size();
  std::vector<double> w;
  std::vector<double> base_pos;
  split_atoms(measure, base_pos, w);

  // squared[i * n_xi + j] = |μ̂_{ω_i}(ξ_j)|^2
  std::vector<double> squared(config.n_samples * n_xi);
  parallel_for(config.n_samples, config.workers, [&](std::size_t i) {
    const RandomMapSample sample = RandomMapSample::draw(
        gaps, schedule, config.law, derive_seed(config.seed, i), bump);
    std::vector<double> pos;
    push_positions(measure, sample, pos);
    const auto values = transform_atoms(pos, w, config.xi, 1);
    for (std::size_t j = 0; j < n_xi; ++j) squared[i * n_xi + j] = std::norm(values[j]);
  });

  MomentScan scan;
  const auto n = static_cast<double>(config.n_samples);
  for (int q : config.q) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t j = 0; j < n_xi; ++j) {
      CompensatedSum sum;
      for (std::size_t i = 0; i < config.n_samples; ++i) {
        sum.add(std::pow(squared[i * n_xi + j], q));
      }
      const double mean = sum.value() / n;
      CompensatedSum dev;
      for (std::size_t i = 0; i < config.n_samples; ++i) {
        const double d = std::pow(squared[i * n_xi + j], q) - mean;
        dev.add(d * d);
      }
      const double sd = std::sqrt(dev.value() / (n - 1.0));
      scan.rows.push_back({config.xi[j], q, mean, sd / std::sqrt(n), config.n_samples});
      if (config.xi[j] > 0.0 && mean > 0.0) {
        lx.push_back(std::log2(std::abs(config.xi[j])));
        ly.push_back(std::log2(mean));
      }
    }
    MomentSlope slope;
    slope.q = q;
    slope.points = lx.size();
    if (lx.size() >= 2) {
      const LineFit line = fit_line(lx, ly);
      slope.slope = line.slope;
      slope.intercept = line.intercept;
    }
    scan.slopes.push_back(slope);
  }
  return scan;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail(ErrorKind::insufficient_data, "line fit needs at least two points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::insufficient_data, "line fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / n);
  return fit;
}

}  // namespace salem
