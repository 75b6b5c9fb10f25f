// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. The optional argument is a scratch directory
// for pipeline runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "salem/bump.hpp"
#include "salem/count_bound.hpp"
#include "salem/experiment.hpp"
#include "salem/fourier.hpp"
#include "salem/geometry.hpp"
#include "salem/io.hpp"
#include "salem/measures.hpp"
#include "salem/randmap.hpp"
#include "salem/rng.hpp"

namespace {

using namespace salem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Ternary {
  std::shared_ptr<const GapSet> gaps;
  DiscreteMeasure measure;
  std::vector<std::vector<Interval>> pieces;
};

Ternary ternary(int depth) {
  Construction c = build_ifs(AffineIFSSpec::ternary(depth));
  return {std::make_shared<const GapSet>(std::move(c.gaps)), std::move(c.measure), std::move(c.pieces)};
}

std::shared_ptr<const PerturbationSchedule> schedule_for(const GapSet& gaps, int m, double alpha) {
  return std::make_shared<const PerturbationSchedule>(build_schedule(gaps, m, alpha));
}

const double kCantorDim = std::log(2.0) / std::log(3.0);

// |μ̂(ξ)| for the infinite middle-thirds measure: Π_k |cos(2πξ/3^k)|.
double cantor_oracle(double xi) {
  double p = 1.0;
  double scale = 1.0;
  for (int k = 1; k < 200; ++k) {
    scale /= 3.0;
    p *= std::abs(std::cos(2.0 * std::numbers::pi * xi * scale));
  }
  return p;
}

Outcome monotone(double& seconds) {
  const auto start = Clock::now();
  const Ternary t = ternary(12);
  const auto schedule = schedule_for(*t.gaps, 1, 1.0);
  const std::size_t n = 10000;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RandomMapSample f = RandomMapSample::draw(t.gaps, schedule, WidthLaw::uniform, seed,
                                                    BumpFunction::smoothstep(2));
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(n);
      worst = std::min(worst, f.derivative(x, 1));
    }
  }
  seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {worst >= 1.0 - 1e-12 && seconds < 30.0,
          "min f' = " + fmt(worst) + " over 100 seeds, " + fmt(seconds) + " s"};
}

Outcome modulus() {
  const auto start = Clock::now();
  const Ternary t = ternary(12);
  struct Case {
    int m;
    double alpha;
  };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{1, 1.0}, Case{1, 0.5}, Case{2, 0.0}}) {
    const auto schedule = schedule_for(*t.gaps, c.m, c.alpha);
    double worst = 0.0;
    double bound = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const RandomMapSample f = RandomMapSample::draw(t.gaps, schedule, WidthLaw::uniform, seed,
                                                      BumpFunction::smoothstep(c.m + 1));
      const ModulusReport r = modulus_check(f, 100000, derive_seed(seed, 7));
      ok = ok && r.pass && r.pairs == 100000;
      worst = std::max(worst, r.max_ratio);
      bound = r.bound;
    }
    detail += "(m=" + std::to_string(c.m) + ",a=" + fmt(c.alpha) + ") max " + fmt(worst) +
              " <= " + fmt(bound) + "; ";
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {ok && seconds < 120.0, detail + fmt(seconds) + " s"};
}

Outcome endpoints() {
  const Ternary t = ternary(12);
  const auto schedule = schedule_for(*t.gaps, 1, 1.0);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RandomMapSample f = RandomMapSample::draw(t.gaps, schedule, WidthLaw::uniform, seed,
                                                    BumpFunction::smoothstep(2));
    const Interval hull = t.gaps->hull();
    worst = std::max(worst, std::abs(f.eval(hull.lo) - f.eval_restricted(hull.lo)));
    worst = std::max(worst, std::abs(f.eval(hull.hi) - f.eval_restricted(hull.hi)));
    for (const Gap& g : t.gaps->gaps()) {
      for (const double x : {g.span.lo, g.span.hi}) {
        worst = std::max(worst, std::abs(f.eval(x) - f.eval_restricted(x)));
      }
    }
  }
  return {worst <= 1e-12, "max |f - f_E| = " + fmt(worst) + " over 100 seeds"};
}

Outcome lebesgue() {
  const auto start = Clock::now();
  const DiscreteMeasure mu = uniform_grid_measure(0.0, 1.0, std::size_t{1} << 14);
  const double window = frequency_window(mu.resolution());
  std::vector<double> xi;
  for (double x = 0.01; x <= window; x += 0.01) xi.push_back(x);
  const Spectrum spec = transform(mu, xi, hardware_workers());
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double x = spec.xi[i];
    const double sinc = std::abs(std::sin(std::numbers::pi * x) / (std::numbers::pi * x));
    worst = std::max(worst, std::abs(std::abs(spec.values[i]) - sinc));
  }
  const Spectrum fit_spec = transform(mu, dyadic_grid_spacing(4, 8, 0.5, window), hardware_workers());
  const DecayFit fit = estimate_fourier_dim(fit_spec, 4, 8);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  const bool ok = worst <= 2e-3 && fit.s_hat >= 0.85 && fit.s_hat <= 1.0 && seconds < 60.0;
  return {ok, "max error " + fmt(worst) + " on " + std::to_string(xi.size()) +
                  " frequencies up to " + fmt(window) + ", s_hat " + fmt(fit.s_hat) + ", " +
                  fmt(seconds) + " s"};
}

Outcome cantor() {
  const Ternary t = ternary(14);
  const double window = frequency_window(t.measure.resolution());
  std::vector<double> powers;
  for (double p = 1.0; p <= window; p *= 3.0) powers.push_back(p);
  const Spectrum spec = transform(t.measure, powers, hardware_workers());
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    worst = std::max(worst, std::abs(std::abs(spec.values[i]) - cantor_oracle(spec.xi[i])));
  }
  const Spectrum fit_spec =
      transform(t.measure, dyadic_grid_spacing(6, 16, 0.5, window), hardware_workers());
  const DecayFit fit = estimate_fourier_dim(fit_spec, 6, 16);
  return {worst <= 1e-3 && fit.s_hat <= 0.05,
          "oracle " + fmt(cantor_oracle(1.0)) + ", max error " + fmt(worst) + " at " +
              std::to_string(powers.size()) + " powers of 3, s_hat " + fmt(fit.s_hat)};
}

Outcome psi_bound() {
  const Ternary t = ternary(12);
  const auto schedule = schedule_for(*t.gaps, 1, 1.0);
  std::vector<Interval> j_grid;
  for (int k = 0; k <= 6; ++k) j_grid.insert(j_grid.end(), t.pieces[k].begin(), t.pieces[k].end());
  CountBoundOptions options;
  options.mode = CountMode::schedule;
  options.s = kCantorDim / 2.0 - 0.02;
  const CountBoundReport r = verify_count_bound(*t.gaps, schedule.get(), t.measure, j_grid,
                                                geometric_x_grid(1.0, 21), options);
  return {r.feasible && r.b > 0.0 && r.violations.empty(),
          "a = " + fmt(r.a) + ", b = " + fmt(r.b) + ", " + std::to_string(r.violations.size()) +
              " violations over " + std::to_string(r.evaluated) + " points"};
}

Outcome moments() {
  const auto start = Clock::now();
  const Ternary t = ternary(12);
  const auto schedule = schedule_for(*t.gaps, 1, 1.0);
  MomentScanConfig config;
  config.q = {1, 2};
  for (int j = 6; j <= 16; ++j) config.xi.push_back(std::ldexp(1.0, j));
  config.n_samples = 200;
  config.seed = 1;
  config.workers = hardware_workers();
  const MomentScan scan = moment_scan(t.gaps, schedule, t.measure, BumpFunction::smoothstep(2), config);
  const double s_prime = kCantorDim / 2.0;
  bool ok = scan.slopes.size() == 2;
  std::string detail;
  for (const MomentSlope& slope : scan.slopes) {
    const double limit = -(s_prime * slope.q - 1.0) + 0.5;
    ok = ok && slope.slope <= limit;
    detail += "q=" + std::to_string(slope.q) + " slope " + fmt(slope.slope) + " <= " + fmt(limit) + "; ";
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {ok && seconds < 600.0, detail + fmt(seconds) + " s"};
}

Outcome improvement() {
  const Ternary t = ternary(12);
  const auto schedule = schedule_for(*t.gaps, 1, 1.0);
  const RunConfig defaults;
  const double window = frequency_window(t.measure.resolution());
  const std::vector<double> xi =
      dyadic_grid_spacing(defaults.j_min, defaults.j_max, defaults.xi_spacing, window);
  const double base = estimate_fourier_dim(transform(t.measure, xi, hardware_workers()),
                                           defaults.j_min, defaults.j_max).s_hat;
  int improved = 0;
  double sum = 0.0;
  double lowest = 1.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RandomMapSample f = RandomMapSample::draw(t.gaps, schedule, WidthLaw::uniform, seed,
                                                    BumpFunction::smoothstep(2));
    const double s_hat = estimate_fourier_dim(spectrum_of_pushforward(t.measure, f, xi, hardware_workers()),
                                              defaults.j_min, defaults.j_max).s_hat;
    if (s_hat - base >= 0.15) ++improved;
    sum += s_hat;
    lowest = std::min(lowest, s_hat);
  }
  const double mean = sum / 100.0;
  const double target = kCantorDim / 2.0 - 0.15;
  return {improved >= 90 && mean >= target,
          "base s_hat " + fmt(base) + ", " + std::to_string(improved) +
              "/100 seeds improve by >= 0.15, mean " + fmt(mean) + " (need " + fmt(target) +
              "), min " + fmt(lowest)};
}

Outcome fat_cantor() {
  const int depth = 12;
  const FatCantorSpec spec = FatCantorSpec::with_default_sequence(depth);
  const Construction c = build_fat_cantor(spec);
  double product = 1.0;
  for (int k = 1; k <= depth; ++k) product *= 1.0 - 1.0 / ((k + 2.0) * (k + 2.0));
  double gap_total = 0.0;
  for (const Gap& g : c.gaps.gaps()) gap_total += g.length();
  const double lebesgue = c.gaps.hull().length() - gap_total;
  const std::size_t expected = (std::size_t{1} << depth) - 1;

  // The first-generation gap is the widest one.
  const Gap* central = &c.gaps[0];
  for (const Gap& g : c.gaps.gaps()) {
    if (g.length() > central->length()) central = &g;
  }
  const Interval inner{central->span.lo + 0.1 * central->length(),
                       central->span.hi - 0.1 * central->length()};
  const DiscreteMeasure mu = uniform_grid_measure(inner.lo, inner.hi, 256);
  const TranslationResult tr =
      translate_intersect(mu, c.gaps, default_translation_grid(mu, c.gaps), hardware_workers());

  const bool ok = c.gaps.size() == expected && std::abs(lebesgue - product) <= 1e-12 &&
                  std::abs(c.measure.total_mass() - 1.0) <= 1e-12 && tr.mass > 0.0;
  return {ok, std::to_string(c.gaps.size()) + " gaps, Lebesgue mass " + fmt(lebesgue) +
                  " vs product " + fmt(product) + " (diff " + fmt(std::abs(lebesgue - product)) +
                  "), t = " + fmt(tr.t) + " keeps mass " + fmt(tr.mass)};
}

Outcome determinism(const std::filesystem::path& scratch) {
  std::string reports[2];
  const unsigned workers[2] = {1, 8};
  for (int i = 0; i < 2; ++i) {
    RunConfig config;
    config.seed = 7;
    config.n_samples = 40;
    config.modulus_pairs = 20000;
    config.workers = workers[i];
    config.output = (scratch / ("pipeline-j" + std::to_string(workers[i]))).string();
    const CommandResult r = run_command(config, "pipeline");
    if (r.exit_code != kExitPass) return {false, "pipeline exit " + std::to_string(r.exit_code) + ": " + r.message};
    reports[i] = read_file(config.output + "/report.json");
  }
  return {!reports[0].empty() && reports[0] == reports[1],
          "report.json " + std::to_string(reports[0].size()) + " bytes, sha256 " +
              sha256_hex(reports[0]).substr(0, 16) + (reports[0] == reports[1] ? " identical" : " differs")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path scratch = argc > 1 ? argv[1] : "acceptance-runs";
  double monotone_seconds = 0.0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"monotone diffeomorphism", [&] { return monotone(monotone_seconds); }},
      {"modulus bound", modulus},
      {"restricted/extended agreement", endpoints},
      {"Lebesgue transform oracle", lebesgue},
      {"Cantor non-decay", cantor},
      {"psi-bound feasibility", psi_bound},
      {"moment trend", moments},
      {"random-image decay improvement", improvement},
      {"fat Cantor construction", fat_cantor},
      {"pipeline determinism", [&] { return determinism(scratch); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, checks.size());
  return failed == 0 ? 0 : 1;
}
