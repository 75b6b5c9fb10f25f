#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "salem/error.hpp"
#include "salem/fourier.hpp"
#include "salem/measures.hpp"
#include "salem/numeric.hpp"

using namespace salem;

namespace {

// Plain long-double DFT, no compensation and no phase recurrence.
std::complex<long double> naive(const DiscreteMeasure& m, double xi) {
  std::complex<long double> sum = 0;
  const long double two_pi = 6.283185307179586476925286766559L;
  for (const Atom& a : m.atoms()) {
    const long double phase = -two_pi * static_cast<long double>(xi) * a.position;
    sum += static_cast<long double>(a.weight) * std::complex<long double>(std::cos(phase), std::sin(phase));
  }
  return sum;
}

// |Π_{j=1..depth} cos(2π ξ / 3^j)|.
double cantor_oracle(double xi, int depth = 200) {
  long double prod = 1.0L;
  long double scale = 1.0L;
  for (int j = 1; j <= depth; ++j) {
    scale /= 3.0L;
    prod *= std::cos(6.283185307179586476925286766559L * xi * scale);
  }
  return static_cast<double>(std::fabs(prod));
}

Spectrum synthetic(const std::vector<double>& xi, double (*f)(double)) {
  Spectrum s;
  for (double x : xi) {
    s.xi.push_back(x);
    s.values.emplace_back(f(x), 0.0);
  }
  s.xi_max_valid = 1e300;
  return s;
}

struct Setup {
  Construction c;
  std::shared_ptr<const GapSet> gaps;
  std::shared_ptr<const PerturbationSchedule> schedule;
};

Setup ternary(int depth) {
  Setup s{build_ifs(AffineIFSSpec::ternary(depth)), nullptr, nullptr};
  s.gaps = std::make_shared<const GapSet>(s.c.gaps);
  s.schedule = std::make_shared<const PerturbationSchedule>(build_schedule(*s.gaps, 1, 1.0));
  return s;
}

}  // namespace

TEST_CASE("transform: closed forms") {
  const DiscreteMeasure one({{0.0, 1.0}}, 1e-3);
  const std::vector<double> xi{0.0, 0.7, 13.25, 1000.5};
  for (const auto& v : transform(one, xi).values) CHECK(std::abs(v) == doctest::Approx(1.0));

  const DiscreteMeasure two({{0.0, 0.5}, {1.0, 0.5}}, 1e-3);
  const Spectrum s = transform(two, xi);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    CHECK(std::abs(std::abs(s.values[i]) - std::abs(std::cos(kPi * xi[i]))) < 1e-12);
  }
}

TEST_CASE("transform agrees with a naive long-double sum") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(9));
  const std::vector<double> xi = dyadic_grid(0, 8, 100);
  const Spectrum s = transform(c.measure, xi, 3);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto ref = naive(c.measure, xi[i]);
    CHECK(std::abs(s.values[i].real() - static_cast<double>(ref.real())) < 1e-12);
    CHECK(std::abs(s.values[i].imag() - static_cast<double>(ref.imag())) < 1e-12);
  }
}

TEST_CASE("transform invariants: μ̂(0) = 1, |μ̂| <= 1, conjugate symmetry") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(7));
  std::vector<double> xi{0.0};
  for (int i = 1; i <= 300; ++i) xi.push_back(i * 0.731);
  std::vector<double> neg;
  for (double x : xi) neg.push_back(-x);
  const Spectrum s = transform(c.measure, xi);
  const Spectrum sn = transform(c.measure, neg);
  CHECK(s.values[0] == std::complex<double>(1.0, 0.0));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    CHECK(std::abs(s.values[i]) <= 1.0);
    CHECK(std::abs(s.values[i] - std::conj(sn.values[i])) < 1e-12);
  }
}

TEST_CASE("transform output does not depend on the worker count") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(8));
  const std::vector<double> xi = dyadic_grid_spacing(2, 9, 0.37);
  const Spectrum a = transform(c.measure, xi, 1);
  for (unsigned w : {2u, 5u, 8u}) {
    const Spectrum b = transform(c.measure, xi, w);
    for (std::size_t i = 0; i < xi.size(); ++i) CHECK(a.values[i] == b.values[i]);
  }
}

TEST_CASE("Cantor measure at ξ = 3^n matches the product oracle") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(12));
  CHECK(cantor_oracle(1.0) == doctest::Approx(0.3714373567).epsilon(1e-9));
  std::vector<double> xi;
  for (double x = 1.0; x <= 1e4; x *= 3.0) xi.push_back(x);
  const Spectrum s = transform(c.measure, xi);
  // Midpoint atoms at depth K give exactly the product truncated at K.
  for (std::size_t i = 0; i < xi.size(); ++i) {
    CHECK(std::abs(std::abs(s.values[i]) - cantor_oracle(xi[i], 12)) < 1e-12);
  }
}

TEST_CASE("band maxima") {
  const Spectrum constant = synthetic(dyadic_grid(0, 10, 16), [](double) { return 0.3; });
  for (const BandMax& b : dyadic_band_maxima(constant)) CHECK(b.max_abs == 0.3);

  const Spectrum power = synthetic(dyadic_grid(0, 12, 512), [](double x) { return 1.0 / std::sqrt(x); });
  for (const BandMax& b : dyadic_band_maxima(power)) {
    CHECK(b.max_abs == doctest::Approx(std::pow(2.0, -b.j / 2.0)).epsilon(1e-12));
    CHECK(b.argmax == std::ldexp(1.0, b.j));
  }

  const Spectrum single = synthetic({3.0, 5.0, 9.0}, [](double x) { return 1.0 / x; });
  const auto bands = dyadic_band_maxima(single);
  REQUIRE(bands.size() == 3);
  CHECK(bands[0].j == 1);
  CHECK(bands[1].max_abs == 0.2);
  CHECK(bands[2].points == 1);
}

TEST_CASE("decay fits on synthetic spectra") {
  const Spectrum power = synthetic(dyadic_grid(0, 12, 8), [](double x) { return 1.0 / std::sqrt(x); });
  const DecayFit f = estimate_fourier_dim(power, 0, 12);
  CHECK(f.s_raw == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.s_hat == doctest::Approx(1.0).epsilon(1e-12));

  const Spectrum constant = synthetic(dyadic_grid(0, 12, 8), [](double) { return 0.37; });
  CHECK(estimate_fourier_dim(constant, 0, 12).s_hat == 0.0);

  const Spectrum fast = synthetic(dyadic_grid(0, 12, 8), [](double x) { return 1.0 / x; });
  const DecayFit ff = estimate_fourier_dim(fast, 0, 12);
  CHECK(ff.s_raw == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ff.s_hat == 1.0);

  CHECK_THROWS_AS(estimate_fourier_dim(power, 0, 2), Error);
}

TEST_CASE("decay fit drops bands beyond the window") {
  Spectrum s = synthetic(dyadic_grid(0, 12, 8), [](double x) { return 1.0 / std::sqrt(x); });
  s.xi_max_valid = 512.0;
  const DecayFit f = estimate_fourier_dim(s, 0, 12);
  for (const BandMax& b : f.bands) CHECK(std::ldexp(2.0, b.j) <= 512.0);
  CHECK(f.bands.back().j == 8);
}

TEST_CASE("s_hat for the Lebesgue proxy") {
  const DiscreteMeasure leb = uniform_grid_measure(0.0, 1.0, 1 << 14);
  const Spectrum s =
      transform(leb, dyadic_grid_spacing(4, 12, 0.25, frequency_window(leb.resolution())));
  const DecayFit f = estimate_fourier_dim(s, 4, 12);
  CHECK(f.s_hat >= 0.85);
  CHECK(f.s_hat <= 1.0);
}

TEST_CASE("grids") {
  const auto g = dyadic_grid(3, 5, 4);
  CHECK(g.size() == 12);
  CHECK(g.front() == 8.0);
  CHECK(g[1] == 10.0);
  CHECK(dyadic_grid(3, 5, 4, 32.0).size() == 8);
  CHECK(dyadic_grid_spacing(0, 3, 0.5).size() == 2 + 4 + 8 + 16);
}

TEST_CASE("pushforward spectrum equals the two-step path") {
  const Setup t = ternary(8);
  const auto f = RandomMapSample::draw(t.gaps, t.schedule, WidthLaw::uniform, 2, BumpFunction::smoothstep(2));
  std::vector<double> xi{0.0};
  for (double x : dyadic_grid(0, 9, 32)) xi.push_back(x);
  const Spectrum fused = spectrum_of_pushforward(t.c.measure, f, xi, 2);
  const DiscreteMeasure pushed = pushforward(t.c.measure, [&f](double x) { return f.eval(x); });
  const Spectrum plain = transform(pushed, xi, 1);
  CHECK(fused.values[0] == std::complex<double>(1.0, 0.0));
  CHECK(fused.xi_max_valid == plain.xi_max_valid);
  for (std::size_t i = 0; i < xi.size(); ++i) CHECK(std::abs(fused.values[i] - plain.values[i]) <= 1e-12);

  const auto identity = RandomMapSample::with_omega(
      t.gaps, t.schedule, std::vector<double>(t.gaps->size(), 0.0), BumpFunction::smoothstep(2));
  const Spectrum id = spectrum_of_pushforward(t.c.measure, identity, xi);
  const Spectrum base = transform(t.c.measure, xi);
  for (std::size_t i = 0; i < xi.size(); ++i) CHECK(std::abs(id.values[i] - base.values[i]) <= 1e-12);
}

TEST_CASE("moment scan special cases") {
  MomentScanConfig cfg;
  cfg.q = {1, 2};
  cfg.xi = {0.5, 3.0, 17.0, 64.0};
  cfg.n_samples = 8;

  SUBCASE("no gaps: the map is the identity") {
    auto gaps = std::make_shared<const GapSet>(Interval{0.0, 1.0}, std::vector<Gap>{});
    auto schedule = std::make_shared<const PerturbationSchedule>(build_schedule(*gaps, 1, 1.0));
    const DiscreteMeasure leb = uniform_grid_measure(0.0, 1.0, 256);
    const MomentScan scan = moment_scan(gaps, schedule, leb, BumpFunction::smoothstep(2), cfg);
    const Spectrum s = transform(leb, cfg.xi);
    REQUIRE(scan.rows.size() == 8);
    for (const MomentRow& r : scan.rows) {
      const auto i = static_cast<std::size_t>(std::find(cfg.xi.begin(), cfg.xi.end(), r.xi) - cfg.xi.begin());
      CHECK(r.mean == doctest::Approx(std::pow(std::abs(s.values[i]), 2 * r.q)).epsilon(1e-12));
      CHECK(r.std_error <= 1e-15);
    }
  }
  SUBCASE("single atom: modulus one") {
    const Setup t = ternary(5);
    const DiscreteMeasure atom({{0.5, 1.0}}, 1e-3);
    const MomentScan scan = moment_scan(t.gaps, t.schedule, atom, BumpFunction::smoothstep(2), cfg);
    for (const MomentRow& r : scan.rows) CHECK(r.mean == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("moment scan is independent of the worker count") {
  const Setup t = ternary(7);
  MomentScanConfig cfg;
  cfg.q = {1, 2};
  cfg.xi = {64.0, 128.0, 256.0, 512.0};
  cfg.n_samples = 20;
  cfg.workers = 1;
  const MomentScan a = moment_scan(t.gaps, t.schedule, t.c.measure, BumpFunction::smoothstep(2), cfg);
  cfg.workers = 6;
  const MomentScan b = moment_scan(t.gaps, t.schedule, t.c.measure, BumpFunction::smoothstep(2), cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mean == b.rows[i].mean);
    CHECK(a.rows[i].std_error == b.rows[i].std_error);
  }
  for (std::size_t i = 0; i < a.slopes.size(); ++i) CHECK(a.slopes[i].slope == b.slopes[i].slope);
}

TEST_CASE("line fit") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.rms_residual < 1e-12);
}
