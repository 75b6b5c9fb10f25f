#include <doctest.h>

#include <cmath>
#include <vector>

#include "salem/count_bound.hpp"
#include "salem/error.hpp"
#include "salem/measures.hpp"

using namespace salem;

namespace {

const double kDim = std::log(2.0) / std::log(3.0);

// Independent count: gaps inside J with length at least 1/x.
std::size_t brute_raw(const GapSet& gaps, const Interval& j, double x) {
  std::size_t n = 0;
  for (const Gap& g : gaps.gaps()) {
    if (j.lo <= g.span.lo && g.span.hi <= j.hi && g.length() * x >= 1.0 - 1e-12) ++n;
  }
  return n;
}

std::vector<Interval> pieces_up_to(const Construction& c, std::size_t depth) {
  std::vector<Interval> out;
  for (std::size_t k = 0; k <= depth && k < c.pieces.size(); ++k) {
    out.insert(out.end(), c.pieces[k].begin(), c.pieces[k].end());
  }
  return out;
}

}  // namespace

TEST_CASE("raw mode on ternary depth 10 certifies a positive slope") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(10));
  const std::vector<Interval> j_grid{{0.0, 1.0}};
  std::vector<double> x_grid;
  for (int k = 0; k <= 10; ++k) x_grid.push_back(std::pow(3.0, k));
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  opt.s = kDim;
  const CountBoundReport r = verify_count_bound(c.gaps, nullptr, c.measure, j_grid, x_grid, opt);
  CHECK(r.feasible);
  CHECK(r.b > 0.0);
  CHECK(r.violations.empty());
  CHECK(r.evaluated == x_grid.size());
  // Re-check every point against the brute-force count.
  for (double x : x_grid) {
    const double abscissa = kDim * std::log(x);
    CHECK(static_cast<double>(brute_raw(c.gaps, {0.0, 1.0}, x)) >= r.a + r.b * abscissa - 1e-9);
  }
}

TEST_CASE("schedule mode on cylinders, re-checked by brute force") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(9));
  const PerturbationSchedule schedule = build_schedule(c.gaps, 1, 1.0);
  const std::vector<Interval> j_grid = pieces_up_to(c, 4);
  const std::vector<double> x_grid = geometric_x_grid(1.0, 15);
  CountBoundOptions opt;
  opt.s = kDim / 2.0 - 0.02;
  const CountBoundReport r = verify_count_bound(c.gaps, &schedule, c.measure, j_grid, x_grid, opt);
  CHECK(r.feasible);
  CHECK(r.violations.empty());
  CHECK(r.evaluated == j_grid.size() * x_grid.size());
  for (const Interval& j : j_grid) {
    for (double x : x_grid) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < c.gaps.size(); ++i) {
        const Gap& g = c.gaps[i];
        if (j.lo <= g.span.lo && g.span.hi <= j.hi && schedule.delta[i] * x >= 1.0 - 1e-12) ++count;
      }
      const double abscissa = std::log(c.measure.mass(j)) + opt.s * std::log(x);
      CHECK(static_cast<double>(count) >= r.a + r.b * abscissa - 1e-9);
    }
  }
  // The certified line touches the zero-count frontier.
  CHECK(r.a + r.b * r.frontier == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("single gap below every threshold is degenerate") {
  const GapSet gaps({0.0, 1.0}, {{{0.45, 0.55}, 1}});
  const DiscreteMeasure mu = uniform_grid_measure(0.0, 1.0, 64);
  const std::vector<Interval> j_grid{{0.0, 1.0}, {0.0, 0.5}};
  const std::vector<double> x_grid{1.0, 2.0, 4.0};
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  opt.s = 1.0;
  const CountBoundReport r = verify_count_bound(gaps, nullptr, mu, j_grid, x_grid, opt);
  CHECK(r.degenerate);
  CHECK(!r.feasible);
  CHECK(r.a <= 0.0);
}

TEST_CASE("a fixed slope that is too steep reports violations") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(8));
  const std::vector<Interval> j_grid{{0.0, 1.0}};
  std::vector<double> x_grid;
  for (int k = 0; k <= 8; ++k) x_grid.push_back(std::pow(3.0, k));
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  opt.s = kDim;
  opt.fixed_b = 1e3;
  const CountBoundReport r = verify_count_bound(c.gaps, nullptr, c.measure, j_grid, x_grid, opt);
  CHECK(r.b == 1e3);
  CHECK(!r.violations.empty());
  CHECK(!r.feasible);
}

TEST_CASE("count bound argument errors") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(4));
  const std::vector<Interval> j_grid{{0.0, 1.0}};
  const std::vector<double> bad_x{0.5, 2.0};
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  CHECK_THROWS_AS(verify_count_bound(c.gaps, nullptr, c.measure, j_grid, bad_x, opt), Error);
  opt.mode = CountMode::schedule;
  const std::vector<double> x{2.0};
  CHECK_THROWS_AS(verify_count_bound(c.gaps, nullptr, c.measure, j_grid, x, opt), Error);
}

TEST_CASE("intervals of zero mass are skipped") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(6));
  const std::vector<Interval> j_grid{{0.0, 1.0}, {0.4, 0.6}};
  const std::vector<double> x_grid = geometric_x_grid(1.0, 12);
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  opt.s = kDim;
  const CountBoundReport r = verify_count_bound(c.gaps, nullptr, c.measure, j_grid, x_grid, opt);
  CHECK(r.skipped.size() == x_grid.size());
  CHECK(r.evaluated == x_grid.size());
}

TEST_CASE("fat Cantor in raw mode with the θ correction") {
  const FatCantorSpec spec = FatCantorSpec::with_default_sequence(12);
  const Construction c = build_fat_cantor(spec);
  const double x0 = 1.0 / (1.0 - 2.0 * spec.c(1));
  std::vector<double> x_grid;
  for (double x : geometric_x_grid(1.0, 21)) {
    if (x >= x0) x_grid.push_back(x);
  }
  CountBoundOptions opt;
  opt.mode = CountMode::raw;
  opt.s = 1.0;
  opt.theta = [spec](double x) { return fat_cantor_theta(spec, x); };
  const CountBoundReport r = verify_count_bound(c.gaps, nullptr, c.measure, pieces_up_to(c, 6), x_grid, opt);
  CHECK(r.feasible);
  CHECK(r.violations.empty());
}

TEST_CASE("geometric x grid") {
  const auto g = geometric_x_grid(3.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 3.0);
  CHECK(g[3] == 24.0);
}
