#include "salem/count_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salem/error.hpp"

namespace salem {

namespace {

constexpr double kSlackTol = 1e-9;

}  // namespace

CountBoundReport verify_count_bound(const GapSet& gaps, const PerturbationSchedule* schedule,
                                    const DiscreteMeasure& measure,
                                    std::span<const Interval> j_grid,
                                    std::span<const double> x_grid,
                                    const CountBoundOptions& options) {
  if (options.mode == CountMode::schedule && schedule == nullptr) {
    fail(ErrorKind::parameter, "schedule mode needs a perturbation schedule");
  }
  for (double x : x_grid) {
    if (!(x >= 1.0)) fail(ErrorKind::domain, "count bound grid requires x >= 1");
  }

  CountBoundReport report;
  std::vector<CountBoundPoint> points;
  points.reserve(j_grid.size() * x_grid.size());
  for (const Interval& j : j_grid) {
    const double lambda = measure.mass(j);
    if (!(lambda > 0.0)) {
      for (double x : x_grid) report.skipped.emplace_back(j, x);
      continue;
    }
    const double log_mass = std::log(lambda);
    for (double x : x_grid) {
      const double theta = options.theta ? options.theta(x) : 1.0;
      CountBoundPoint p;
      p.j = j;
      p.x = x;
      p.log_mass = log_mass;
      p.abscissa = log_mass + options.s * theta * std::log(x);
      p.count = options.mode == CountMode::schedule ? psi(gaps, *schedule, j, x)
                                                    : raw_gap_count(gaps, j, x);
      points.push_back(p);
    }
  }
  report.evaluated = points.size();
  if (points.empty()) {
    report.degenerate = true;
    return report;
  }

  std::size_t c_min = std::numeric_limits<std::size_t>::max();
  for (const auto& p : points) c_min = std::min(c_min, p.count);
  double frontier = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.count == c_min) frontier = std::max(frontier, p.abscissa);
  }
  report.frontier = frontier;

  if (options.fixed_b) {
    report.b = *options.fixed_b;
    report.a = static_cast<double>(c_min) - report.b * frontier;
    report.degenerate = std::none_of(points.begin(), points.end(),
                                     [&](const auto& p) { return p.abscissa > frontier; });
  } else {
    double b = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      if (p.abscissa > frontier) {
        b = std::min(b, static_cast<double>(p.count - c_min) / (p.abscissa - frontier));
      }
    }
    if (!std::isfinite(b)) {
      // Every point sits at or left of the frontier: any slope works.
      report.degenerate = true;
      report.b = 0.0;
      report.a = static_cast<double>(c_min);
    } else {
      report.b = b;
      report.a = static_cast<double>(c_min) - b * frontier;
    }
  }

  double min_slack = std::numeric_limits<double>::infinity();
  for (auto& p : points) {
    p.slack = static_cast<double>(p.count) - (report.a + report.b * p.abscissa);
    min_slack = std::min(min_slack, p.slack);
    if (p.slack < -kSlackTol) report.violations.push_back(p);
  }
  for (const auto& p : points) {
    if (p.slack <= min_slack + kSlackTol) report.tight.push_back(p);
  }
  report.feasible = report.b > 0.0 && !report.degenerate && report.violations.empty();
  return report;
}

std::vector<double> geometric_x_grid(double x0, int count) {
  if (!(x0 > 0.0) || count < 0) fail(ErrorKind::parameter, "invalid geometric grid");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) grid.push_back(std::ldexp(x0, j));
  return grid;
}

}  // namespace salem
