#include "salem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "salem/error.hpp"
#include "salem/numeric.hpp"

namespace salem {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::construction: return "construction error";
    case ErrorKind::no_intersection: return "no intersection";
    case ErrorKind::map_not_increasing: return "map not increasing";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::parse: return "parse error";
  }
  return "unknown error";
}

GapSet::GapSet(Interval hull, std::vector<Gap> gaps) : hull_(hull), gaps_(std::move(gaps)) {
  if (!(std::isfinite(hull_.lo) && std::isfinite(hull_.hi)) || hull_.lo > hull_.hi) {
    fail(ErrorKind::construction, "hull must be a finite interval with lo <= hi");
  }
  std::sort(gaps_.begin(), gaps_.end(),
            [](const Gap& a, const Gap& b) { return a.span.lo < b.span.lo; });
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    const Interval& u = gaps_[i].span;
    if (!(u.lo < u.hi)) {
      std::ostringstream msg;
      msg << "gap " << i << " (" << u.lo << ", " << u.hi << ") has non-positive length";
      fail(ErrorKind::construction, msg.str());
    }
    if (!(hull_.lo < u.lo && u.hi < hull_.hi)) {
      std::ostringstream msg;
      msg << "gap " << i << " (" << u.lo << ", " << u.hi << ") is not strictly inside the hull";
      fail(ErrorKind::construction, msg.str());
    }
    if (i > 0 && gaps_[i - 1].span.hi > u.lo) {
      std::ostringstream msg;
      msg << "gaps " << i - 1 << " and " << i << " overlap";
      fail(ErrorKind::construction, msg.str());
    }
    if (gaps_[i].generation && *gaps_[i].generation < 0) {
      fail(ErrorKind::construction, "gap generation must be non-negative");
    }
  }
}

std::pair<std::size_t, std::size_t> GapSet::gaps_within(const Interval& j) const {
  const auto first = std::lower_bound(gaps_.begin(), gaps_.end(), j.lo,
                                      [](const Gap& g, double v) { return g.span.lo < v; });
  // Right endpoints are sorted too, so the gaps with hi <= j.hi form a prefix.
  const auto last = std::upper_bound(gaps_.begin(), gaps_.end(), j.hi,
                                     [](double v, const Gap& g) { return v < g.span.hi; });
  const auto f = static_cast<std::size_t>(first - gaps_.begin());
  const auto l = static_cast<std::size_t>(last - gaps_.begin());
  return {f, std::max(f, l)};
}

std::size_t GapSet::count_starting_before(double x) const {
  const auto it = std::lower_bound(gaps_.begin(), gaps_.end(), x,
                                   [](const Gap& g, double v) { return g.span.lo < v; });
  return static_cast<std::size_t>(it - gaps_.begin());
}

std::optional<std::size_t> GapSet::gap_containing(double x) const {
  const std::size_t n = count_starting_before(x);
  if (n == 0) return std::nullopt;
  const std::size_t i = n - 1;
  if (x < gaps_[i].span.hi) return i;
  return std::nullopt;
}

bool GapSet::contains_point(double x) const {
  return hull_.contains(x) && !gap_containing(x).has_value();
}

std::vector<Interval> GapSet::components() const {
  std::vector<Interval> out;
  out.reserve(gaps_.size() + 1);
  double left = hull_.lo;
  for (const Gap& g : gaps_) {
    out.push_back({left, g.span.lo});
    left = g.span.hi;
  }
  out.push_back({left, hull_.hi});
  return out;
}

double delta_of(double t, double alpha) {
  if (!(t > 0.0)) {
    fail(ErrorKind::domain, "delta_of requires t > 0");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::parameter, "alpha must lie in [0, 1]");
  }
  if (alpha == 0.0) {
    return 1.0 / std::max(-std::log(t), std::numbers::ln2);
  }
  return std::pow(t, alpha);
}

PerturbationSchedule build_schedule(const GapSet& gaps, int m, double alpha) {
  if (m < 1) fail(ErrorKind::parameter, "smoothness order m must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::parameter, "alpha must lie in [0, 1]");
  }
  PerturbationSchedule out;
  out.m = m;
  out.alpha = alpha;
  out.delta.reserve(gaps.size());
  for (const Gap& g : gaps.gaps()) {
    const double len = g.length();
    out.delta.push_back(std::pow(len, m) * delta_of(len, alpha));
  }
  // Summed smallest first: the schedule decays geometrically with generation.
  std::vector<double> sorted = out.delta;
  std::sort(sorted.begin(), sorted.end());
  out.total = compensated_total(sorted);
  return out;
}

namespace {

bool meets_threshold(double value, double x) {
  return value >= (1.0 / x) * (1.0 - kThresholdRelTol);
}

void require_positive(double x) {
  if (!(x > 0.0)) fail(ErrorKind::domain, "gap count threshold requires x > 0");
}

}  // namespace

std::size_t psi(const GapSet& gaps, const PerturbationSchedule& schedule, const Interval& j,
                double x) {
  require_positive(x);
  if (schedule.size() != gaps.size()) {
    fail(ErrorKind::parameter, "schedule is not aligned with the gap set");
  }
  const auto [first, last] = gaps.gaps_within(j);
  std::size_t count = 0;
  for (std::size_t i = first; i < last; ++i) {
    if (meets_threshold(schedule.delta[i], x)) ++count;
  }
  return count;
}

std::size_t raw_gap_count(const GapSet& gaps, const Interval& j, double x) {
  require_positive(x);
  const auto [first, last] = gaps.gaps_within(j);
  std::size_t count = 0;
  for (std::size_t i = first; i < last; ++i) {
    if (meets_threshold(gaps[i].length(), x)) ++count;
  }
  return count;
}

}  // namespace salem
