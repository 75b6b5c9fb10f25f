#include "salem/randmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "salem/error.hpp"
#include "salem/numeric.hpp"
#include "salem/rng.hpp"

namespace salem {

namespace {

// Philox stream identifiers, so ω draws and modulus pair sampling never share
// counters even under the same seed.
constexpr std::uint64_t kOmegaStream = 0x6f6d656761ull;
constexpr std::uint64_t kModulusStream = 0x6d6f64756c7573ull;

}  // namespace

WidthLaw parse_width_law(std::string_view name) {
  if (name == "uniform") return WidthLaw::uniform;
  if (name == "raised-cosine") return WidthLaw::raised_cosine;
  fail(ErrorKind::parameter, "unknown width distribution '" + std::string(name) +
                                 "' (expected uniform or raised-cosine)");
}

std::string_view to_string(WidthLaw law) noexcept {
  switch (law) {
    case WidthLaw::uniform: return "uniform";
    case WidthLaw::raised_cosine: return "raised-cosine";
  }
  return "uniform";
}

double draw_width(WidthLaw law, double uniform) {
  switch (law) {
    case WidthLaw::uniform:
      return uniform;
    case WidthLaw::raised_cosine: {
      // Invert F(u) = u - sin(2πu)/(2π) by bisection; F' vanishes at the ends.
      double lo = 0.0;
      double hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid - std::sin(2.0 * kPi * mid) / (2.0 * kPi);
        (f < uniform ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return uniform;
}

RandomMapSample::RandomMapSample(std::shared_ptr<const GapSet> gaps,
                                 std::shared_ptr<const PerturbationSchedule> schedule,
                                 std::vector<double> omega, std::uint64_t seed, WidthLaw law,
                                 BumpFunction bump)
    : gaps_(std::move(gaps)),
      schedule_(std::move(schedule)),
      omega_(std::move(omega)),
      seed_(seed),
      law_(law),
      bump_(std::move(bump)) {
  if (!gaps_ || !schedule_) fail(ErrorKind::parameter, "sample needs a gap set and schedule");
  if (schedule_->size() != gaps_->size() || omega_.size() != gaps_->size()) {
    fail(ErrorKind::parameter, "gap set, schedule and widths are not aligned");
  }
  const std::size_t n = gaps_->size();
  prefix_.resize(n + 1);
  prefix_[0] = 0.0;
  lows_.resize(n);
  lengths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = omega_[i];
    if (!(w >= 0.0 && w <= schedule_->delta[i])) {
      std::ostringstream msg;
      msg << "width " << i << " is outside [0, delta_U]";
      fail(ErrorKind::parameter, msg.str());
    }
    // Plain summation: eval() reproduces prefix_[i+1] bit-exactly at gap ends.
    prefix_[i + 1] = prefix_[i] + w;
    lows_[i] = (*gaps_)[i].span.lo;
    lengths_[i] = (*gaps_)[i].length();
  }
}

RandomMapSample RandomMapSample::draw(std::shared_ptr<const GapSet> gaps,
                                      std::shared_ptr<const PerturbationSchedule> schedule,
                                      WidthLaw law, std::uint64_t seed, BumpFunction bump) {
  if (!gaps || !schedule) fail(ErrorKind::parameter, "sample needs a gap set and schedule");
  const CounterRng rng(seed, kOmegaStream);
  std::vector<double> omega(schedule->size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double delta = schedule->delta[i];
    omega[i] = delta == 0.0 ? 0.0 : delta * draw_width(law, rng.uniform(i));
  }
  return RandomMapSample(std::move(gaps), std::move(schedule), std::move(omega), seed, law,
                         std::move(bump));
}

RandomMapSample RandomMapSample::with_omega(std::shared_ptr<const GapSet> gaps,
                                            std::shared_ptr<const PerturbationSchedule> schedule,
                                            std::vector<double> omega, BumpFunction bump) {
  return RandomMapSample(std::move(gaps), std::move(schedule), std::move(omega), 0,
                         WidthLaw::uniform, std::move(bump));
}

double RandomMapSample::eval(double x) const {
  const auto k = static_cast<std::size_t>(std::lower_bound(lows_.begin(), lows_.end(), x) -
                                          lows_.begin());
  if (k == 0) return x;
  const std::size_t i = k - 1;
  const double u = (x - lows_[i]) / lengths_[i];
  if (u >= 1.0) return x + prefix_[k];
  return x + (prefix_[i] + omega_[i] * bump_.value(u));
}

double RandomMapSample::eval_restricted(double x) const {
  const GapSet& g = *gaps_;
  if (!g.hull().contains(x)) {
    fail(ErrorKind::domain, "eval_restricted: point lies outside the hull");
  }
  if (g.gap_containing(x)) {
    fail(ErrorKind::domain, "eval_restricted: point lies inside a gap");
  }
  // Gaps entirely left of x: those with hi <= x, a prefix of the sorted list.
  const auto gaps = g.gaps();
  const auto it = std::upper_bound(gaps.begin(), gaps.end(), x,
                                   [](double v, const Gap& gap) { return v < gap.span.hi; });
  return x + prefix_[static_cast<std::size_t>(it - gaps.begin())];
}

double RandomMapSample::gap_term(double x, int k) const {
  const auto n = static_cast<std::size_t>(std::lower_bound(lows_.begin(), lows_.end(), x) -
                                          lows_.begin());
  if (n == 0) return 0.0;
  const std::size_t i = n - 1;
  const double u = (x - lows_[i]) / lengths_[i];
  if (u >= 1.0 || omega_[i] == 0.0) return 0.0;
  return omega_[i] / std::pow(lengths_[i], k) * bump_.derivative(k, u);
}

double RandomMapSample::derivative(double x, int k) const {
  if (k < 1 || k > schedule_->m) {
    fail(ErrorKind::parameter, "derivative order must lie in [1, m]");
  }
  if (bump_.order() < k) {
    fail(ErrorKind::parameter, "bump order is below the requested derivative");
  }
  const double term = gap_term(x, k);
  return k == 1 ? 1.0 + term : term;
}

ModulusReport modulus_check(const RandomMapSample& sample, std::size_t n_pairs,
                            std::uint64_t seed) {
  const PerturbationSchedule& schedule = sample.schedule();
  const int m = schedule.m;
  if (sample.bump().order() < m + 1) {
    fail(ErrorKind::parameter, "modulus check needs a bump of order >= m + 1");
  }
  ModulusReport report;
  report.bound = 2.0 * sample.bump().sup_norm(m + 1);

  const GapSet& gaps = sample.gaps();
  const std::size_t n_gaps = gaps.size();
  const Interval hull = gaps.hull();
  const CounterRng rng(seed, kModulusStream);
  auto pick_gap = [&](double u) {
    return std::min(n_gaps - 1, static_cast<std::size_t>(u * static_cast<double>(n_gaps)));
  };
  auto inside = [](const Interval& span, double u) { return span.lo + u * span.length(); };

  double best = 0.0;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const auto [u1, u2] = rng.uniform_pair(3 * p);
    const auto [u3, u4] = rng.uniform_pair(3 * p + 1);
    const auto [u5, u6] = rng.uniform_pair(3 * p + 2);
    double x = 0.0;
    double y = 0.0;
    if (n_gaps == 0) {
      x = inside(hull, u1);
      y = inside(hull, u2);
    } else {
      switch (p % 3) {
        case 0: {  // both points in one gap
          const Interval& span = gaps[pick_gap(u1)].span;
          x = inside(span, u2);
          y = inside(span, u3);
          break;
        }
        case 1: {  // points in two gaps
          x = inside(gaps[pick_gap(u1)].span, u2);
          y = inside(gaps[pick_gap(u3)].span, u4);
          break;
        }
        default: {  // straddling or hugging a gap endpoint, log-uniform offsets
          const Interval& span = gaps[pick_gap(u1)].span;
          const double end = u2 < 0.5 ? span.lo : span.hi;
          // Offsets stay a few ulps away from `end` so that x != y.
          const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(end));
          const double h1 = std::max(span.length() * std::pow(10.0, -12.0 * u3), floor);
          const double h2 = std::max(span.length() * std::pow(10.0, -12.0 * u4), 2.0 * floor);
          x = end + (u5 < 0.5 ? -h1 : h1);
          y = end + (u6 < 0.5 ? -h2 : h2);
          if (x == y) y = end + (u6 < 0.5 ? h2 : -h2);
          break;
        }
      }
    }
    if (x == y) continue;
    const double t = std::abs(y - x);
    const double diff = std::abs(sample.gap_term(y, m) - sample.gap_term(x, m));
    const double ratio = diff / delta_of(t, schedule.alpha);
    ++report.pairs;
    if (ratio > best) {
      best = ratio;
      report.worst_x = std::min(x, y);
      report.worst_y = std::max(x, y);
    }
  }
  report.max_ratio = best;
  report.pass = best <= report.bound * (1.0 + kModulusRelTol);
  return report;
}

double truncation_bound(const PerturbationSchedule& schedule, std::span<const std::size_t> kept) {
  std::vector<bool> keep(schedule.size(), false);
  for (std::size_t i : kept) {
    if (i >= schedule.size()) fail(ErrorKind::parameter, "kept gap index out of range");
    keep[i] = true;
  }
  std::vector<double> omitted;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!keep[i]) omitted.push_back(schedule.delta[i]);
  }
  std::sort(omitted.begin(), omitted.end());
  return compensated_total(omitted);
}

double truncation_bound_by_generation(const GapSet& gaps, const PerturbationSchedule& schedule,
                                      int max_generation) {
  if (schedule.size() != gaps.size()) {
    fail(ErrorKind::parameter, "schedule is not aligned with the gap set");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const auto& gen = gaps[i].generation;
    if (gen && *gen <= max_generation) kept.push_back(i);
  }
  return truncation_bound(schedule, kept);
}

}  // namespace salem
