#include "salem/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "salem/error.hpp"
#include "salem/numeric.hpp"
#include "salem/parallel.hpp"

namespace salem {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, double resolution,
                                 std::string provenance)
    : atoms_(std::move(atoms)), resolution_(resolution), provenance_(std::move(provenance)) {
  if (atoms_.empty()) fail(ErrorKind::construction, "measure has no atoms");
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    fail(ErrorKind::construction, "measure resolution must be positive and finite");
  }
  cumulative_.resize(atoms_.size() + 1);
  cumulative_[0] = 0.0;
  CompensatedSum running;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!std::isfinite(a.position)) fail(ErrorKind::construction, "atom position is not finite");
    if (!(a.weight >= 0.0)) fail(ErrorKind::construction, "atom weight is negative");
    if (i > 0 && !(atoms_[i - 1].position < a.position)) {
      std::ostringstream msg;
      msg << "atom positions not strictly increasing at index " << i;
      fail(ErrorKind::construction, msg.str());
    }
    running.add(a.weight);
    cumulative_[i + 1] = running.value();
  }
  if (std::abs(cumulative_.back() - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "atom weights sum to " << cumulative_.back() << ", not 1";
    fail(ErrorKind::construction, msg.str());
  }
}

double DiscreteMeasure::mass_of_range(std::size_t first, std::size_t last) const {
  last = std::min(last, atoms_.size());
  if (first >= last) return 0.0;
  return cumulative_[last] - cumulative_[first];
}

double DiscreteMeasure::mass(const Interval& j) const {
  const auto first = std::lower_bound(atoms_.begin(), atoms_.end(), j.lo,
                                      [](const Atom& a, double v) { return a.position < v; });
  const auto last = std::upper_bound(atoms_.begin(), atoms_.end(), j.hi,
                                     [](double v, const Atom& a) { return v < a.position; });
  return mass_of_range(static_cast<std::size_t>(first - atoms_.begin()),
                       static_cast<std::size_t>(last - atoms_.begin()));
}

// ---------------------------------------------------------------------------
// Affine IFS

AffineIFSSpec AffineIFSSpec::ternary(int depth) {
  AffineIFSSpec spec;
  spec.maps = {{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}};
  spec.weights = {0.5, 0.5};
  spec.depth = depth;
  return spec;
}

namespace {

Interval image(const AffineMap& f, const Interval& i) {
  const double a = f(i.lo);
  const double b = f(i.hi);
  return a <= b ? Interval{a, b} : Interval{b, a};
}

Interval hull_of(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

std::vector<double> validated_weights(const AffineIFSSpec& spec) {
  const std::size_t n = spec.maps.size();
  if (n < 2) fail(ErrorKind::construction, "an IFS needs at least two maps");
  if (spec.depth < 1) fail(ErrorKind::construction, "IFS depth must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    const double r = spec.maps[i].ratio;
    if (!(std::abs(r) > 0.0 && std::abs(r) < 1.0) || !std::isfinite(spec.maps[i].offset)) {
      std::ostringstream msg;
      msg << "map " << i << " is not a contraction (ratio " << r << ")";
      fail(ErrorKind::construction, msg.str());
    }
  }
  std::vector<double> w = spec.weights;
  if (w.empty()) w.assign(n, 1.0 / static_cast<double>(n));
  if (w.size() != n) fail(ErrorKind::construction, "IFS weight count differs from map count");
  for (double p : w) {
    if (!(p > 0.0)) fail(ErrorKind::construction, "IFS weights must be positive");
  }
  if (std::abs(compensated_total(w) - 1.0) > 1e-12) {
    fail(ErrorKind::construction, "IFS weights must sum to 1");
  }
  return w;
}

/// Convex hull of the attractor: the limit of conv(∪ F_i(I)) started from an
/// interval I mapped into itself by every F_i. Iterating from outside lands
/// on the exact endpoint whenever it is representable (x/3 + 2/3 settles at
/// 1, while the closed form 2/3 / (1 - 1/3) rounds below it).
Interval attractor_hull(const std::vector<AffineMap>& maps) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const AffineMap& f : maps) {
    const double fixed = f.offset / (1.0 - f.ratio);
    lo = std::min(lo, fixed);
    hi = std::max(hi, fixed);
  }
  const double c = 0.5 * (lo + hi);
  double radius = 0.0;
  for (const AffineMap& f : maps) {
    radius = std::max(radius, std::abs(f(c) - c) / (1.0 - std::abs(f.ratio)));
  }
  radius = 2.0 * radius + 1.0;
  Interval h{c - radius, c + radius};
  for (int iter = 0; iter < 200000; ++iter) {
    Interval next = image(maps.front(), h);
    for (std::size_t i = 1; i < maps.size(); ++i) next = hull_of(next, image(maps[i], h));
    if (next == h) break;
    h = next;
  }
  return h;
}

struct Node {
  AffineMap map;  // F_ρ
  Interval span;  // F_ρ(hull)
  double weight;  // Π p_{ρ_i}
};

}  // namespace

double similarity_dimension(const AffineIFSSpec& spec) {
  validated_weights(spec);
  auto moran = [&](double s) {
    double total = 0.0;
    for (const AffineMap& f : spec.maps) total += std::pow(std::abs(f.ratio), s);
    return total - 1.0;
  };
  // moran is decreasing in s; moran(0) = N - 1 > 0.
  double lo = 0.0;
  double hi = 1.0;
  while (moran(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (moran(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Construction build_ifs(const AffineIFSSpec& spec) {
  const std::vector<double> weights = validated_weights(spec);
  const Interval hull = attractor_hull(spec.maps);
  const std::size_t n = spec.maps.size();

  std::vector<Interval> first_level(n);
  for (std::size_t i = 0; i < n; ++i) first_level[i] = image(spec.maps[i], hull);
  const double tol = 1e-14 * std::max(1.0, hull.length());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double overlap = std::min(first_level[i].hi, first_level[j].hi) -
                             std::max(first_level[i].lo, first_level[j].lo);
      if (overlap > tol) {
        std::ostringstream msg;
        msg << "images of the hull under maps " << i << " and " << j
            << " have overlapping interiors";
        fail(ErrorKind::construction, msg.str());
      }
    }
  }
  Construction out;
  std::vector<Gap> gaps;
  std::vector<Node> level{{AffineMap{1.0, 0.0}, hull, 1.0}};
  out.pieces.push_back({hull});
  for (int k = 1; k <= spec.depth; ++k) {
    std::vector<Node> next;
    next.reserve(level.size() * n);
    std::vector<Node> children(n);
    for (const Node& parent : level) {
      for (std::size_t i = 0; i < n; ++i) {
        const AffineMap& f = spec.maps[i];
        const AffineMap composed{parent.map.ratio * f.ratio,
                                 parent.map.ratio * f.offset + parent.map.offset};
        children[i] = Node{composed, image(parent.map, first_level[i]),
                           parent.weight * weights[i]};
      }
      std::sort(children.begin(), children.end(),
                [](const Node& a, const Node& b) { return a.span.lo < b.span.lo; });
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && children[i - 1].span.hi < children[i].span.lo) {
          gaps.push_back({{children[i - 1].span.hi, children[i].span.lo}, k});
        }
        next.push_back(children[i]);
      }
    }
    level = std::move(next);
    std::vector<Interval> spans;
    spans.reserve(level.size());
    for (const Node& node : level) spans.push_back(node.span);
    out.pieces.push_back(std::move(spans));
  }

  std::vector<Atom> atoms;
  atoms.reserve(level.size());
  double resolution = 0.0;
  for (const Node& node : level) {
    atoms.push_back({node.span.midpoint(), node.weight});
    resolution = std::max(resolution, node.span.length());
  }
  std::ostringstream provenance;
  provenance << "ifs(maps=" << n << ",depth=" << spec.depth << ")";
  out.gaps = GapSet(hull, std::move(gaps));
  out.measure = DiscreteMeasure(std::move(atoms), resolution, provenance.str());
  return out;
}

// ---------------------------------------------------------------------------
// Fat Cantor set

double FatCantorSpec::default_c(int k) {
  const double d = static_cast<double>(k) + 2.0;
  return 0.5 - 1.0 / (2.0 * d * d);
}

FatCantorSpec FatCantorSpec::with_default_sequence(int depth) {
  return FatCantorSpec{&FatCantorSpec::default_c, depth};
}

namespace {

std::vector<double> validated_sequence(const FatCantorSpec& spec, int upto) {
  if (!spec.c) fail(ErrorKind::construction, "fat Cantor sequence is not set");
  if (spec.depth < 1) fail(ErrorKind::construction, "fat Cantor depth must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(upto) + 1, 0.0);
  for (int k = 1; k <= upto; ++k) {
    const double ck = spec.c(k);
    if (!(ck > 0.0 && ck < 0.5)) {
      std::ostringstream msg;
      msg << "c_" << k << " = " << ck << " is outside (0, 1/2)";
      fail(ErrorKind::construction, msg.str());
    }
    if (k > 1 && ck < c[static_cast<std::size_t>(k) - 1]) {
      std::ostringstream msg;
      msg << "c_k must be non-decreasing, but c_" << k << " < c_" << k - 1;
      fail(ErrorKind::construction, msg.str());
    }
    c[static_cast<std::size_t>(k)] = ck;
  }
  return c;
}

}  // namespace

FatCantorDiagnostics fat_cantor_diagnostics(const FatCantorSpec& spec) {
  const std::vector<double> c = validated_sequence(spec, spec.depth);
  FatCantorDiagnostics d;
  for (int k = 1; k <= spec.depth; ++k) d.product *= 2.0 * c[static_cast<std::size_t>(k)];
  d.log_gap_ratio =
      std::log(1.0 - 2.0 * c[static_cast<std::size_t>(spec.depth)]) / spec.depth;
  return d;
}

Construction build_fat_cantor(const FatCantorSpec& spec) {
  const std::vector<double> c = validated_sequence(spec, spec.depth);
  Construction out;
  std::vector<Gap> gaps;
  std::vector<Interval> level{{0.0, 1.0}};
  out.pieces.push_back(level);
  for (int k = 1; k <= spec.depth; ++k) {
    const double ck = c[static_cast<std::size_t>(k)];
    std::vector<Interval> next;
    next.reserve(level.size() * 2);
    for (const Interval& piece : level) {
      const double keep = ck * piece.length();
      const Interval left{piece.lo, piece.lo + keep};
      const Interval right{piece.hi - keep, piece.hi};
      gaps.push_back({{left.hi, right.lo}, k});
      next.push_back(left);
      next.push_back(right);
    }
    level = std::move(next);
    out.pieces.push_back(level);
  }
  std::vector<Atom> atoms;
  atoms.reserve(level.size());
  const double w = std::ldexp(1.0, -spec.depth);
  double resolution = 0.0;
  for (const Interval& piece : level) {
    atoms.push_back({piece.midpoint(), w});
    resolution = std::max(resolution, piece.length());
  }
  std::ostringstream provenance;
  provenance << "fat-cantor(depth=" << spec.depth << ")";
  out.gaps = GapSet({0.0, 1.0}, std::move(gaps));
  out.measure = DiscreteMeasure(std::move(atoms), resolution, provenance.str());
  return out;
}

double fat_cantor_theta(const FatCantorSpec& spec, double x) {
  if (!spec.c) fail(ErrorKind::parameter, "fat Cantor sequence is not set");
  auto c = [&](int k) { return spec.c(k); };
  // gap_size(k) = (1 - 2c_k) Π_{i<k} c_i, the length of a generation-k gap.
  auto gap_size = [&](int k) {
    double prod = 1.0;
    for (int i = 1; i < k; ++i) prod *= c(i);
    return (1.0 - 2.0 * c(k)) * prod;
  };
  const double inv = 1.0 / x;
  if (!(x > 0.0) || inv > gap_size(1)) {
    fail(ErrorKind::domain, "theta(x) requires x >= 1/(1 - 2c_1)");
  }
  int n = 0;
  while (inv <= gap_size(n + 2)) {
    ++n;
    if (n > 100000) fail(ErrorKind::domain, "theta(x): x too large for the sequence");
  }
  double denom = std::log(1.0 - 2.0 * c(n + 2));
  for (int i = 1; i <= n + 1; ++i) denom += std::log(c(i));
  return -static_cast<double>(n) * std::numbers::ln2 / denom;
}

// ---------------------------------------------------------------------------
// Frostman constant

FrostmanResult frostman_check(const DiscreteMeasure& measure, double s) {
  if (!(s > 0.0)) fail(ErrorKind::domain, "frostman_check requires s > 0");
  const auto atoms = measure.atoms();
  const std::size_t n = atoms.size();
  const double res = measure.resolution();
  FrostmanResult best;
  best.constant = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double remaining = measure.mass_of_range(i, n);
    for (std::size_t j = i; j < n; ++j) {
      // Atoms stand for cells of width `res`, so the covering interval
      // reaches half a cell beyond the outer atoms.
      const double len = atoms[j].position - atoms[i].position + res;
      const double scale = std::pow(len, s);
      // No longer range starting at i can beat the best ratio.
      if (remaining / scale <= best.constant) break;
      const double ratio = measure.mass_of_range(i, j + 1) / scale;
      if (ratio > best.constant) {
        best.constant = ratio;
        best.resolution_limited = i == j;
        best.witness = {atoms[i].position - 0.5 * res, atoms[j].position + 0.5 * res};
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Translation search

std::vector<double> default_translation_grid(const DiscreteMeasure& mu, const GapSet& set) {
  const double step = mu.resolution();
  const double t_min = set.hull().lo - mu.atoms().back().position;
  const double t_max = set.hull().hi - mu.atoms().front().position;
  const auto first = static_cast<long long>(std::floor(t_min / step));
  const auto last = static_cast<long long>(std::ceil(t_max / step));
  if (last - first > 50'000'000) {
    fail(ErrorKind::parameter, "translation grid would exceed 5e7 points");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(last - first + 1));
  for (long long i = first; i <= last; ++i) grid.push_back(static_cast<double>(i) * step);
  return grid;
}

namespace {

double mass_inside(const DiscreteMeasure& mu, const GapSet& set, double t) {
  CompensatedSum mass;
  for (const Atom& a : mu.atoms()) {
    if (set.contains_point(a.position + t)) mass.add(a.weight);
  }
  return mass.value();
}

}  // namespace

TranslationResult translate_intersect(const DiscreteMeasure& mu, const GapSet& set,
                                      std::span<const double> t_grid, unsigned workers) {
  if (t_grid.empty()) fail(ErrorKind::parameter, "translation grid is empty");
  std::vector<double> masses(t_grid.size());
  parallel_for(t_grid.size(), workers,
               [&](std::size_t i) { masses[i] = mass_inside(mu, set, t_grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (masses[i] > masses[best] ||
        (masses[i] == masses[best] && t_grid[i] < t_grid[best])) {
      best = i;
    }
  }
  if (!(masses[best] > 0.0)) {
    fail(ErrorKind::no_intersection, "no translate in the grid puts mass inside the set");
  }
  const double t = t_grid[best];
  const double total = masses[best];
  std::vector<Atom> kept;
  for (const Atom& a : mu.atoms()) {
    const double x = a.position + t;
    if (set.contains_point(x)) kept.push_back({x, a.weight / total});
  }
  // Rescale so the kept weights sum to 1 in compensated arithmetic.
  CompensatedSum sum;
  for (const Atom& a : kept) sum.add(a.weight);
  const double correction = 1.0 / sum.value();
  for (Atom& a : kept) a.weight *= correction;

  std::ostringstream provenance;
  provenance.precision(17);
  provenance << mu.provenance() << "|translate(t=" << t << ")";
  return {t, total, DiscreteMeasure(std::move(kept), mu.resolution(), provenance.str())};
}

// ---------------------------------------------------------------------------

DiscreteMeasure pushforward(const DiscreteMeasure& measure,
                            const std::function<double(double)>& map) {
  const auto atoms = measure.atoms();
  std::vector<Atom> out;
  out.reserve(atoms.size());
  double stretch = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double y = map(atoms[i].position);
    if (i > 0) {
      if (!(out.back().position < y)) {
        std::ostringstream msg;
        msg << "image positions not increasing at atom " << i;
        fail(ErrorKind::map_not_increasing, msg.str());
      }
      stretch = std::max(stretch, (y - out.back().position) /
                                      (atoms[i].position - atoms[i - 1].position));
    }
    out.push_back({y, atoms[i].weight});
  }
  if (atoms.size() == 1) stretch = 1.0;
  return DiscreteMeasure(std::move(out), measure.resolution() * stretch,
                         measure.provenance() + "|pushforward");
}

DiscreteMeasure uniform_grid_measure(double lo, double hi, std::size_t n) {
  if (n == 0 || !(lo < hi)) fail(ErrorKind::parameter, "uniform grid needs n > 0 and lo < hi");
  const double h = (hi - lo) / static_cast<double>(n);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<Atom> atoms(n);
  for (std::size_t i = 0; i < n; ++i) {
    atoms[i] = {lo + (static_cast<double>(i) + 0.5) * h, w};
  }
  std::ostringstream provenance;
  provenance << "uniform-grid(n=" << n << ")";
  return DiscreteMeasure(std::move(atoms), h, provenance.str());
}

DiscreteMeasure component_measure(const GapSet& gaps) {
  const std::vector<Interval> parts = gaps.components();
  const double w = 1.0 / static_cast<double>(parts.size());
  std::vector<Atom> atoms;
  atoms.reserve(parts.size());
  double resolution = 0.0;
  for (const Interval& p : parts) {
    atoms.push_back({p.midpoint(), w});
    resolution = std::max(resolution, p.length());
  }
  if (!(resolution > 0.0)) {
    resolution = gaps.hull().length();
    for (const Gap& g : gaps.gaps()) resolution = std::min(resolution, g.length());
  }
  if (!(resolution > 0.0)) resolution = 1.0;
  return DiscreteMeasure(std::move(atoms), resolution, "gap-table components");
}

}  // namespace salem
