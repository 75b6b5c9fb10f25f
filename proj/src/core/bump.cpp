#include "salem/bump.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "salem/error.hpp"

namespace salem {

namespace {

constexpr int kMaxOrder = 10;
constexpr int kExponentialJet = 16;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

// Truncated power series in ε, used to differentiate the exponential bump.
using Jet = std::array<double, kExponentialJet>;

Jet jet_reciprocal(const Jet& a, int n) {
  Jet b{};
  b[0] = 1.0 / a[0];
  for (int k = 1; k < n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += a[i] * b[k - i];
    b[k] = -acc * b[0];
  }
  return b;
}

Jet jet_exp(const Jet& a, int n) {
  Jet b{};
  b[0] = std::exp(a[0]);
  for (int k = 1; k < n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += i * a[i] * b[k - i];
    b[k] = acc / k;
  }
  return b;
}

Jet jet_mul(const Jet& a, const Jet& b, int n) {
  Jet c{};
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
    c[k] = acc;
  }
  return c;
}

/// Maximum of |f| on [0, 1] for a smooth f whose derivative is df: endpoints
/// plus every sign change of df on a fine grid, refined by bisection.
template <class F, class DF>
double max_abs_on_unit(F&& f, DF&& df, int samples) {
  double best = std::max(std::abs(f(0.0)), std::abs(f(1.0)));
  double prev_u = 0.0;
  double prev_d = df(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double u = static_cast<double>(i) / samples;
    const double d = df(u);
    best = std::max(best, std::abs(f(u)));
    if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
      double lo = prev_u;
      double hi = u;
      const bool rising = prev_d < 0.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ((df(mid) < 0.0) == rising ? lo : hi) = mid;
      }
      best = std::max({best, std::abs(f(lo)), std::abs(f(hi))});
    }
    prev_u = u;
    prev_d = d;
  }
  return best;
}

}  // namespace

BumpFunction::BumpFunction(BumpKind kind, int order) : kind_(kind), order_(order) {
  if (order < 1 || order > kMaxOrder) {
    fail(ErrorKind::parameter, "bump order must lie in [1, 10]");
  }
}

BumpFunction BumpFunction::smoothstep(int order) {
  BumpFunction bump(BumpKind::smoothstep, order);
  const int p = order;
  // φ'(u) = u^p (1-u)^p / B(p+1, p+1),  1/B = (2p+1)! / (p!)^2.
  double inv_beta = 1.0;
  for (int i = p + 1; i <= 2 * p + 1; ++i) inv_beta *= i;
  for (int i = 1; i <= p; ++i) inv_beta /= i;
  std::vector<double> phi(static_cast<std::size_t>(2 * p + 2), 0.0);
  for (int i = 0; i <= p; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const int power = p + i + 1;
    phi[static_cast<std::size_t>(power)] = sign * binomial(p, i) * inv_beta / power;
  }
  bump.coefficients_.push_back(phi);
  while (bump.coefficients_.back().size() > 1) {
    bump.coefficients_.push_back(differentiate(bump.coefficients_.back()));
  }
  for (int k = 0; k <= bump.max_derivative(); ++k) {
    if (k == 0) {
      bump.sup_norms_.push_back(1.0);
      continue;
    }
    const auto& c = bump.coefficients_[static_cast<std::size_t>(k)];
    const auto& dc = bump.coefficients_[static_cast<std::size_t>(std::min(
        k + 1, static_cast<int>(bump.coefficients_.size()) - 1))];
    bump.sup_norms_.push_back(max_abs_on_unit([&](double u) { return horner(c, u); },
                                              [&](double u) { return horner(dc, u); }, 4096));
  }
  return bump;
}

BumpFunction BumpFunction::exponential(int order) {
  BumpFunction bump(BumpKind::exponential, order);
  for (int k = 0; k <= bump.max_derivative(); ++k) {
    if (k == 0) {
      bump.sup_norms_.push_back(1.0);
      continue;
    }
    const int dk = std::min(k + 1, kExponentialJet - 1);
    bump.sup_norms_.push_back(
        max_abs_on_unit([&](double u) { return bump.exponential_derivative(k, u); },
                        [&](double u) { return bump.exponential_derivative(dk, u); }, 20000));
  }
  return bump;
}

int BumpFunction::max_derivative() const noexcept {
  if (kind_ == BumpKind::smoothstep) return 2 * order_ + 1;
  return std::min(order_ + 2, kExponentialJet - 2);
}

double BumpFunction::derivative(int k, double u) const {
  if (k < 0 || k > max_derivative()) {
    fail(ErrorKind::parameter, "bump derivative order out of range");
  }
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return k == 0 ? 1.0 : 0.0;
  if (kind_ == BumpKind::smoothstep) {
    return horner(coefficients_[static_cast<std::size_t>(k)], u);
  }
  return exponential_derivative(k, u);
}

double BumpFunction::sup_norm(int k) const {
  if (k < 0 || k > max_derivative()) {
    fail(ErrorKind::parameter, "bump derivative order out of range");
  }
  return sup_norms_[static_cast<std::size_t>(k)];
}

double BumpFunction::exponential_derivative(int k, double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return k == 0 ? 1.0 : 0.0;
  const int n = k + 1;
  // φ(u) = 1/(1 + e^{g(u)}) with g(u) = 1/u - 1/(1-u).
  Jet left{};
  left[0] = u;
  left[1] = 1.0;
  Jet right{};
  right[0] = 1.0 - u;
  right[1] = -1.0;
  const Jet inv_left = jet_reciprocal(left, n);
  const Jet inv_right = jet_reciprocal(right, n);
  Jet g{};
  for (int i = 0; i < n; ++i) g[i] = inv_left[i] - inv_right[i];
  // Work with z = e^{-|g|} <= 1 to avoid overflow near the ends.
  const bool positive = g[0] > 0.0;
  if (std::abs(g[0]) > 700.0) {
    if (k > 0) return 0.0;
    return positive ? 0.0 : 1.0;
  }
  Jet neg{};
  for (int i = 0; i < n; ++i) neg[i] = positive ? -g[i] : g[i];
  const Jet z = jet_exp(neg, n);
  Jet denom = z;
  denom[0] += 1.0;
  const Jet inv = jet_reciprocal(denom, n);
  // g > 0: φ = z/(1+z); g < 0: φ = 1/(1+z).
  const Jet phi = positive ? jet_mul(z, inv, n) : inv;
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  return phi[static_cast<std::size_t>(k)] * factorial;
}

}  // namespace salem
