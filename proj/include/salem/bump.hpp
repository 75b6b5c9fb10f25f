#pragma once

#include <vector>

namespace salem {

enum class BumpKind {
  smoothstep,   // polynomial, φ' proportional to u^p (1-u)^p
  exponential,  // C^∞, built from exp(-1/u)
};

/// Increasing transition φ with φ = 0 on (-∞, 0] and φ = 1 on [1, ∞).
///
/// For the smoothstep of order p the first p derivatives vanish at both
/// ends, so φ is C^p and φ^(p+1) is bounded with jumps at 0 and 1. The
/// exponential bump is C^∞; its derivatives are evaluated through truncated
/// Taylor arithmetic and its sup norms are estimated numerically.
class BumpFunction {
 public:
  static BumpFunction smoothstep(int order);
  static BumpFunction exponential(int order);

  BumpKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }

  double value(double u) const { return derivative(0, u); }

  /// φ^(k)(u) for 0 <= k <= max_derivative(). Zero off (0, 1) when k >= 1.
  double derivative(int k, double u) const;

  /// Highest derivative the evaluator supports.
  int max_derivative() const noexcept;

  /// ‖φ^(k)‖_∞ over [0, 1].
  double sup_norm(int k) const;

 private:
  BumpFunction(BumpKind kind, int order);
  double exponential_derivative(int k, double u) const;

  BumpKind kind_;
  int order_;
  // coefficients_[k] holds φ^(k) in the monomial basis (smoothstep only).
  std::vector<std::vector<double>> coefficients_;
  std::vector<double> sup_norms_;
};

}  // namespace salem
