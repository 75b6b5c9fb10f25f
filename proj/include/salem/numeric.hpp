#pragma once

#include <cmath>
#include <complex>
#include <span>

namespace salem {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> v) noexcept {
    re_.add(v.real());
    im_.add(v.imag());
  }
  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

inline double compensated_total(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Requires at least two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

inline constexpr double kPi = 3.14159265358979323846;

/// e(-t) = exp(-2πit) with the phase reduced to [-1/2, 1/2] before scaling.
inline std::complex<double> unit_phase(double t) noexcept {
  const double r = t - std::nearbyint(t);
  const double angle = -2.0 * kPi * r;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace salem
