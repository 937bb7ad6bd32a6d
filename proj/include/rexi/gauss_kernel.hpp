#pragma once

// Gaussian-sum representation of e^{ix}:
//
//   e^{ix} ~ sum_{m=-M}^{M} b_m psi_h(x + m h),   b_m = e^{h^2} e^{-imh},
//
// accurate while |x| <= (M - 11) h, together with a-priori bounds on the
// truncation and aliasing defects.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace rexi {

using cplx = std::complex<double>;

/// Number of Gaussian widths that must separate |x| from the truncation edge.
inline constexpr int kTruncationOffset = 11;

/// Default rational-fit defect used in the total bound.
inline constexpr double kDefaultFitDefect = 8e-15;

struct GaussianParams {
  double h = 0.5;  ///< basis spacing, 0 < h < pi
  int M = 0;       ///< truncation half-width
};

inline void require_spacing(double h) {
  if (!(h > 0.0 && h < std::numbers::pi)) {
    throw std::invalid_argument("Gaussian spacing h must lie in (0, pi), got " + std::to_string(h));
  }
}

inline void require_valid(const GaussianParams& p) {
  require_spacing(p.h);
  if (p.M < 0) throw std::invalid_argument("truncation M must be nonnegative");
}

/// psi_h(x) = exp(-x^2 / (4 h^2)) / sqrt(4 pi)
inline double psi(double h, double x) {
  if (!(h > 0.0)) throw std::invalid_argument("psi: h must be positive");
  static const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  return norm * std::exp(-(x * x) / (4.0 * h * h));
}

inline cplx b_coeff(double h, int m) {
  require_spacing(h);
  const double phase = static_cast<double>(m) * h;
  return std::exp(h * h) * cplx(std::cos(phase), -std::sin(phase));
}

inline cplx gaussian_sum_approx(const GaussianParams& p, double x) {
  require_valid(p);
  const double scale = std::exp(p.h * p.h);
  cplx sum = 0.0;
  for (int m = -p.M; m <= p.M; ++m) {
    const double phase = static_cast<double>(m) * p.h;
    sum += cplx(std::cos(phase), -std::sin(phase)) * psi(p.h, x + phase);
  }
  return scale * sum;
}

/// Smallest M with xmax <= (M - 11) h.
inline int min_M(double h, double xmax) {
  require_spacing(h);
  if (!(xmax >= 0.0)) throw std::invalid_argument("min_M: xmax must be nonnegative");
  return static_cast<int>(std::ceil(xmax / h)) + kTruncationOffset;
}

/// Radius c (in units of h) beyond which psi_h drops below tol:
/// psi_h(z) <= tol for |z| >= c h with c = 2 sqrt(-log(sqrt(4 pi) tol)).
inline double tolerance_radius(double tol) {
  return 2.0 * std::sqrt(-std::log(std::sqrt(4.0 * std::numbers::pi) * tol));
}

/// sum_{k != 0} exp(-4 pi^2 k^2), the h-independent aliasing sum.
inline double aliasing_sum() {
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  double one_sided = 0.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-four_pi_sq * k * k);
    one_sided += term;
    if (term < 1e-300 || k > 8) break;
  }
  return 2.0 * one_sided;
}

/// Geometric majorant of sum_{k>=1} exp(-4 pi^2 k^2): 1/(1 - e^{-4 pi^2}) - 1.
inline double aliasing_sum_majorant() {
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  const double q = std::exp(-four_pi_sq);
  return q / (1.0 - q);
}

/// |sum_{m in Z} b_m psi_h(x + m h) - e^{ix}| <= sum_{k != 0} exp(-4 pi^2 k^2 - 4 pi k h).
///
/// Poisson summation keeps the cross term 4 pi k h; for h near 1 the k = -1
/// image dominates (about 2e-12 at h = 1).
inline double aliasing_defect(double h) {
  require_spacing(h);
  constexpr double pi = std::numbers::pi;
  double sum = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double base = -4.0 * pi * pi * k * k;
    sum += std::exp(base - 4.0 * pi * k * h) + std::exp(base + 4.0 * pi * k * h);
  }
  return sum;
}

/// epsilon = e^{h^2} sum_{k != 0} exp(-4 pi^2 k^2). Reported, never subtracted.
inline double gaussian_sum_epsilon(double h) {
  require_spacing(h);
  return std::exp(h * h) * aliasing_sum();
}

/// sum_{|m| > M} psi_h(x + m h), summed outward until terms fall below 1e-30.
inline double truncation_tail(double h, int M, double x) {
  require_spacing(h);
  constexpr double cutoff = 1e-30;
  double tail = 0.0;
  for (int m = M + 1;; ++m) {
    const double z = x + m * h;
    const double term = psi(h, z);
    tail += term;
    if (term < cutoff && z > 0.0) break;
  }
  for (int m = M + 1;; ++m) {
    const double z = x - m * h;
    const double term = psi(h, z);
    tail += term;
    if (term < cutoff && z < 0.0) break;
  }
  return tail;
}

struct BoundBreakdown {
  double epsilon = 0.0;   ///< e^{h^2} sum_{k!=0} e^{-4 pi^2 k^2}
  double aliasing = 0.0;  ///< e^{-h^2} times aliasing_defect(h)
  double tail = 0.0;      ///< max over the grid of the truncation tail
  double delta1 = 0.0;    ///< aliasing + tail
  double delta2 = 0.0;    ///< rational-fit defect
  double total = 0.0;     ///< e^{h^2} (delta1 + (2M + 1) delta2)
};

inline BoundBreakdown bound_breakdown(double h, int M, std::span<const double> x_grid,
                                      double delta2 = kDefaultFitDefect) {
  require_spacing(h);
  if (M < 0) throw std::invalid_argument("bound: M must be nonnegative");
  BoundBreakdown b;
  const double growth = std::exp(h * h);
  b.epsilon = gaussian_sum_epsilon(h);
  b.aliasing = aliasing_defect(h) / growth;
  for (double x : x_grid) b.tail = std::max(b.tail, truncation_tail(h, M, x));
  b.delta1 = b.aliasing + b.tail;
  b.delta2 = delta2;
  b.total = growth * (b.delta1 + (2.0 * M + 1.0) * delta2);
  return b;
}

inline double bound_total(double h, int M, std::span<const double> x_grid,
                          double delta2 = kDefaultFitDefect) {
  return bound_breakdown(h, M, x_grid, delta2).total;
}

inline double bound_total(double h, int M, double x, double delta2 = kDefaultFitDefect) {
  return bound_total(h, M, std::span<const double>(&x, 1), delta2);
}

}  // namespace rexi
