#pragma once

// Single-sum term tables. With n = m + l, N = M + L and alpha_n = h (mu + i n),
// the double sum sum_m b_m sum_l Re(h a_l / (i x + alpha_{m+l})) collapses to
//
//   REXI(ix)  = sum_n Re(betaRe_n / (ix + alpha_n)) + i Re(betaIm_n / (ix + alpha_n))
//   REXII(ix) = sum_n (c1_n h mu + c2_n (x + h n)) / ((alpha_{-n} - ix)(alpha_n + ix))
//
// with convolution weights over the window k in [max(-L, n-M), min(L, n+M)]:
//
//   betaRe_n = h sum_k a_k Re b_{n-k}      c1_n = h sum_k Re(a_k) b_{n-k}
//   betaIm_n = h sum_k a_k Im b_{n-k}      c2_n = h sum_k Im(a_k) b_{n-k}

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rexi/gauss_kernel.hpp"
#include "rexi/rational_fit.hpp"

namespace rexi {

enum class Variant { Rexi, Rexii };

inline std::string to_string(Variant v) { return v == Variant::Rexi ? "rexi" : "rexii"; }

struct RexiTermTable {
  double h = 0.0;
  int M = 0;
  int L = 0;
  int N = 0;
  double mu = 0.0;
  Variant variant = Variant::Rexii;

  // All per-term arrays are indexed by n + N for n in [-N, N].
  std::vector<cplx> alpha;
  std::vector<cplx> beta_re;  // REXI only
  std::vector<cplx> beta_im;  // REXI only
  std::vector<cplx> c1;       // REXII only
  std::vector<cplx> c2;       // REXII only
  std::vector<cplx> C1;       // REXII only: c1 h mu + c2 h n
  std::vector<cplx> C2;       // REXII only: i c2

  [[nodiscard]] std::size_t size() const { return alpha.size(); }
  [[nodiscard]] std::size_t index(int n) const { return static_cast<std::size_t>(n + N); }
  [[nodiscard]] cplx alpha_at(int n) const { return alpha[index(n)]; }
};

namespace detail {

// Window sum h * sum_k f(a_k) g(b_{n-k}).
template <class WeightOf>
cplx convolve(int n, int M, int L, double h, const std::vector<cplx>& b, const RationalGaussianCoeffs& c,
              WeightOf&& weight) {
  cplx sum = 0.0;
  const int k_lo = std::max(-L, n - M);
  const int k_hi = std::min(L, n + M);
  for (int k = k_lo; k <= k_hi; ++k) sum += weight(c.at(k), b[static_cast<std::size_t>(n - k + M)]);
  return h * sum;
}

}  // namespace detail

/// Builds the 2N + 1 term table for (h, M). Weights for n < 0 are the mirror
/// images of n > 0 (conj for c1 and betaRe, minus conj for c2 and betaIm) and
/// the n = 0 weights are reduced to their real or imaginary part, so the
/// conjugation symmetries hold exactly.
inline RexiTermTable build_terms(double h, int M, const RationalGaussianCoeffs& coeffs, Variant variant) {
  require_spacing(h);
  require_valid(coeffs);
  if (M < 0) throw std::invalid_argument("build_terms: M must be nonnegative");

  RexiTermTable t;
  t.h = h;
  t.M = M;
  t.L = coeffs.L();
  t.N = M + t.L;
  t.mu = coeffs.mu;
  t.variant = variant;
  const int N = t.N;
  const std::size_t count = static_cast<std::size_t>(2 * N + 1);

  t.alpha.resize(count);
  for (int n = -N; n <= N; ++n) t.alpha[t.index(n)] = cplx(h * coeffs.mu, h * n);

  // b_m for m in [-M, M], stored at m + M.
  std::vector<cplx> b(static_cast<std::size_t>(2 * M + 1));
  for (int m = 0; m <= M; ++m) {
    b[static_cast<std::size_t>(M + m)] = b_coeff(h, m);
    b[static_cast<std::size_t>(M - m)] = std::conj(b[static_cast<std::size_t>(M + m)]);
  }

  if (variant == Variant::Rexi) {
    t.beta_re.resize(count);
    t.beta_im.resize(count);
    for (int n = 0; n <= N; ++n) {
      const cplx re = detail::convolve(n, M, t.L, h, b, coeffs, [](cplx a, cplx bm) { return a * bm.real(); });
      const cplx im = detail::convolve(n, M, t.L, h, b, coeffs, [](cplx a, cplx bm) { return a * bm.imag(); });
      t.beta_re[t.index(n)] = n == 0 ? cplx(re.real(), 0.0) : re;
      t.beta_im[t.index(n)] = n == 0 ? cplx(0.0, im.imag()) : im;
      if (n > 0) {
        t.beta_re[t.index(-n)] = std::conj(re);
        t.beta_im[t.index(-n)] = -std::conj(im);
      }
    }
    return t;
  }

  t.c1.resize(count);
  t.c2.resize(count);
  t.C1.resize(count);
  t.C2.resize(count);
  for (int n = 0; n <= N; ++n) {
    const cplx w1 = detail::convolve(n, M, t.L, h, b, coeffs, [](cplx a, cplx bm) { return a.real() * bm; });
    const cplx w2 = detail::convolve(n, M, t.L, h, b, coeffs, [](cplx a, cplx bm) { return a.imag() * bm; });
    t.c1[t.index(n)] = n == 0 ? cplx(w1.real(), 0.0) : w1;
    t.c2[t.index(n)] = n == 0 ? cplx(0.0, w2.imag()) : w2;
    if (n > 0) {
      t.c1[t.index(-n)] = std::conj(w1);
      t.c2[t.index(-n)] = -std::conj(w2);
    }
  }
  for (int n = -N; n <= N; ++n) {
    const std::size_t i = t.index(n);
    t.C1[i] = t.c1[i] * (h * coeffs.mu) + t.c2[i] * (h * n);
    t.C2[i] = cplx(0.0, 1.0) * t.c2[i];
  }
  return t;
}

/// Scalar approximation of e^{ix}; terms are summed for ascending n.
inline cplx eval_scalar(const RexiTermTable& t, double x) {
  const cplx ix(0.0, x);
  cplx sum = 0.0;
  if (t.variant == Variant::Rexi) {
    for (int n = -t.N; n <= t.N; ++n) {
      const std::size_t i = t.index(n);
      const cplx d = ix + t.alpha[i];
      sum += cplx((t.beta_re[i] / d).real(), (t.beta_im[i] / d).real());
    }
    return sum;
  }
  for (int n = -t.N; n <= t.N; ++n) {
    const std::size_t i = t.index(n);
    const cplx num = t.c1[i] * (t.h * t.mu) + t.c2[i] * (x + t.h * n);
    sum += num / ((t.alpha[t.index(-n)] - ix) * (t.alpha[i] + ix));
  }
  return sum;
}

/// |eval_scalar - e^{ix}| for every (h, M); result[i][j] pairs h_list[i], M_list[j].
inline std::vector<std::vector<double>> scalar_error_study(std::span<const double> h_list, std::span<const int> M_list,
                                                           double x, const RationalGaussianCoeffs& coeffs,
                                                           Variant variant = Variant::Rexii) {
  for (double h : h_list) require_spacing(h);
  const cplx exact = std::polar(1.0, x);
  std::vector<std::vector<double>> errors;
  errors.reserve(h_list.size());
  for (double h : h_list) {
    auto& row = errors.emplace_back();
    row.reserve(M_list.size());
    for (int M : M_list) row.push_back(std::abs(eval_scalar(build_terms(h, M, coeffs, variant), x) - exact));
  }
  return errors;
}

}  // namespace rexi
