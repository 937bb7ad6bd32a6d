#pragma once

// Matrix forms of the term tables, written against a shifted-solve capability
// so the same evaluators serve dense, spectral and PDE operators.
//
//   REXII(tau A) f0 = sum_n [C2_n g1_n + (C1_n - C2_n alpha_{-n}) g2_n]
//     g1_n = (alpha_n I + tau A)^{-1} f0,  g2_n = (alpha_{-n} I - tau A)^{-1} g1_n
//
// For real tau A and real f0 the n and -n terms are conjugate, so the sum can
// run over n = 0..N with weight 2 for n > 0 followed by a real part.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "rexi/detail/parallel.hpp"
#include "rexi/rexi_terms.hpp"

namespace rexi {

/// Solves (alpha I + sign * tauA) g = rhs for a fixed operator tauA.
///
/// Implementations must allow concurrent calls to solve() when
/// thread_safe() is true.
class ShiftedSolveOracle {
 public:
  virtual ~ShiftedSolveOracle() = default;

  [[nodiscard]] virtual std::size_t dimension() const = 0;
  /// True when tauA has only real entries.
  [[nodiscard]] virtual bool real_operator() const = 0;
  [[nodiscard]] virtual bool thread_safe() const { return true; }

  virtual void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const = 0;

  [[nodiscard]] std::vector<cplx> solve(cplx alpha, int sign, std::span<const cplx> rhs) const {
    std::vector<cplx> out(rhs.size());
    solve(alpha, sign, rhs, out);
    return out;
  }
};

namespace detail {

inline void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("shifted solve: sign must be +1 or -1");
}

inline void check_sizes(std::size_t dim, std::span<const cplx> rhs, std::span<cplx> out) {
  if (rhs.size() != dim || out.size() != dim) throw std::invalid_argument("shifted solve: dimension mismatch");
}

}  // namespace detail

/// Dense LU on alpha I + sign tauA, factorized per call.
class DenseSolveOracle final : public ShiftedSolveOracle {
 public:
  explicit DenseSolveOracle(Eigen::MatrixXcd tau_a) : op_(std::move(tau_a)) {
    if (op_.rows() != op_.cols()) throw std::invalid_argument("DenseSolveOracle: operator must be square");
    real_ = op_.imag().cwiseAbs().maxCoeff() == 0.0;
  }

  [[nodiscard]] std::size_t dimension() const override { return static_cast<std::size_t>(op_.rows()); }
  [[nodiscard]] bool real_operator() const override { return real_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return op_; }

  using ShiftedSolveOracle::solve;
  void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const override {
    detail::check_sign(sign);
    detail::check_sizes(dimension(), rhs, out);
    const auto n = op_.rows();
    Eigen::MatrixXcd shifted = static_cast<double>(sign) * op_;
    shifted.diagonal().array() += alpha;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    const Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), n);
    Eigen::Map<Eigen::VectorXcd>(out.data(), n) = lu.solve(b);
  }

 private:
  Eigen::MatrixXcd op_;
  bool real_ = false;
};

/// Circulant tauA, given by its first column, solved in the Fourier basis.
class CirculantSolveOracle final : public ShiftedSolveOracle {
 public:
  explicit CirculantSolveOracle(std::vector<cplx> first_column) : column_(std::move(first_column)) {
    if (column_.empty()) throw std::invalid_argument("CirculantSolveOracle: empty operator");
    Eigen::FFT<double> fft;
    fft.fwd(symbol_, column_);
    real_ = std::all_of(column_.begin(), column_.end(), [](cplx c) { return c.imag() == 0.0; });
  }

  [[nodiscard]] std::size_t dimension() const override { return column_.size(); }
  [[nodiscard]] bool real_operator() const override { return real_; }
  /// Eigenvalues of tauA in DFT order.
  [[nodiscard]] const std::vector<cplx>& symbol() const { return symbol_; }

  using ShiftedSolveOracle::solve;
  void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const override {
    detail::check_sign(sign);
    detail::check_sizes(dimension(), rhs, out);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(rhs.begin(), rhs.end());
    std::vector<cplx> spec;
    fft.fwd(spec, in);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] /= alpha + static_cast<double>(sign) * symbol_[k];
    std::vector<cplx> back;
    fft.inv(back, spec);
    std::copy(back.begin(), back.end(), out.begin());
  }

 private:
  std::vector<cplx> column_;
  std::vector<cplx> symbol_;
  bool real_ = false;
};

/// Diagonal tauA; covers the zero operator and diagonal test cases.
class DiagonalSolveOracle final : public ShiftedSolveOracle {
 public:
  explicit DiagonalSolveOracle(std::vector<cplx> diagonal) : diag_(std::move(diagonal)) {
    real_ = std::all_of(diag_.begin(), diag_.end(), [](cplx c) { return c.imag() == 0.0; });
  }

  static DiagonalSolveOracle zero(std::size_t n) { return DiagonalSolveOracle(std::vector<cplx>(n, 0.0)); }

  [[nodiscard]] std::size_t dimension() const override { return diag_.size(); }
  [[nodiscard]] bool real_operator() const override { return real_; }

  using ShiftedSolveOracle::solve;
  void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const override {
    detail::check_sign(sign);
    detail::check_sizes(dimension(), rhs, out);
    for (std::size_t i = 0; i < diag_.size(); ++i) out[i] = rhs[i] / (alpha + static_cast<double>(sign) * diag_[i]);
  }

 private:
  std::vector<cplx> diag_;
  bool real_ = false;
};

/// Forwards to another oracle and counts solve() calls.
class CountingOracle final : public ShiftedSolveOracle {
 public:
  explicit CountingOracle(const ShiftedSolveOracle& inner) : inner_(inner) {}

  [[nodiscard]] std::size_t dimension() const override { return inner_.dimension(); }
  [[nodiscard]] bool real_operator() const override { return inner_.real_operator(); }
  [[nodiscard]] bool thread_safe() const override { return inner_.thread_safe(); }
  [[nodiscard]] std::size_t count() const { return count_.load(); }

  using ShiftedSolveOracle::solve;
  void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const override {
    count_.fetch_add(1);
    inner_.solve(alpha, sign, rhs, out);
  }

 private:
  const ShiftedSolveOracle& inner_;
  mutable std::atomic<std::size_t> count_{0};
};

namespace detail {

inline ExecPolicy effective_policy(const ShiftedSolveOracle& oracle, ExecPolicy policy, std::size_t terms,
                                   std::size_t width) {
  if (!oracle.thread_safe()) policy.threads = 1;
  // Keep the staged contributions of one chunk under 512 MiB.
  constexpr double budget = 512.0 * 1024.0 * 1024.0;
  const double bytes = static_cast<double>(terms) * static_cast<double>(width) * sizeof(cplx);
  policy.chunks = std::max<std::size_t>(policy.chunks, static_cast<std::size_t>(std::ceil(bytes / budget)));
  return policy;
}

inline void require_variant(const RexiTermTable& t, Variant v) {
  if (t.variant != v) throw std::invalid_argument("term table variant does not match the evaluator");
}

}  // namespace detail

/// REXII applied to f0. With half_sum, tauA and f0 must be real and the
/// result is real up to representation (imaginary parts are zero).
inline std::vector<cplx> apply_rexii(const RexiTermTable& table, const ShiftedSolveOracle& oracle,
                                     std::span<const cplx> f0, bool half_sum, const ExecPolicy& policy = {}) {
  detail::require_variant(table, Variant::Rexii);
  const std::size_t dim = oracle.dimension();
  if (f0.size() != dim) throw std::invalid_argument("apply_rexii: f0 has the wrong dimension");
  if (half_sum) {
    if (!oracle.real_operator()) throw std::invalid_argument("apply_rexii: half sum needs a real operator");
    if (std::any_of(f0.begin(), f0.end(), [](cplx c) { return c.imag() != 0.0; })) {
      throw std::invalid_argument("apply_rexii: half sum needs a real f0");
    }
  }

  const int N = table.N;
  const std::size_t terms = half_sum ? static_cast<std::size_t>(N + 1) : table.size();
  std::vector<cplx> acc(dim);
  const ExecPolicy run = detail::effective_policy(oracle, policy, terms, dim);
  detail::reduce_terms(terms, std::span<cplx>(acc), run, [&](std::size_t t, std::span<cplx> out) {
    const int n = half_sum ? static_cast<int>(t) : static_cast<int>(t) - N;
    const std::size_t i = table.index(n);
    const cplx alpha_minus = table.alpha_at(-n);
    std::vector<cplx> g1(dim);
    std::vector<cplx> g2(dim);
    oracle.solve(table.alpha[i], +1, f0, g1);
    oracle.solve(alpha_minus, -1, g1, g2);
    const double gamma = (half_sum && n > 0) ? 2.0 : 1.0;
    const cplx w1 = gamma * table.C2[i];
    const cplx w2 = gamma * (table.C1[i] - table.C2[i] * alpha_minus);
    for (std::size_t j = 0; j < dim; ++j) out[j] = w1 * g1[j] + w2 * g2[j];
  });
  if (half_sum) {
    for (auto& v : acc) v = v.real();
  }
  return acc;
}

inline std::vector<cplx> apply_rexii(const RexiTermTable& table, const ShiftedSolveOracle& oracle,
                                     std::span<const double> f0, bool half_sum, const ExecPolicy& policy = {}) {
  const std::vector<cplx> f(f0.begin(), f0.end());
  return apply_rexii(table, oracle, std::span<const cplx>(f), half_sum, policy);
}

/// Original scheme: sum_n Re(betaRe_n (tauA + alpha_n I)^{-1} f0).
inline std::vector<double> apply_rexi(const RexiTermTable& table, const ShiftedSolveOracle& oracle,
                                      std::span<const double> f0, const ExecPolicy& policy = {}) {
  detail::require_variant(table, Variant::Rexi);
  const std::size_t dim = oracle.dimension();
  if (f0.size() != dim) throw std::invalid_argument("apply_rexi: f0 has the wrong dimension");
  if (!oracle.real_operator()) throw std::invalid_argument("apply_rexi: operator must be real");

  const std::vector<cplx> f(f0.begin(), f0.end());
  std::vector<cplx> acc(dim);
  const ExecPolicy run = detail::effective_policy(oracle, policy, table.size(), dim);
  detail::reduce_terms(table.size(), std::span<cplx>(acc), run, [&](std::size_t t, std::span<cplx> out) {
    oracle.solve(table.alpha[t], +1, f, out);
    const cplx w = table.beta_re[t];
    for (auto& v : out) v = (w * v).real();
  });
  std::vector<double> result(dim);
  for (std::size_t j = 0; j < dim; ++j) result[j] = acc[j].real();
  return result;
}

/// REXIE, for tauA = iB with B real diagonalizable and real f0:
/// sum_n Re(betaRe_n g_n) + i Re(betaIm_n g_n), g_n = (tauA + alpha_n I)^{-1} f0.
inline std::vector<cplx> apply_rexie(const RexiTermTable& table, const ShiftedSolveOracle& oracle,
                                     std::span<const double> f0, const ExecPolicy& policy = {}) {
  detail::require_variant(table, Variant::Rexi);
  const std::size_t dim = oracle.dimension();
  if (f0.size() != dim) throw std::invalid_argument("apply_rexie: f0 has the wrong dimension");

  const std::vector<cplx> f(f0.begin(), f0.end());
  std::vector<cplx> acc(dim);
  const ExecPolicy run = detail::effective_policy(oracle, policy, table.size(), dim);
  detail::reduce_terms(table.size(), std::span<cplx>(acc), run, [&](std::size_t t, std::span<cplx> out) {
    oracle.solve(table.alpha[t], +1, f, out);
    const cplx wr = table.beta_re[t];
    const cplx wi = table.beta_im[t];
    for (auto& v : out) v = cplx((wr * v).real(), (wi * v).real());
  });
  return acc;
}

/// Eigenvalues of A lie in i[zeta1, zeta2]; rho is the spectral radius.
struct SpectrumInfo {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double rho = 0.0;
};

struct SpectralShift {
  cplx nu;            ///< i (zeta1 + zeta2) / 2
  double rho = 0.0;   ///< spectral radius of A - nu I
};

/// Centering shift; e^{tau A} = e^{tau nu} e^{tau (A - nu I)}.
inline SpectralShift center_shift(double zeta1, double zeta2) {
  if (!(zeta1 <= zeta2)) throw std::invalid_argument("center_shift: need zeta1 <= zeta2");
  return {cplx(0.0, 0.5 * (zeta1 + zeta2)), 0.5 * (zeta2 - zeta1)};
}

inline SpectrumInfo shifted(const SpectrumInfo& s, const SpectralShift& shift) {
  return {s.zeta1 - shift.nu.imag(), s.zeta2 - shift.nu.imag(), shift.rho};
}

/// ||V||_inf ||V^{-1}||_inf (max absolute row sums).
inline double condition_inf(const Eigen::MatrixXcd& V) {
  if (V.rows() != V.cols() || V.rows() == 0) throw std::invalid_argument("condition_inf: V must be square");
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
  if (!lu.isInvertible()) throw std::domain_error("condition_inf: V is singular");
  const Eigen::MatrixXcd inv = lu.inverse();
  const double norm_v = V.cwiseAbs().rowwise().sum().maxCoeff();
  const double norm_inv = inv.cwiseAbs().rowwise().sum().maxCoeff();
  return norm_v * norm_inv;
}

/// cond_inf(V) * max_j |REXII(i tau lambda_j) - e^{i tau lambda_j}|, the bound
/// on ||REXII(tau A) - e^{tau A}||_inf for A = V diag(i lambda) V^{-1}.
inline double diagonalizable_bound(const Eigen::MatrixXcd& V, std::span<const double> scalar_errors) {
  const double worst = scalar_errors.empty() ? 0.0 : *std::max_element(scalar_errors.begin(), scalar_errors.end());
  return condition_inf(V) * worst;
}

/// Dense REXII(tau A), column by column through the oracle.
inline Eigen::MatrixXcd rexii_matrix(const RexiTermTable& table, const ShiftedSolveOracle& oracle,
                                     const ExecPolicy& policy = {}) {
  const auto n = static_cast<Eigen::Index>(oracle.dimension());
  Eigen::MatrixXcd out(n, n);
  std::vector<cplx> unit(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    std::fill(unit.begin(), unit.end(), cplx(0.0));
    unit[static_cast<std::size_t>(j)] = 1.0;
    const auto col = apply_rexii(table, oracle, std::span<const cplx>(unit), oracle.real_operator(), policy);
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = col[static_cast<std::size_t>(i)];
  }
  return out;
}

inline double relative_l2_error(std::span<const cplx> approx, std::span<const cplx> reference) {
  if (approx.size() != reference.size()) throw std::invalid_argument("relative_l2_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    num += std::norm(approx[i] - reference[i]);
    den += std::norm(reference[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace rexi
