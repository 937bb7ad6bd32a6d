#pragma once

// Single-step REXI and REXII for the shallow water system in Fourier space.
// Terms are processed in S sequential chunks; the terms of one chunk may run
// concurrently. The real part is taken spectrally as (S(k) + conj S(-k)) / 2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rexi/detail/parallel.hpp"
#include "rexi/matrix_eval.hpp"
#include "rexi/rexi_terms.hpp"
#include "rexi/lrsw/operator.hpp"
#include "rexi/lrsw/state.hpp"

namespace rexi::lrsw {

struct StepOptions {
  std::size_t chunks = 0;  ///< S; 0 picks the smallest count that fits the memory budget
  unsigned threads = 1;
  bool deterministic = true;
};

struct StepStats {
  std::size_t terms = 0;
  std::size_t solves = 0;
  std::size_t chunks = 0;
};

inline constexpr double kChunkBudgetBytes = 512.0 * 1024.0 * 1024.0;

/// Smallest S with terms / S * 6 * 16 * D^2 bytes <= 512 MiB.
inline std::size_t default_chunks(std::size_t terms, int D) {
  const double per_term = 6.0 * 16.0 * static_cast<double>(D) * static_cast<double>(D);
  const double total = per_term * static_cast<double>(terms);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / kChunkBudgetBytes)));
}

/// Per-mode shifted solves on stacked [eta | u | v] vectors for tau A.
class ShallowWaterSolveOracle final : public ShiftedSolveOracle {
 public:
  ShallowWaterSolveOracle(int D, double tau) : D_(D), tau_(tau), k_(angular_wavenumbers(D)) {}

  [[nodiscard]] std::size_t dimension() const override { return 3 * static_cast<std::size_t>(D_) * static_cast<std::size_t>(D_); }
  [[nodiscard]] bool real_operator() const override { return false; }
  [[nodiscard]] int grid() const { return D_; }
  [[nodiscard]] double tau() const { return tau_; }

  using ShiftedSolveOracle::solve;
  void solve(cplx alpha, int sign, std::span<const cplx> rhs, std::span<cplx> out) const override {
    if (sign != 1 && sign != -1) throw std::invalid_argument("shifted solve: sign must be +1 or -1");
    detail::solve_modes(rhs, out, D_, k_, alpha, sign * tau_);
  }

 private:
  int D_;
  double tau_;
  std::vector<double> k_;
};

namespace detail {

inline ExecPolicy step_policy(const StepOptions& opts, std::size_t terms, int D, StepStats& stats) {
  ExecPolicy policy;
  policy.threads = std::max(1U, opts.threads);
  policy.deterministic = opts.deterministic;
  policy.chunks = opts.chunks == 0 ? default_chunks(terms, D) : opts.chunks;
  stats.terms = terms;
  stats.chunks = std::min(policy.chunks, terms);
  return policy;
}

}  // namespace detail

/// REXII approximation of e^{tau A} state0 via terms n = 0..N with weights
/// Gamma_0 = 1, Gamma_n = 2, followed by the real-part projection.
inline SpectralState rexii_step(const RexiTermTable& table, const SpectralState& state0, double tau,
                                const StepOptions& opts = {}, StepStats* stats = nullptr) {
  if (table.variant != Variant::Rexii) throw std::invalid_argument("rexii_step: needs a REXII term table");
  require_grid(state0.D);
  const ShallowWaterSolveOracle oracle(state0.D, tau);
  const std::size_t dim = oracle.dimension();
  const auto terms = static_cast<std::size_t>(table.N + 1);
  StepStats local;
  const ExecPolicy policy = detail::step_policy(opts, terms, state0.D, local);

  SpectralState out = SpectralState::zeros(state0.D);
  const std::span<const cplx> f0(state0.data);
  rexi::detail::reduce_terms(terms, std::span<cplx>(out.data), policy, [&](std::size_t t, std::span<cplx> dst) {
    const int n = static_cast<int>(t);
    const std::size_t i = table.index(n);
    const cplx alpha_minus = table.alpha_at(-n);
    thread_local std::vector<cplx> g1;
    thread_local std::vector<cplx> g2;
    g1.resize(dim);
    g2.resize(dim);
    oracle.solve(table.alpha[i], +1, f0, g1);
    oracle.solve(alpha_minus, -1, g1, g2);
    const double gamma = n > 0 ? 2.0 : 1.0;
    const cplx w1 = gamma * table.C2[i];
    const cplx w2 = gamma * (table.C1[i] - table.C2[i] * alpha_minus);
    for (std::size_t j = 0; j < dim; ++j) dst[j] = w1 * g1[j] + w2 * g2[j];
  });
  project_real(out);
  local.solves = 2 * terms;
  if (stats != nullptr) *stats = local;
  return out;
}

/// Original REXI: sum_{n=-N}^{N} Re(betaRe_n (tau A + alpha_n I)^{-1} state0).
inline SpectralState rexi_step(const RexiTermTable& table, const SpectralState& state0, double tau,
                               const StepOptions& opts = {}, StepStats* stats = nullptr) {
  if (table.variant != Variant::Rexi) throw std::invalid_argument("rexi_step: needs a REXI term table");
  require_grid(state0.D);
  const ShallowWaterSolveOracle oracle(state0.D, tau);
  const std::size_t terms = table.size();
  StepStats local;
  const ExecPolicy policy = detail::step_policy(opts, terms, state0.D, local);

  SpectralState out = SpectralState::zeros(state0.D);
  const std::span<const cplx> f0(state0.data);
  rexi::detail::reduce_terms(terms, std::span<cplx>(out.data), policy, [&](std::size_t t, std::span<cplx> dst) {
    oracle.solve(table.alpha[t], +1, f0, dst);
    const cplx w = table.beta_re[t];
    for (auto& x : dst) x *= w;
  });
  project_real(out);
  local.solves = terms;
  if (stats != nullptr) *stats = local;
  return out;
}

}  // namespace rexi::lrsw
