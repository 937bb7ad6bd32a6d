#pragma once

// Linear rotating shallow water operator with unit gravity and Coriolis
// parameter,
//
//   eta_t = -u_x - v_y,   u_t = -eta_x + v,   v_t = -eta_y - u,
//
// which acts on the Fourier mode (k, l) as the skew-Hermitian matrix
//
//   A^ = [[0, -i kx, -i ky], [-i kx, 0, 1], [-i ky, -1, 0]],   kx = 2 pi k, ky = 2 pi l.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rexi/lrsw/state.hpp"

namespace rexi::lrsw {

/// 2 pi k for every DFT index.
inline std::vector<double> angular_wavenumbers(int D) {
  require_grid(D);
  std::vector<double> k(static_cast<std::size_t>(D));
  for (int i = 0; i < D; ++i) k[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * wavenumber(i, D);
  return k;
}

using Mat3 = std::array<std::array<cplx, 3>, 3>;

inline Mat3 mode_symbol(double kx, double ky) {
  const cplx i(0.0, 1.0);
  return {{{0.0, -i * kx, -i * ky}, {-i * kx, 0.0, 1.0}, {-i * ky, -1.0, 0.0}}};
}

/// scale * A applied to every mode.
inline SpectralState apply_A(const SpectralState& s, double scale = 1.0) {
  require_grid(s.D);
  const std::vector<double> k = angular_wavenumbers(s.D);
  SpectralState out = SpectralState::zeros(s.D);
  const cplx i(0.0, 1.0);
  for (int j = 0; j < s.D; ++j) {
    for (int ii = 0; ii < s.D; ++ii) {
      const auto m = static_cast<std::size_t>(j * s.D + ii);
      const double kx = k[static_cast<std::size_t>(ii)];
      const double ky = k[static_cast<std::size_t>(j)];
      const cplx eta = s.eta()[m];
      const cplx u = s.u()[m];
      const cplx v = s.v()[m];
      out.eta()[m] = scale * (-i * (kx * u + ky * v));
      out.u()[m] = scale * (-i * kx * eta + v);
      out.v()[m] = scale * (-i * ky * eta - u);
    }
  }
  return out;
}

namespace detail {

// Solves (alpha I + c A) g = rhs on stacked fields. For c != 0 this is
// (a I + A) g = rhs / c with a = alpha / c; the Helmholtz equation
//   eta = r0 / (-K^2 - kappa),  r0 = -(kappa / a) eta0 + zeta0 / a - delta0,  kappa = 1 + a^2
// gives eta, and the 2 x 2 Coriolis block gives (u, v).
inline void solve_modes(std::span<const cplx> rhs, std::span<cplx> out, int D, std::span<const double> k, cplx alpha,
                        double c) {
  const auto modes = static_cast<std::size_t>(D) * static_cast<std::size_t>(D);
  if (rhs.size() != 3 * modes || out.size() != 3 * modes) throw std::invalid_argument("solve_shifted: size mismatch");
  const cplx* e0 = rhs.data();
  const cplx* u0 = rhs.data() + modes;
  const cplx* v0 = rhs.data() + 2 * modes;
  cplx* e = out.data();
  cplx* u = out.data() + modes;
  cplx* v = out.data() + 2 * modes;

  if (c == 0.0) {
    if (std::abs(alpha) < 1e-14) throw std::domain_error("solve_shifted: vanishing shift");
    const cplx inv = 1.0 / alpha;
    for (std::size_t m = 0; m < 3 * modes; ++m) out[m] = rhs[m] * inv;
    return;
  }

  const cplx a = alpha / c;
  const cplx kappa = 1.0 + a * a;
  if (std::abs(a) < 1e-14 || std::abs(kappa) < 1e-14) throw std::domain_error("solve_shifted: singular shift");
  const cplx inv_a = 1.0 / a;
  const cplx inv_kappa = 1.0 / kappa;
  const double inv_c = 1.0 / c;
  const cplx i(0.0, 1.0);

  for (int j = 0; j < D; ++j) {
    const double ky = k[static_cast<std::size_t>(j)];
    for (int ii = 0; ii < D; ++ii) {
      const double kx = k[static_cast<std::size_t>(ii)];
      const auto m = static_cast<std::size_t>(j * D + ii);
      const cplx eta_r = e0[m] * inv_c;
      const cplx u_r = u0[m] * inv_c;
      const cplx v_r = v0[m] * inv_c;
      const cplx delta = i * (kx * u_r + ky * v_r);
      const cplx zeta = i * (kx * v_r - ky * u_r);
      const cplx r0 = (zeta - kappa * eta_r) * inv_a - delta;
      const cplx den = -(kx * kx + ky * ky) - kappa;
      if (std::abs(den) < 1e-14) throw std::domain_error("solve_shifted: singular Helmholtz denominator");
      const cplx eta = r0 / den;
      const cplx U = u_r + i * kx * eta;
      const cplx V = v_r + i * ky * eta;
      e[m] = eta;
      u[m] = (a * U - V) * inv_kappa;
      v[m] = (U + a * V) * inv_kappa;
    }
  }
}

}  // namespace detail

/// g with (alpha I + sign * scale * A) g = rhs.
inline SpectralState solve_shifted(const SpectralState& rhs, cplx alpha, int sign, double scale = 1.0) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("solve_shifted: sign must be +1 or -1");
  require_grid(rhs.D);
  const std::vector<double> k = angular_wavenumbers(rhs.D);
  SpectralState out = SpectralState::zeros(rhs.D);
  detail::solve_modes(rhs.data, out.data, rhs.D, k, alpha, sign * scale);
  return out;
}

/// e^{tau A^} per mode. With w^2 = kx^2 + ky^2 + 1 the symbol satisfies
/// A^3 = -w^2 A, hence e^{tau A^} = I + sin(w tau)/w A^ + (1 - cos(w tau))/w^2 A^2.
inline Mat3 mode_propagator(double kx, double ky, double tau) {
  const Mat3 A = mode_symbol(kx, ky);
  Mat3 A2{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      cplx s = 0.0;
      for (int q = 0; q < 3; ++q) s += A[r][q] * A[q][c];
      A2[r][c] = s;
    }
  }
  const double w = std::sqrt(kx * kx + ky * ky + 1.0);
  const double s1 = std::sin(w * tau) / w;
  const double half = std::sin(0.5 * w * tau) / w;
  const double s2 = 2.0 * half * half;
  Mat3 E{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) E[r][c] = (r == c ? 1.0 : 0.0) + s1 * A[r][c] + s2 * A2[r][c];
  }
  return E;
}

/// Exact e^{tau A} state0.
inline SpectralState exact_solution(const SpectralState& state0, double tau) {
  require_grid(state0.D);
  const int D = state0.D;
  const std::vector<double> k = angular_wavenumbers(D);
  SpectralState out = SpectralState::zeros(D);
  for (int j = 0; j < D; ++j) {
    for (int i = 0; i < D; ++i) {
      const auto m = static_cast<std::size_t>(j * D + i);
      const Mat3 E = mode_propagator(k[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(j)], tau);
      const std::array<cplx, 3> x{state0.eta()[m], state0.u()[m], state0.v()[m]};
      for (int r = 0; r < 3; ++r) out.field(r)[m] = E[r][0] * x[0] + E[r][1] * x[1] + E[r][2] * x[2];
    }
  }
  return out;
}

/// Classical RK4 for f' = A f with `steps` steps of size tau / steps.
inline SpectralState rk4_integrate(const SpectralState& state0, double tau, int steps) {
  if (steps < 1) throw std::invalid_argument("rk4_integrate: need at least one time step");
  require_grid(state0.D);
  const double dt = tau / steps;
  SpectralState f = state0;
  SpectralState stage = SpectralState::zeros(f.D);
  const std::size_t n = f.data.size();
  for (int s = 0; s < steps; ++s) {
    const SpectralState k1 = apply_A(f);
    for (std::size_t i = 0; i < n; ++i) stage.data[i] = f.data[i] + 0.5 * dt * k1.data[i];
    const SpectralState k2 = apply_A(stage);
    for (std::size_t i = 0; i < n; ++i) stage.data[i] = f.data[i] + 0.5 * dt * k2.data[i];
    const SpectralState k3 = apply_A(stage);
    for (std::size_t i = 0; i < n; ++i) stage.data[i] = f.data[i] + dt * k3.data[i];
    const SpectralState k4 = apply_A(stage);
    for (std::size_t i = 0; i < n; ++i) {
      f.data[i] += dt / 6.0 * (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
    }
  }
  return f;
}

}  // namespace rexi::lrsw
