#pragma once

// Fourier representation of (eta, u, v) on the D x D periodic grid over [0, 1)^2.
// Entry (i, j) lives at j * D + i, x_i = i / D, y_j = j / D, and
//
//   X(x, y) = sum_{k,l} X^(k, l) exp(2 pi i (k x + l y)),  k, l in {-D/2, .., D/2 - 1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

namespace rexi::lrsw {

using cplx = std::complex<double>;

inline void require_grid(int D) {
  if (D < 2 || D % 2 != 0) throw std::invalid_argument("grid size D must be even and >= 2, got " + std::to_string(D));
}

/// Signed wavenumber of DFT index i.
inline int wavenumber(int i, int D) { return i < D / 2 ? i : i - D; }

/// DFT index of the wavenumber opposite to index i.
inline int mirror(int i, int D) { return (D - i) % D; }

/// Three complex Fourier fields stored back to back: [eta | u | v].
struct SpectralState {
  int D = 0;
  std::vector<cplx> data;

  static SpectralState zeros(int D) {
    require_grid(D);
    return {D, std::vector<cplx>(3 * static_cast<std::size_t>(D) * static_cast<std::size_t>(D))};
  }

  [[nodiscard]] std::size_t modes() const { return static_cast<std::size_t>(D) * static_cast<std::size_t>(D); }
  [[nodiscard]] std::span<cplx> field(int c) { return {data.data() + static_cast<std::size_t>(c) * modes(), modes()}; }
  [[nodiscard]] std::span<const cplx> field(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * modes(), modes()};
  }
  [[nodiscard]] std::span<cplx> eta() { return field(0); }
  [[nodiscard]] std::span<cplx> u() { return field(1); }
  [[nodiscard]] std::span<cplx> v() { return field(2); }
  [[nodiscard]] std::span<const cplx> eta() const { return field(0); }
  [[nodiscard]] std::span<const cplx> u() const { return field(1); }
  [[nodiscard]] std::span<const cplx> v() const { return field(2); }

  cplx& at(int c, int i, int j) { return data[static_cast<std::size_t>(c) * modes() + static_cast<std::size_t>(j * D + i)]; }
  [[nodiscard]] cplx at(int c, int i, int j) const {
    return data[static_cast<std::size_t>(c) * modes() + static_cast<std::size_t>(j * D + i)];
  }
};

/// Grid values of (eta, u, v), same layout as SpectralState.
struct PhysicalState {
  int D = 0;
  std::vector<double> data;

  static PhysicalState zeros(int D) {
    require_grid(D);
    return {D, std::vector<double>(3 * static_cast<std::size_t>(D) * static_cast<std::size_t>(D))};
  }

  [[nodiscard]] std::size_t points() const { return static_cast<std::size_t>(D) * static_cast<std::size_t>(D); }
  [[nodiscard]] std::span<double> field(int c) { return {data.data() + static_cast<std::size_t>(c) * points(), points()}; }
  [[nodiscard]] std::span<const double> field(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * points(), points()};
  }
  double& at(int c, int i, int j) { return data[static_cast<std::size_t>(c) * points() + static_cast<std::size_t>(j * D + i)]; }
  [[nodiscard]] double at(int c, int i, int j) const {
    return data[static_cast<std::size_t>(c) * points() + static_cast<std::size_t>(j * D + i)];
  }
};

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place unnormalized 2D DFT of one D x D field.
inline void fft2(std::span<cplx> field, int D, int direction) {
  auto* ptr = reinterpret_cast<fftw_complex*>(field.data());
  fftw_plan plan = nullptr;
  {
    std::scoped_lock lock(planner_mutex());
    plan = fftw_plan_dft_2d(D, D, ptr, ptr, direction, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  fftw_execute(plan);
  std::scoped_lock lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace detail

inline SpectralState forward(const PhysicalState& p) {
  require_grid(p.D);
  SpectralState s = SpectralState::zeros(p.D);
  std::copy(p.data.begin(), p.data.end(), s.data.begin());
  const double scale = 1.0 / static_cast<double>(s.modes());
  for (int c = 0; c < 3; ++c) {
    detail::fft2(s.field(c), p.D, FFTW_FORWARD);
    for (auto& x : s.field(c)) x *= scale;
  }
  return s;
}

/// Complex grid values of all three fields.
inline std::vector<cplx> inverse_complex(const SpectralState& s) {
  require_grid(s.D);
  std::vector<cplx> out = s.data;
  for (int c = 0; c < 3; ++c) {
    detail::fft2(std::span<cplx>(out.data() + static_cast<std::size_t>(c) * s.modes(), s.modes()), s.D, FFTW_BACKWARD);
  }
  return out;
}

/// Real part of the grid values.
inline PhysicalState inverse(const SpectralState& s) {
  const std::vector<cplx> values = inverse_complex(s);
  PhysicalState p = PhysicalState::zeros(s.D);
  for (std::size_t i = 0; i < values.size(); ++i) p.data[i] = values[i].real();
  return p;
}

/// (X^(k) + conj X^(-k)) / 2 per field: the transform of the real part.
inline void project_real(std::span<cplx> stacked, int D) {
  const auto modes = static_cast<std::size_t>(D) * static_cast<std::size_t>(D);
  if (stacked.size() != 3 * modes) throw std::invalid_argument("project_real: size mismatch");
  std::vector<cplx> copy(stacked.begin(), stacked.end());
  for (std::size_t c = 0; c < 3; ++c) {
    const cplx* src = copy.data() + c * modes;
    cplx* dst = stacked.data() + c * modes;
    for (int j = 0; j < D; ++j) {
      for (int i = 0; i < D; ++i) {
        const auto here = static_cast<std::size_t>(j * D + i);
        const auto there = static_cast<std::size_t>(mirror(j, D) * D + mirror(i, D));
        dst[here] = 0.5 * (src[here] + std::conj(src[there]));
      }
    }
  }
}

inline void project_real(SpectralState& s) { project_real(std::span<cplx>(s.data), s.D); }

/// Largest |X^(-k) - conj X^(k)| over all fields.
inline double conjugate_symmetry_defect(const SpectralState& s) {
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < s.D; ++j) {
      for (int i = 0; i < s.D; ++i) {
        worst = std::max(worst, std::abs(s.at(c, mirror(i, s.D), mirror(j, s.D)) - std::conj(s.at(c, i, j))));
      }
    }
  }
  return worst;
}

/// max |numeric - reference| over all grid points and fields, after the real-part projection.
inline double max_norm_error(const SpectralState& numeric, const SpectralState& reference) {
  if (numeric.D != reference.D || numeric.data.size() != reference.data.size()) {
    throw std::invalid_argument("max_norm_error: grid size mismatch");
  }
  const PhysicalState a = inverse(numeric);
  const PhysicalState b = inverse(reference);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

/// Per-mode sum of |eta|^2 + |u|^2 + |v|^2.
inline std::vector<double> mode_norms(const SpectralState& s) {
  std::vector<double> out(s.modes());
  for (std::size_t m = 0; m < s.modes(); ++m) {
    out[m] = std::norm(s.eta()[m]) + std::norm(s.u()[m]) + std::norm(s.v()[m]);
  }
  return out;
}

}  // namespace rexi::lrsw
