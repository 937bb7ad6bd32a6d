#pragma once

// Initial conditions and the M estimate for single-step runs.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rexi/gauss_kernel.hpp"
#include "rexi/lrsw/state.hpp"

namespace rexi::lrsw {

enum class Scenario { Wave1, Wave2, Gaussian };

inline Scenario parse_scenario(const std::string& name) {
  if (name == "wave1") return Scenario::Wave1;
  if (name == "wave2") return Scenario::Wave2;
  if (name == "gaussian") return Scenario::Gaussian;
  throw std::invalid_argument("unknown scenario '" + name + "' (expected wave1, wave2 or gaussian)");
}

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Wave1: return "wave1";
    case Scenario::Wave2: return "wave2";
    case Scenario::Gaussian: return "gaussian";
  }
  return "?";
}

/// Largest |k| or |l| present in the initial fields.
inline int max_wavenumber(Scenario s) { return s == Scenario::Wave1 ? 4 : 32; }

/// Grid size entering the spectral radius estimate. The wave scenarios only
/// populate a few low modes, so D is fixed by their band limit.
inline int effective_D(Scenario s, int D) {
  switch (s) {
    case Scenario::Wave1: return 6;
    case Scenario::Wave2: return 46;
    case Scenario::Gaussian: return D;
  }
  return D;
}

/// sqrt(2 pi^2 D^2 + 1), the symbol norm at the corner mode.
inline double spectral_radius(int D) {
  const double d = static_cast<double>(D);
  return std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * d * d + 1.0);
}

inline int estimate_M(int D_effective, double tau, double h) {
  if (D_effective < 0) throw std::invalid_argument("estimate_M: D must be nonnegative");
  if (!(tau >= 0.0)) throw std::invalid_argument("estimate_M: tau must be nonnegative");
  return min_M(h, tau * spectral_radius(D_effective));
}

/// Samples the scenario on the D x D grid. D must resolve the highest
/// wavenumber strictly below Nyquist.
inline PhysicalState initial_physical(Scenario s, int D) {
  require_grid(D);
  if (D <= 2 * max_wavenumber(s)) {
    throw std::invalid_argument(to_string(s) + " needs D > " + std::to_string(2 * max_wavenumber(s)) + ", got " +
                                std::to_string(D));
  }
  const double pi = std::numbers::pi;
  PhysicalState p = PhysicalState::zeros(D);
  for (int j = 0; j < D; ++j) {
    const double y = static_cast<double>(j) / D;
    for (int i = 0; i < D; ++i) {
      const double x = static_cast<double>(i) / D;
      switch (s) {
        case Scenario::Wave1:
          p.at(0, i, j) = std::sin(4 * pi * x) * std::cos(2 * pi * y) - 0.2 * std::cos(4 * pi * x) * std::sin(4 * pi * y);
          p.at(1, i, j) = std::cos(8 * pi * x) * std::cos(2 * pi * y);
          p.at(2, i, j) = std::cos(4 * pi * x) * std::cos(4 * pi * y);
          break;
        case Scenario::Wave2:
          p.at(0, i, j) =
              std::sin(32 * pi * x) * std::cos(16 * pi * y) - 0.2 * std::cos(32 * pi * x) * std::sin(32 * pi * y);
          p.at(1, i, j) = std::cos(64 * pi * x) * std::cos(16 * pi * y);
          p.at(2, i, j) = std::cos(32 * pi * x) * std::cos(32 * pi * y);
          break;
        case Scenario::Gaussian:
          p.at(0, i, j) = std::exp(-100.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
          p.at(1, i, j) = 0.1 * std::sin(64 * pi * x) * std::sin(16 * pi * y);
          p.at(2, i, j) = 0.1 * std::sin(32 * pi * x) * std::sin(32 * pi * y);
          break;
      }
    }
  }
  return p;
}

inline SpectralState initial_condition(Scenario s, int D) { return forward(initial_physical(s, D)); }

}  // namespace rexi::lrsw
