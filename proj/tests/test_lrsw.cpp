#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "rexi/lrsw/scenario.hpp"
#include "rexi/lrsw/stepper.hpp"
#include "rexi/matrix_eval.hpp"

namespace {

using rexi::cplx;
using rexi::Variant;
namespace sw = rexi::lrsw;

const rexi::RationalGaussianCoeffs& coeffs() {
  static const auto c = rexi::builtin_coefficients();
  return c;
}

sw::SpectralState random_state(int D, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto s = sw::SpectralState::zeros(D);
  for (auto& x : s.data) x = cplx(nd(rng), nd(rng));
  return s;
}

double l2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx x : v) s += std::norm(x);
  return std::sqrt(s);
}

// ||alpha g + sign * scale * A g - rhs|| / ||rhs||
double residual(const sw::SpectralState& g, const sw::SpectralState& rhs, cplx alpha, int sign, double scale) {
  const auto Ag = sw::apply_A(g, sign * scale);
  std::vector<cplx> r(g.data.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = alpha * g.data[i] + Ag.data[i] - rhs.data[i];
  return l2(r) / l2(rhs.data);
}

double wave1_error(Variant v, double h, int M, double tau = 1.0, int D = 128) {
  const auto f0 = sw::initial_condition(sw::Scenario::Wave1, D);
  const auto t = rexi::build_terms(h, M, coeffs(), v);
  const auto num = v == Variant::Rexii ? sw::rexii_step(t, f0, tau) : sw::rexi_step(t, f0, tau);
  return sw::max_norm_error(num, sw::exact_solution(f0, tau));
}

double rk4_error(int steps) {
  const auto f0 = sw::initial_condition(sw::Scenario::Wave1, 128);
  return sw::max_norm_error(sw::rk4_integrate(f0, 1.0, steps), sw::exact_solution(f0, 1.0));
}

}  // namespace

// ------------------------------------------------------------ transforms

TEST(Transform, ConstantFieldIsMeanMode) {
  auto p = sw::PhysicalState::zeros(8);
  std::fill(p.field(0).begin(), p.field(0).end(), 2.5);
  const auto s = sw::forward(p);
  EXPECT_NEAR(std::abs(s.at(0, 0, 0) - 2.5), 0.0, 1e-15);
  for (std::size_t m = 1; m < s.modes(); ++m) EXPECT_LE(std::abs(s.eta()[m]), 1e-15);
}

TEST(Transform, SinCosProductHasFourModes) {
  const int D = 16;
  auto p = sw::PhysicalState::zeros(D);
  for (int j = 0; j < D; ++j) {
    for (int i = 0; i < D; ++i) {
      p.at(1, i, j) = std::sin(2 * std::numbers::pi * 3 * i / D) * std::cos(2 * std::numbers::pi * 2 * j / D);
    }
  }
  const auto s = sw::forward(p);
  for (int j = 0; j < D; ++j) {
    for (int i = 0; i < D; ++i) {
      const int kx = sw::wavenumber(i, D);
      const int ky = sw::wavenumber(j, D);
      const cplx v = s.at(1, i, j);
      if (std::abs(kx) == 3 && std::abs(ky) == 2) {
        // sin(a) cos(b) = sum over signs of (-i/4) sgn(kx) e^{i(kx x + ky y)}
        EXPECT_NEAR(v.real(), 0.0, 1e-15);
        EXPECT_NEAR(v.imag(), kx > 0 ? -0.25 : 0.25, 1e-15);
      } else {
        EXPECT_LE(std::abs(v), 1e-15) << kx << "," << ky;
      }
    }
  }
}

TEST(Transform, RoundTrip) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  auto p = sw::PhysicalState::zeros(32);
  for (auto& x : p.data) x = nd(rng);
  const auto back = sw::inverse(sw::forward(p));
  for (std::size_t i = 0; i < p.data.size(); ++i) EXPECT_NEAR(back.data[i], p.data[i], 1e-13);
}

TEST(Transform, RealFieldIsConjugateSymmetric) {
  const auto s = sw::initial_condition(sw::Scenario::Gaussian, 72);
  EXPECT_LE(sw::conjugate_symmetry_defect(s), 1e-15);
}

TEST(Transform, ProjectionRestoresSymmetry) {
  auto s = random_state(8, 3);
  EXPECT_GT(sw::conjugate_symmetry_defect(s), 0.1);
  sw::project_real(s);
  EXPECT_EQ(sw::conjugate_symmetry_defect(s), 0.0);
  const auto values = sw::inverse_complex(s);
  for (const cplx v : values) EXPECT_LE(std::abs(v.imag()), 1e-14);
}

TEST(Transform, RejectsOddGrid) {
  EXPECT_THROW(sw::SpectralState::zeros(7), std::invalid_argument);
  EXPECT_THROW(sw::PhysicalState::zeros(0), std::invalid_argument);
  EXPECT_EQ(sw::wavenumber(5, 8), -3);
  EXPECT_EQ(sw::wavenumber(4, 8), -4);
  EXPECT_EQ(sw::mirror(0, 8), 0);
  EXPECT_EQ(sw::mirror(3, 8), 5);
}

// ------------------------------------------------------------ operator

TEST(Operator, ZeroModeExamples) {
  auto s = sw::SpectralState::zeros(4);
  s.at(0, 0, 0) = 1.0;
  auto out = sw::apply_A(s);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(c, 0, 0), cplx(0.0));
  s = sw::SpectralState::zeros(4);
  s.at(1, 0, 0) = 1.0;
  out = sw::apply_A(s);
  EXPECT_EQ(out.at(0, 0, 0), cplx(0.0));
  EXPECT_EQ(out.at(1, 0, 0), cplx(0.0));
  EXPECT_EQ(out.at(2, 0, 0), cplx(-1.0));
}

TEST(Operator, SymbolIsSkewHermitian) {
  const auto k = sw::angular_wavenumbers(16);
  for (double kx : k) {
    for (double ky : k) {
      const auto A = sw::mode_symbol(kx, ky);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) EXPECT_EQ(A[r][c] + std::conj(A[c][r]), cplx(0.0));
      }
    }
  }
}

TEST(Operator, ApplyMatchesSymbol) {
  const auto s = random_state(8, 4);
  const auto out = sw::apply_A(s, 0.75);
  const auto k = sw::angular_wavenumbers(8);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) {
      const auto A = sw::mode_symbol(k[i], k[j]);
      for (int r = 0; r < 3; ++r) {
        cplx want = 0.0;
        for (int c = 0; c < 3; ++c) want += 0.75 * A[r][c] * s.at(c, i, j);
        EXPECT_LE(std::abs(out.at(r, i, j) - want), 1e-13);
      }
    }
  }
}

// ------------------------------------------------------------ shifted solve

TEST(ShiftedSolve, ResidualOnRandomRightHandSides) {
  const auto t = rexi::build_terms(0.5, 65, coeffs(), Variant::Rexii);
  const double tau = 1.0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rhs = random_state(16, 500 + trial);
    const int n = (trial * 29) % (2 * t.N + 1) - t.N;
    const int sign = trial % 2 == 0 ? 1 : -1;
    const cplx alpha = t.alpha_at(n);
    const auto g = sw::solve_shifted(rhs, alpha, sign, tau);
    worst = std::max(worst, residual(g, rhs, alpha, sign, tau));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(ShiftedSolve, ListedShift) {
  const cplx alpha = 0.5 * cplx(coeffs().mu, 3.0);
  const auto rhs = random_state(32, 21);
  for (int sign : {1, -1}) {
    for (double scale : {1.0, 50.0}) {
      const auto g = sw::solve_shifted(rhs, alpha, sign, scale);
      EXPECT_LE(residual(g, rhs, alpha, sign, scale), 1e-12) << sign << " " << scale;
    }
  }
}

TEST(ShiftedSolve, ModeZeroMatchesDenseSolve) {
  const cplx alpha(-2.5, 1.5);
  auto rhs = sw::SpectralState::zeros(4);
  rhs.at(0, 0, 0) = cplx(1.0, 0.5);
  rhs.at(1, 0, 0) = cplx(-0.25, 2.0);
  rhs.at(2, 0, 0) = cplx(0.75, -1.0);
  const auto sym = sw::mode_symbol(0.0, 0.0);
  for (int sign : {1, -1}) {
    Eigen::Matrix3cd M;
    Eigen::Vector3cd b;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M(r, c) = static_cast<double>(sign) * sym[r][c] + (r == c ? alpha : cplx(0.0));
      b(r) = rhs.at(r, 0, 0);
    }
    const Eigen::Vector3cd want = M.partialPivLu().solve(b);
    const auto g = sw::solve_shifted(rhs, alpha, sign);
    for (int r = 0; r < 3; ++r) EXPECT_LE(std::abs(g.at(r, 0, 0) - want(r)), 1e-15) << sign;
  }
}

TEST(ShiftedSolve, ZeroRightHandSide) {
  const auto g = sw::solve_shifted(sw::SpectralState::zeros(8), cplx(-2.0, 7.0), 1);
  for (const cplx v : g.data) EXPECT_EQ(v, cplx(0.0));
}

TEST(ShiftedSolve, SingularShiftSignals) {
  const auto rhs = random_state(4, 2);
  EXPECT_THROW(sw::solve_shifted(rhs, cplx(0.0, 1.0), 1), std::domain_error);
  EXPECT_THROW(sw::solve_shifted(rhs, cplx(0.0), 1), std::domain_error);
  EXPECT_THROW(sw::solve_shifted(rhs, cplx(-1.0), 0), std::invalid_argument);
}

// ------------------------------------------------------------ exact propagator

TEST(Exact, ZeroTimeIsIdentity) {
  const auto s = random_state(8, 5);
  EXPECT_EQ(sw::exact_solution(s, 0.0).data, s.data);
}

TEST(Exact, ConservesModeNorms) {
  const auto s = random_state(32, 6);
  const auto before = sw::mode_norms(s);
  for (double tau : {0.1, 1.0, 50.0, 1234.5}) {
    const auto after = sw::mode_norms(sw::exact_solution(s, tau));
    double a = 0.0;
    double b = 0.0;
    for (std::size_t m = 0; m < before.size(); ++m) {
      EXPECT_NEAR(after[m], before[m], 1e-13 * before[m]) << "tau=" << tau << " mode " << m;
      a += after[m] * after[m];
      b += before[m] * before[m];
    }
    EXPECT_NEAR(std::sqrt(a), std::sqrt(b), 1e-13 * std::sqrt(b));
  }
}

TEST(Exact, ZeroModeIsCoriolisRotation) {
  auto s = sw::SpectralState::zeros(4);
  s.at(0, 0, 0) = 0.3;
  s.at(1, 0, 0) = 1.1;
  s.at(2, 0, 0) = -0.7;
  const double tau = 0.9;
  const auto r = sw::exact_solution(s, tau);
  EXPECT_NEAR(std::abs(r.at(0, 0, 0) - 0.3), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.at(1, 0, 0) - (1.1 * std::cos(tau) - 0.7 * std::sin(tau))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.at(2, 0, 0) - (-1.1 * std::sin(tau) - 0.7 * std::cos(tau))), 0.0, 1e-15);
}

TEST(Exact, MatchesMatrixExponentialPerMode) {
  // 3x3 reference through the eigendecomposition of the Hermitian i A.
  for (const auto& [kx, ky] : {std::pair{0.0, 0.0}, std::pair{6.0, -2.5}, std::pair{-40.0, 13.0}}) {
    const auto A = sw::mode_symbol(kx, ky);
    Eigen::Matrix3cd H;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) H(r, c) = cplx(0.0, 1.0) * A[r][c];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(H);
    const double tau = 2.3;
    Eigen::Vector3cd d;
    for (int i = 0; i < 3; ++i) d(i) = std::polar(1.0, -tau * es.eigenvalues()(i));
    const Eigen::Matrix3cd E = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    const auto P = sw::mode_propagator(kx, ky, tau);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) EXPECT_LE(std::abs(P[r][c] - E(r, c)), 1e-13);
    }
  }
}

// ------------------------------------------------------------ scenarios

TEST(Scenario, WaveOneModeSet) {
  const auto s = sw::initial_condition(sw::Scenario::Wave1, 32);
  const std::set<std::tuple<int, int, int>> forced = {
      {0, 2, 1}, {0, 2, -1}, {0, -2, 1}, {0, -2, -1}, {0, 2, 2}, {0, 2, -2}, {0, -2, 2}, {0, -2, -2},
      {1, 4, 1}, {1, 4, -1}, {1, -4, 1}, {1, -4, -1}, {2, 2, 2}, {2, 2, -2}, {2, -2, 2}, {2, -2, -2}};
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < 32; ++j) {
      for (int i = 0; i < 32; ++i) {
        const auto key = std::make_tuple(c, sw::wavenumber(i, 32), sw::wavenumber(j, 32));
        if (forced.contains(key)) {
          EXPECT_GE(std::abs(s.at(c, i, j)), 0.04);
        } else {
          EXPECT_LE(std::abs(s.at(c, i, j)), 1e-15);
        }
      }
    }
  }
}

TEST(Scenario, WaveTwoBandLimit) {
  const auto s = sw::initial_condition(sw::Scenario::Wave2, 128);
  double outside = 0.0;
  double inside = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < 128; ++j) {
      for (int i = 0; i < 128; ++i) {
        const int kx = std::abs(sw::wavenumber(i, 128));
        const int ky = std::abs(sw::wavenumber(j, 128));
        const double a = std::abs(s.at(c, i, j));
        if (kx > 32 || ky > 32 || (kx > 23 && c != 1)) {
          outside = std::max(outside, a);
        } else {
          inside = std::max(inside, a);
        }
      }
    }
  }
  EXPECT_LE(outside, 1e-15);
  EXPECT_GE(inside, 0.2);
  // u carries cos(64 pi x), one mode beyond the |k| <= 23 band
  EXPECT_NEAR(std::abs(s.at(1, 32, 8)), 0.25, 1e-15);
}

TEST(Scenario, GaussianPeak) {
  const auto p = sw::initial_physical(sw::Scenario::Gaussian, 128);
  EXPECT_EQ(p.at(0, 64, 64), 1.0);
}

TEST(Scenario, ResolutionRequirement) {
  EXPECT_THROW(sw::initial_condition(sw::Scenario::Wave2, 64), std::invalid_argument);
  EXPECT_THROW(sw::initial_condition(sw::Scenario::Wave1, 8), std::invalid_argument);
  EXPECT_NO_THROW(sw::initial_condition(sw::Scenario::Wave1, 10));
  EXPECT_THROW(sw::parse_scenario("wave3"), std::invalid_argument);
  EXPECT_EQ(sw::parse_scenario("gaussian"), sw::Scenario::Gaussian);
}

TEST(Scenario, EstimatedM) {
  EXPECT_EQ(sw::estimate_M(6, 1.0, 1.0), 38);
  EXPECT_EQ(sw::estimate_M(6, 1.0, 0.5), 65);
  EXPECT_EQ(sw::estimate_M(128, 1.0, 1.0), 580);
  EXPECT_EQ(sw::estimate_M(128, 1.0, 0.5), 1149);
  EXPECT_EQ(sw::estimate_M(128, 1.0, 0.1), 5698);
  // the long-step wave row runs at M = 1344, one below the formula
  EXPECT_EQ(sw::estimate_M(sw::effective_D(sw::Scenario::Wave1, 128), 50.0, 1.0), 1345);
  EXPECT_THROW(sw::estimate_M(6, -1.0, 0.5), std::invalid_argument);
}

// ------------------------------------------------------------ error measure

TEST(MaxNormError, Examples) {
  const auto s = sw::initial_condition(sw::Scenario::Gaussian, 66);
  EXPECT_EQ(sw::max_norm_error(s, s), 0.0);
  auto p = sw::initial_physical(sw::Scenario::Gaussian, 66);
  p.at(0, 3, 7) += 1e-9;
  EXPECT_NEAR(sw::max_norm_error(sw::forward(p), s), 1e-9, 1e-15);
  EXPECT_THROW(sw::max_norm_error(s, sw::SpectralState::zeros(64)), std::invalid_argument);
}

// ------------------------------------------------------------ time stepping

TEST(Rk4, WaveOneRows) {
  const double e1000 = rk4_error(1000);
  const double e200 = rk4_error(200);
  EXPECT_GE(e1000, 7.18e-8 / 10);
  EXPECT_LE(e1000, 7.18e-8 * 10);
  EXPECT_GE(e200, 4.81e-5 / 10);
  EXPECT_LE(e200, 4.81e-5 * 10);
}

TEST(Rk4, FourthOrder) {
  const double slope = std::log2(rk4_error(200) / rk4_error(1600)) / 3.0;
  EXPECT_NEAR(slope, 4.0, 0.3);
  EXPECT_THROW(sw::rk4_integrate(sw::SpectralState::zeros(4), 1.0, 0), std::invalid_argument);
}

TEST(Rexii, WaveOneRows) {
  EXPECT_LE(wave1_error(Variant::Rexii, 1.0, 38), 1e-10);
  EXPECT_LE(wave1_error(Variant::Rexii, 0.5, 65), 1e-12);
}

TEST(Rexii, LongStepWaveOne) { EXPECT_LE(wave1_error(Variant::Rexii, 1.0, 1344, 50.0), 1e-10); }

TEST(Rexii, GaussianRows) {
  const auto f0 = sw::initial_condition(sw::Scenario::Gaussian, 128);
  const auto ref = sw::exact_solution(f0, 1.0);
  for (const auto& [h, M] : {std::pair{1.0, 580}, std::pair{0.5, 1149}}) {
    sw::StepOptions opts;
    opts.threads = rexi::hardware_threads();
    const auto t = rexi::build_terms(h, M, coeffs(), Variant::Rexii);
    EXPECT_LE(sw::max_norm_error(sw::rexii_step(t, f0, 1.0, opts), ref), 1e-11) << h;
  }
}

TEST(Rexi, WaveOneShortRow) {
  const double e = wave1_error(Variant::Rexi, 0.2, 150);
  EXPECT_GE(e, 6.98e-2 / 10);
  EXPECT_LE(e, 6.98e-2 * 10);
}

TEST(Rexi, FarWorseThanRexiiAtEqualM) {
  EXPECT_GE(wave1_error(Variant::Rexi, 0.5, 65), 1e3 * wave1_error(Variant::Rexii, 0.5, 65));
}

TEST(Stepper, SolveCounts) {
  const auto f0 = sw::initial_condition(sw::Scenario::Wave1, 16);
  sw::StepStats stats;
  const auto t2 = rexi::build_terms(0.5, 65, coeffs(), Variant::Rexii);
  sw::rexii_step(t2, f0, 1.0, {}, &stats);
  EXPECT_EQ(stats.terms, static_cast<std::size_t>(t2.N + 1));
  EXPECT_EQ(stats.solves, 2 * stats.terms);
  const auto t1 = rexi::build_terms(0.5, 65, coeffs(), Variant::Rexi);
  sw::rexi_step(t1, f0, 1.0, {}, &stats);
  EXPECT_EQ(stats.solves, t1.size());
  EXPECT_THROW(sw::rexi_step(t2, f0, 1.0), std::invalid_argument);
  EXPECT_THROW(sw::rexii_step(t1, f0, 1.0), std::invalid_argument);
}

TEST(Stepper, DefaultChunkBudget) {
  EXPECT_EQ(sw::default_chunks(90, 128), 1U);
  const std::size_t terms = 20800 + 24;
  const double bytes = 6.0 * 16.0 * 128 * 128 * static_cast<double>(terms);
  EXPECT_EQ(sw::default_chunks(terms, 128), static_cast<std::size_t>(std::ceil(bytes / (512.0 * 1024 * 1024))));
}

TEST(Stepper, DeterministicBitsAcrossChunksAndThreads) {
  const auto f0 = sw::initial_condition(sw::Scenario::Gaussian, 66);
  const auto t = rexi::build_terms(0.5, 200, coeffs(), Variant::Rexii);
  sw::StepOptions base;
  base.chunks = 1;
  const auto ref = sw::rexii_step(t, f0, 1.0, base);
  for (unsigned threads : {1U, 3U, 8U}) {
    for (std::size_t S : {1U, 8U, 37U}) {
      sw::StepOptions o;
      o.chunks = S;
      o.threads = threads;
      EXPECT_EQ(sw::rexii_step(t, f0, 1.0, o).data, ref.data) << threads << " threads, S=" << S;
    }
  }
  const auto r1 = rexi::build_terms(0.5, 200, coeffs(), Variant::Rexi);
  sw::StepOptions one;
  one.chunks = 1;
  sw::StepOptions many;
  many.chunks = 8;
  many.threads = 4;
  EXPECT_EQ(sw::rexi_step(r1, f0, 1.0, one).data, sw::rexi_step(r1, f0, 1.0, many).data);
}

TEST(Stepper, UnorderedReductionWithinRoundoff) {
  const auto f0 = sw::initial_condition(sw::Scenario::Gaussian, 66);
  const auto t = rexi::build_terms(0.5, 200, coeffs(), Variant::Rexii);
  const auto ref = sw::rexii_step(t, f0, 1.0);
  sw::StepOptions o;
  o.threads = 6;
  o.deterministic = false;
  o.chunks = 3;
  EXPECT_LE(sw::max_norm_error(sw::rexii_step(t, f0, 1.0, o), ref), 1e-12);
}

TEST(Stepper, AgreesWithGenericEvaluator) {
  const auto f0 = sw::initial_condition(sw::Scenario::Wave1, 16);
  const auto t = rexi::build_terms(0.5, 65, coeffs(), Variant::Rexii);
  const sw::ShallowWaterSolveOracle oracle(16, 1.0);
  sw::SpectralState generic = sw::SpectralState::zeros(16);
  generic.data = rexi::apply_rexii(t, oracle, std::span<const cplx>(f0.data), false);
  sw::project_real(generic);
  EXPECT_LE(sw::max_norm_error(sw::rexii_step(t, f0, 1.0), generic), 1e-13);
}
