#pragma once

// Conjugate-symmetric rational approximation of the unit Gaussian psi_1:
//
//   R(x) = Re sum_{l=-L}^{L} a_l / (i x + mu + i l),   a_{-l} = conj(a_l),
//
// evaluated in the real even form
//
//   R(x) = a_0 mu / (x^2 + mu^2)
//        + sum_{l=1}^{L} [2 mu Re a_l (mu^2 + l^2 + x^2) + 2 l Im a_l (mu^2 + l^2 - x^2)]
//                        / [x^4 + 2 (mu^2 - l^2) x^2 + (mu^2 + l^2)^2].

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rexi/detail/double_double.hpp"
#include "rexi/gauss_kernel.hpp"

namespace rexi {

struct RationalGaussianCoeffs {
  double mu = 0.0;
  std::vector<cplx> a;  ///< a_0 .. a_L; negative indices implied by conjugation
  double fit_error = 0.0;

  [[nodiscard]] int L() const { return static_cast<int>(a.size()) - 1; }

  /// a_l for l in [-L, L].
  [[nodiscard]] cplx at(int l) const {
    return l >= 0 ? a[static_cast<std::size_t>(l)] : std::conj(a[static_cast<std::size_t>(-l)]);
  }
};

inline void require_valid(const RationalGaussianCoeffs& c) {
  if (c.a.size() < 2) throw std::invalid_argument("rational coefficients need L >= 1");
  if (!(c.mu < 0.0)) throw std::invalid_argument("rational coefficients need mu < 0");
  if (c.a[0].imag() != 0.0) throw std::invalid_argument("a_0 must be real");
}

/// Value of R at x. Terms and their sum are carried in double-double so the
/// O(10) partial terms cancel without losing the 1e-15 level defect; the
/// result depends on x only through x^2 and is exactly even.
inline double eval_R(const RationalGaussianCoeffs& c, double x) {
  using detail::DoubleDouble;
  const DoubleDouble x2 = detail::two_prod(x, x);
  const DoubleDouble mu(c.mu);
  const DoubleDouble mu2 = detail::two_prod(c.mu, c.mu);

  DoubleDouble sum = (DoubleDouble(c.a[0].real()) * mu) / (x2 + mu2);
  const int L = c.L();
  for (int l = 1; l <= L; ++l) {
    const DoubleDouble l2(static_cast<double>(l) * l);
    const DoubleDouble q = mu2 + l2;
    const DoubleDouble s = x2 + mu2 - l2;
    const DoubleDouble den = s * s + DoubleDouble(4.0) * mu2 * l2;
    const cplx al = c.a[static_cast<std::size_t>(l)];
    const DoubleDouble num = DoubleDouble(2.0) * mu * DoubleDouble(al.real()) * (q + x2) +
                             DoubleDouble(2.0 * l) * DoubleDouble(al.imag()) * (q - x2);
    sum = sum + num / den;
  }
  return sum.value();
}

/// Row G(x, mu, L) with dot(G, y) = R(x) for
/// y = [a_0, Re a_1 .. Re a_L, Im a_1 .. Im a_L].
inline std::vector<double> design_row(double x, double mu, int L) {
  if (mu == 0.0) throw std::invalid_argument("design_row: mu must be nonzero");
  if (L < 1) throw std::invalid_argument("design_row: L must be positive");
  std::vector<double> row(static_cast<std::size_t>(2 * L + 1));
  const double x2 = x * x;
  const double mu2 = mu * mu;
  row[0] = mu / (x2 + mu2);
  for (int l = 1; l <= L; ++l) {
    const double l2 = static_cast<double>(l) * l;
    const double q = mu2 + l2;
    const double s = x2 + mu2 - l2;
    const double den = s * s + 4.0 * mu2 * l2;
    row[static_cast<std::size_t>(l)] = 2.0 * mu * (q + x2) / den;
    row[static_cast<std::size_t>(L + l)] = 2.0 * l * (q - x2) / den;
  }
  return row;
}

inline std::vector<double> pack_unknowns(const RationalGaussianCoeffs& c) {
  const int L = c.L();
  std::vector<double> y(static_cast<std::size_t>(2 * L + 1));
  y[0] = c.a[0].real();
  for (int l = 1; l <= L; ++l) {
    y[static_cast<std::size_t>(l)] = c.a[static_cast<std::size_t>(l)].real();
    y[static_cast<std::size_t>(L + l)] = c.a[static_cast<std::size_t>(l)].imag();
  }
  return y;
}

inline RationalGaussianCoeffs unpack_unknowns(double mu, int L, const Eigen::VectorXd& y) {
  RationalGaussianCoeffs c;
  c.mu = mu;
  c.a.resize(static_cast<std::size_t>(L + 1));
  c.a[0] = cplx(y(0), 0.0);
  for (int l = 1; l <= L; ++l) c.a[static_cast<std::size_t>(l)] = cplx(y(l), y(L + l));
  return c;
}

/// Uniform grid of `points` abscissae on [-x_max, x_max].
inline std::vector<double> certification_grid(double x_max = 30.0, int points = 20001) {
  if (points < 2) throw std::invalid_argument("certification grid needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  const double step = 2.0 * x_max / (points - 1);
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = -x_max + step * i;
  // Pin the midpoint so an odd grid contains x = 0 exactly.
  if (points % 2 == 1) xs[static_cast<std::size_t>(points / 2)] = 0.0;
  return xs;
}

/// max |R(x) - psi_1(x)| over the uniform certification grid.
inline double certify(const RationalGaussianCoeffs& c, double x_max = 30.0, int points = 20001) {
  require_valid(c);
  double worst = 0.0;
  for (double x : certification_grid(x_max, points)) {
    worst = std::max(worst, std::abs(eval_R(c, x) - psi(1.0, x)));
  }
  return worst;
}

/// Coefficients for L = 24, mu = -5.1333..., certified below 8e-15 on [-30, 30].
inline RationalGaussianCoeffs builtin_coefficients() {
  RationalGaussianCoeffs c;
  c.mu = -5.133333333333333;
  c.a = {
      {-6.520430828919864e+01, 0.0},
      {4.261818064131437e+01, 2.761406741120911e+01},
      {-9.801650304425239e+00, -2.189295463610722e+01},
      {-1.054225194693395e+00, 6.791786454153551e+00},
      {7.950505668209775e-01, -8.904997258367445e-01},
      {-1.218558380859130e-01, 3.321241563407446e-02},
      {7.365401806949337e-03, 2.212802103193251e-03},
      {-2.801087265991056e-04, -5.566945197754387e-04},
      {1.254835436432561e-04, -2.467200513365371e-04},
      {2.295472292491263e-04, -8.494118951459107e-05},
      {1.858484460459430e-04, 9.242889460185034e-05},
      {4.068056518449676e-05, 1.653479957565515e-04},
      {-8.341508001647741e-05, 1.045331460447588e-04},
      {-9.970528169841103e-05, -5.856228484297677e-06},
      {-3.499639858693093e-05, -6.129059473910835e-05},
      {2.295021920298455e-05, -4.099832469456381e-05},
      {2.931048772724314e-05, 1.708815129697846e-07},
      {7.502088478301169e-06, 1.525082051744077e-05},
      {-5.815291167450100e-06, 6.919604247338349e-06},
      {-4.069948458364005e-06, -1.440010113050771e-06},
      {7.932524475429588e-08, -1.794169428574330e-06},
      {6.120984882186265e-07, -1.131894636585849e-07},
      {5.531365159161319e-08, 1.585749903175946e-07},
      {-2.867805871375946e-08, 1.239499740327838e-08},
      {-1.143081277095316e-09, -2.763239274253499e-09},
  };
  c.fit_error = 4.94e-15;  // certify(c) on the default grid
  return c;
}

struct FitOptions {
  double x_max = 30.0;
  int max_points = 400;
  double target = 2e-14;
  int certification_points = 20001;
};

struct FitResult {
  RationalGaussianCoeffs coeffs;  ///< best iterate; fit_error is its certified defect
  bool converged = false;
  std::vector<double> points;   ///< selected abscissae, in selection order
  std::vector<double> defects;  ///< certified defect after each least-squares solve
};

/// Least-squares fit of the a_l for fixed mu and L with greedy point selection.
///
/// Starts from x = 0; after each solve the grid point in [0, x_max] with the
/// largest defect joins the point set (ties go to the smaller |x|). Stops once
/// the certified defect reaches `target` or `max_points` points were used.
inline FitResult fit_coefficients(double mu, int L, const FitOptions& opts = {}) {
  if (!(mu < 0.0)) throw std::invalid_argument("fit_coefficients: mu must be negative");
  if (L < 1) throw std::invalid_argument("fit_coefficients: L must be positive");
  if (opts.max_points < 1) throw std::invalid_argument("fit_coefficients: max_points must be positive");
  if (opts.certification_points % 2 == 0) {
    throw std::invalid_argument("fit_coefficients: certification grid must have an odd point count");
  }

  // R and psi_1 are even, so only the x >= 0 half of the grid is visited.
  const std::vector<double> grid = certification_grid(opts.x_max, opts.certification_points);
  const std::vector<double> half(grid.begin() + static_cast<std::ptrdiff_t>(grid.size() / 2), grid.end());
  std::vector<double> target_values(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) target_values[i] = psi(1.0, half[i]);

  const int unknowns = 2 * L + 1;
  FitResult result;
  result.coeffs.fit_error = std::numeric_limits<double>::infinity();
  result.points.push_back(0.0);

  while (true) {
    const auto k = static_cast<Eigen::Index>(result.points.size());
    Eigen::MatrixXd G(k, unknowns);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double x = result.points[static_cast<std::size_t>(i)];
      const std::vector<double> row = design_row(x, mu, L);
      for (int j = 0; j < unknowns; ++j) G(i, j) = row[static_cast<std::size_t>(j)];
      rhs(i) = psi(1.0, x);
    }
    // Orthogonal factorization; minimum-norm solution while k < 2L + 1.
    const Eigen::VectorXd y = G.completeOrthogonalDecomposition().solve(rhs);
    RationalGaussianCoeffs trial = unpack_unknowns(mu, L, y);

    double worst = -1.0;
    std::size_t worst_index = 0;
    for (std::size_t i = 0; i < half.size(); ++i) {
      const double d = std::abs(eval_R(trial, half[i]) - target_values[i]);
      if (d > worst) {
        worst = d;
        worst_index = i;
      }
    }
    trial.fit_error = worst;
    result.defects.push_back(worst);
    if (worst < result.coeffs.fit_error) result.coeffs = trial;

    if (worst <= opts.target) {
      result.converged = true;
      break;
    }
    if (static_cast<int>(result.points.size()) >= opts.max_points) break;
    result.points.push_back(half[worst_index]);
  }
  return result;
}

/// Scans mu over [mu_lo, mu_hi] with the given step and returns the value with
/// the smallest certified defect. Optional; the default mu is not derived.
inline double scan_mu(int L, double mu_lo = -7.0, double mu_hi = -4.0, double step = 1.0 / 75.0,
                      const FitOptions& opts = {}) {
  if (!(mu_lo < mu_hi) || !(mu_hi < 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("scan_mu: need mu_lo < mu_hi < 0 and a positive step");
  }
  double best_mu = mu_lo;
  double best_err = std::numeric_limits<double>::infinity();
  const int count = static_cast<int>(std::floor((mu_hi - mu_lo) / step + 1e-9));
  for (int i = 0; i <= count; ++i) {
    const double mu = mu_lo + step * i;
    const double err = fit_coefficients(mu, L, opts).coeffs.fit_error;
    if (err < best_err) {
      best_err = err;
      best_mu = mu;
    }
  }
  return best_mu;
}

}  // namespace rexi
