#pragma once

// Command implementations behind tools/rexi_cli. Each command reads a plain
// option struct, writes CSV to a stream and returns a process exit code.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rexi/coeff_io.hpp"
#include "rexi/gauss_kernel.hpp"
#include "rexi/lrsw/scenario.hpp"
#include "rexi/lrsw/state.hpp"
#include "rexi/lrsw/stepper.hpp"
#include "rexi/matrix_eval.hpp"
#include "rexi/rational_fit.hpp"
#include "rexi/rexi_terms.hpp"
#include "rexi/test_operators.hpp"

namespace rexi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Shortest decimal that round-trips.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

inline double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline int parse_integer(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

/// "0.3,0.5,1.0"
inline std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_real(p));
  return out;
}

/// Comma separated integers or ranges first:last[:step], e.g. "12,20:40:5".
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) {
    const auto fields = split(p, ':');
    if (fields.size() == 1) {
      out.push_back(parse_integer(fields[0]));
      continue;
    }
    if (fields.size() > 3) throw std::invalid_argument("bad range '" + p + "'");
    const int first = parse_integer(fields[0]);
    const int last = parse_integer(fields[1]);
    const int step = fields.size() == 3 ? parse_integer(fields[2]) : 1;
    if (step <= 0 || last < first) throw std::invalid_argument("bad range '" + p + "'");
    for (int m = first; m <= last; m += step) out.push_back(m);
  }
  return out;
}

/// Output file, or std::cout for an empty path or "-".
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// ---------------------------------------------------------------- fit

struct FitCommand {
  double mu = builtin_coefficients().mu;
  int L = 24;
  double target = 2e-14;
  int max_points = 400;
  double x_max = 30.0;  ///< R is only controlled on [-x_max, x_max]
  std::string out;
};

inline int cmd_fit(const FitCommand& o, std::ostream& log) {
  FitOptions opts;
  opts.target = o.target;
  opts.max_points = o.max_points;
  opts.x_max = o.x_max;
  // keep the certification spacing of the default 20001 points on [-30, 30]
  opts.certification_points = std::max(20001, static_cast<int>(std::ceil(o.x_max / 30.0 * 20000.0)) + 1);
  const FitResult r = fit_coefficients(o.mu, o.L, opts);
  if (!o.out.empty()) write_coefficients(o.out, r.coeffs);
  log << "L,mu,points,fit_error,converged\n"
      << o.L << ',' << fmt(o.mu) << ',' << r.points.size() << ',' << fmt(r.coeffs.fit_error) << ','
      << (r.converged ? "true" : "false") << '\n';
  return r.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- scalar study

struct ScalarStudyCommand {
  double x = 30.0;
  std::vector<double> h_list{0.5};
  std::vector<int> M_list;
  Variant scheme = Variant::Rexii;
};

inline int cmd_scalar_study(const ScalarStudyCommand& o, const RationalGaussianCoeffs& coeffs, std::ostream& csv) {
  for (double h : o.h_list) require_spacing(h);
  for (int M : o.M_list) {
    if (M < 0) throw std::invalid_argument("scalar-study: M values must be nonnegative");
  }
  const auto errors = scalar_error_study(o.h_list, o.M_list, o.x, coeffs, o.scheme);
  csv << "h,M,error\n";
  for (std::size_t i = 0; i < o.h_list.size(); ++i) {
    for (std::size_t j = 0; j < o.M_list.size(); ++j) {
      csv << fmt(o.h_list[i]) << ',' << o.M_list[j] << ',' << fmt(errors[i][j]) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- matrix study

enum class MatrixScheme { Rexi, Rexii, Rexie };

inline MatrixScheme parse_matrix_scheme(const std::string& s) {
  if (s == "rexi") return MatrixScheme::Rexi;
  if (s == "rexii") return MatrixScheme::Rexii;
  if (s == "rexie") return MatrixScheme::Rexie;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected rexi, rexii or rexie)");
}

inline std::string to_string(MatrixScheme s) {
  switch (s) {
    case MatrixScheme::Rexi: return "rexi";
    case MatrixScheme::Rexii: return "rexii";
    case MatrixScheme::Rexie: return "rexie";
  }
  return "?";
}

struct MatrixStudyCommand {
  TestOperatorKind op = TestOperatorKind::Advection;
  MatrixScheme scheme = MatrixScheme::Rexii;
  double h = 0.5;
  std::vector<int> M_list;
  bool shift = true;  ///< center the spectrum
  int n = 70;
  bool dense = false;  ///< LU solves instead of the FFT diagonalization
};

/// Relative l2 errors of e^{A} f0 for each M.
inline std::vector<double> matrix_study_errors(const MatrixStudyCommand& o, const RationalGaussianCoeffs& coeffs,
                                               const ExecPolicy& policy = {}) {
  require_spacing(o.h);
  if (o.scheme == MatrixScheme::Rexie && o.op != TestOperatorKind::Schrodinger) {
    throw std::invalid_argument("matrix-study: rexie needs the schrodinger operator");
  }
  if (o.scheme == MatrixScheme::Rexi && o.op != TestOperatorKind::Advection) {
    throw std::invalid_argument("matrix-study: rexi needs a real operator (advection)");
  }
  const TestOperator op = build_test_operator(o.op, o.n);
  const std::vector<double> f0 = reference_initial_vector(op);
  const std::vector<cplx> reference = reference_expm_vec(op.matrix, std::span<const double>(f0));

  const SpectralShift sh = o.shift ? center_shift(op.spectrum.zeta1, op.spectrum.zeta2) : SpectralShift{0.0, op.spectrum.rho};
  std::vector<cplx> column = op.first_column;
  column[0] -= sh.nu;
  Eigen::MatrixXcd shifted = op.matrix;
  shifted.diagonal().array() -= sh.nu;
  std::unique_ptr<ShiftedSolveOracle> oracle;
  if (o.dense) {
    oracle = std::make_unique<DenseSolveOracle>(shifted);
  } else {
    oracle = std::make_unique<CirculantSolveOracle>(column);
  }
  const cplx factor = std::exp(sh.nu);

  std::vector<double> errors;
  for (int M : o.M_list) {
    std::vector<cplx> approx;
    if (o.scheme == MatrixScheme::Rexii) {
      const auto table = build_terms(o.h, M, coeffs, Variant::Rexii);
      approx = apply_rexii(table, *oracle, std::span<const double>(f0), oracle->real_operator(), policy);
    } else if (o.scheme == MatrixScheme::Rexi) {
      const auto table = build_terms(o.h, M, coeffs, Variant::Rexi);
      const auto r = apply_rexi(table, *oracle, std::span<const double>(f0), policy);
      approx.assign(r.begin(), r.end());
    } else {
      const auto table = build_terms(o.h, M, coeffs, Variant::Rexi);
      approx = apply_rexie(table, *oracle, std::span<const double>(f0), policy);
    }
    for (auto& v : approx) v *= factor;
    errors.push_back(relative_l2_error(approx, reference));
  }
  return errors;
}

inline int cmd_matrix_study(const MatrixStudyCommand& o, const RationalGaussianCoeffs& coeffs, std::ostream& csv,
                            const ExecPolicy& policy = {}) {
  const auto errors = matrix_study_errors(o, coeffs, policy);
  csv << "scheme,h,M,error\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    csv << to_string(o.scheme) << ',' << fmt(o.h) << ',' << o.M_list[i] << ',' << fmt(errors[i]) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- lrsw

enum class Method { Rexi, Rexii, Rk4 };

inline Method parse_method(const std::string& s) {
  if (s == "rexi") return Method::Rexi;
  if (s == "rexii") return Method::Rexii;
  if (s == "rk4") return Method::Rk4;
  throw std::invalid_argument("unknown method '" + s + "' (expected rexi, rexii or rk4)");
}

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Rexi: return "rexi";
    case Method::Rexii: return "rexii";
    case Method::Rk4: return "rk4";
  }
  return "?";
}

struct LrswCommand {
  lrsw::Scenario scenario = lrsw::Scenario::Wave1;
  Method method = Method::Rexii;
  double h = 0.5;
  std::optional<int> M;  ///< empty means auto
  double tau = 1.0;
  int D = 128;
  std::size_t S = 0;     ///< 0 means auto
  unsigned threads = 1;
  bool deterministic = true;
  int time_steps = 1000;
};

struct RunRecord {
  std::string command = "lrsw";
  LrswCommand params;
  int M = 0;  ///< resolved M (0 for rk4)
  double error = 0.0;
  double ms = 0.0;
  std::size_t terms = 0;
  std::size_t solves = 0;
  std::size_t chunks = 0;
};

inline int resolve_M(const LrswCommand& o) {
  if (o.M) return *o.M;
  return lrsw::estimate_M(lrsw::effective_D(o.scenario, o.D), o.tau, o.h);
}

inline RunRecord run_lrsw(const LrswCommand& o, const RationalGaussianCoeffs& coeffs,
                          lrsw::SpectralState* result = nullptr) {
  if (!(o.tau >= 0.0)) throw std::invalid_argument("lrsw: tau must be nonnegative");
  const lrsw::SpectralState s0 = lrsw::initial_condition(o.scenario, o.D);
  const lrsw::SpectralState reference = lrsw::exact_solution(s0, o.tau);

  RunRecord rec;
  rec.params = o;
  lrsw::SpectralState out;
  const auto start = std::chrono::steady_clock::now();
  if (o.method == Method::Rk4) {
    out = lrsw::rk4_integrate(s0, o.tau, o.time_steps);
    rec.terms = static_cast<std::size_t>(o.time_steps);
  } else {
    require_spacing(o.h);
    rec.M = resolve_M(o);
    lrsw::StepOptions opts;
    opts.chunks = o.S;
    opts.threads = o.threads;
    opts.deterministic = o.deterministic;
    lrsw::StepStats stats;
    if (o.method == Method::Rexii) {
      out = lrsw::rexii_step(build_terms(o.h, rec.M, coeffs, Variant::Rexii), s0, o.tau, opts, &stats);
    } else {
      out = lrsw::rexi_step(build_terms(o.h, rec.M, coeffs, Variant::Rexi), s0, o.tau, opts, &stats);
    }
    rec.terms = stats.terms;
    rec.solves = stats.solves;
    rec.chunks = stats.chunks;
  }
  rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.error = lrsw::max_norm_error(out, reference);
  if (result != nullptr) *result = std::move(out);
  return rec;
}

inline void write_summary(std::ostream& os, const RunRecord& r) {
  const bool rk4 = r.params.method == Method::Rk4;
  os << "method,h,M_or_TS,error,ms,solves\n"
     << to_string(r.params.method) << ',' << (rk4 ? std::string() : fmt(r.params.h)) << ','
     << (rk4 ? r.params.time_steps : r.M) << ',' << fmt(r.error) << ',' << fmt(std::round(r.ms * 1000.0) / 1000.0)
     << ',' << r.solves << '\n';
}

inline void write_record(std::ostream& os, const RunRecord& r) {
  const bool rk4 = r.params.method == Method::Rk4;
  os << "command,scenario,method,h,M,time_steps,D,tau,S,threads,deterministic,error,ms,terms,solves\n"
     << r.command << ',' << lrsw::to_string(r.params.scenario) << ',' << to_string(r.params.method) << ','
     << (rk4 ? std::string() : fmt(r.params.h)) << ',' << (rk4 ? std::string() : std::to_string(r.M)) << ','
     << (rk4 ? std::to_string(r.params.time_steps) : std::string()) << ',' << r.params.D << ',' << fmt(r.params.tau)
     << ',' << r.chunks << ',' << r.params.threads << ',' << (r.params.deterministic ? "true" : "false") << ','
     << fmt(r.error) << ',' << fmt(std::round(r.ms * 1000.0) / 1000.0) << ',' << r.terms << ',' << r.solves << '\n';
}

inline int cmd_lrsw(const LrswCommand& o, const RationalGaussianCoeffs& coeffs, std::ostream& summary,
                    const std::string& csv_path) {
  const RunRecord rec = run_lrsw(o, coeffs);
  write_summary(summary, rec);
  if (!csv_path.empty()) {
    OutputTarget target(csv_path);
    write_record(target.stream(), rec);
  }
  return kExitOk;
}

}  // namespace rexi::cli
