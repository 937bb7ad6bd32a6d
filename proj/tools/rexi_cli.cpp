// Command-line front end: fitting, scalar and matrix studies, shallow water runs.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rexi/cli.hpp"

namespace {

using namespace rexi;
using namespace rexi::cli;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"REXI exponential integrators: coefficient fits, error studies and shallow water runs"};
  app.set_help_flag("--help", "print this help and exit");  // -h is taken by the spacing option
  app.require_subcommand(1);

  // fit
  FitCommand fit;
  auto* fit_cmd = app.add_subcommand("fit", "least-squares fit of the rational Gaussian coefficients");
  fit_cmd->add_option("--mu", fit.mu, "common pole real part (negative)")->capture_default_str();
  fit_cmd->add_option("--L", fit.L, "number of pole pairs")->capture_default_str();
  fit_cmd->add_option("--target", fit.target, "certified max defect to reach")->capture_default_str();
  fit_cmd->add_option("--max-points", fit.max_points, "greedy point budget")->capture_default_str();
  fit_cmd->add_option("--x-max", fit.x_max, "half width of the fit and certification interval")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "coefficient file to write");

  // scalar-study
  ScalarStudyCommand scalar;
  std::string scalar_h = "0.5";
  std::string scalar_M;
  std::string scalar_scheme = "rexii";
  std::string scalar_out;
  auto* scalar_cmd = app.add_subcommand("scalar-study", "|approximation - e^{ix}| over h and M");
  scalar_cmd->add_option("--x", scalar.x, "argument x")->capture_default_str();
  scalar_cmd->add_option("--h-list", scalar_h, "comma separated spacings")->capture_default_str();
  scalar_cmd->add_option("--M-list", scalar_M, "comma separated M values or ranges a:b[:step]");
  scalar_cmd->add_option("--scheme", scalar_scheme, "rexi or rexii")->capture_default_str();
  scalar_cmd->add_option("--out", scalar_out, "CSV file (stdout if omitted)");

  // matrix-study
  MatrixStudyCommand matrix;
  std::string matrix_op = "advection";
  std::string matrix_scheme = "rexii";
  std::string matrix_M;
  std::string matrix_shift = "auto";
  std::string matrix_solver = "fft";
  std::string matrix_out;
  unsigned matrix_threads = 1;
  auto* matrix_cmd = app.add_subcommand("matrix-study", "relative error of e^{A} f0 on the test operators");
  matrix_cmd->add_option("--operator", matrix_op, "advection or schrodinger")->capture_default_str();
  matrix_cmd->add_option("--scheme", matrix_scheme, "rexi, rexii or rexie")->capture_default_str();
  matrix_cmd->add_option("--h", matrix.h, "Gaussian spacing")->capture_default_str();
  matrix_cmd->add_option("--M-list", matrix_M, "comma separated M values or ranges a:b[:step]");
  matrix_cmd->add_option("--shift", matrix_shift, "auto or none")->capture_default_str();
  matrix_cmd->add_option("--n", matrix.n, "grid points")->capture_default_str();
  matrix_cmd->add_option("--solver", matrix_solver, "fft or dense")->capture_default_str();
  matrix_cmd->add_option("--threads", matrix_threads, "worker threads")->capture_default_str();
  matrix_cmd->add_option("--out", matrix_out, "CSV file (stdout if omitted)");

  // lrsw
  LrswCommand lrsw;
  lrsw.threads = hardware_threads();
  std::string lrsw_scenario = "wave1";
  std::string lrsw_method = "rexii";
  std::string lrsw_M = "auto";
  std::string lrsw_out;
  auto* lrsw_cmd = app.add_subcommand("lrsw", "one shallow water run against the exact solution");
  lrsw_cmd->add_option("--scenario", lrsw_scenario, "wave1, wave2 or gaussian")->capture_default_str();
  lrsw_cmd->add_option("--method", lrsw_method, "rexi, rexii or rk4")->capture_default_str();
  lrsw_cmd->add_option("--h", lrsw.h, "Gaussian spacing")->capture_default_str();
  lrsw_cmd->add_option("--M", lrsw_M, "auto or an integer")->capture_default_str();
  lrsw_cmd->add_option("--tau", lrsw.tau, "final time")->capture_default_str();
  lrsw_cmd->add_option("--D", lrsw.D, "grid size")->capture_default_str();
  lrsw_cmd->add_option("--S", lrsw.S, "term chunks (0 = auto)")->capture_default_str();
  lrsw_cmd->add_option("--threads", lrsw.threads, "worker threads")->capture_default_str();
  lrsw_cmd->add_flag("--deterministic,!--no-deterministic", lrsw.deterministic, "fixed reduction order")
      ->capture_default_str();
  lrsw_cmd->add_option("--time-steps", lrsw.time_steps, "RK4 steps")->capture_default_str();
  lrsw_cmd->add_option("--out", lrsw_out, "run record CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return cmd_fit(fit, std::cout);

    const RationalGaussianCoeffs coeffs = default_coefficients();

    if (*scalar_cmd) {
      scalar.h_list = parse_real_list(scalar_h);
      scalar.M_list = parse_int_list(scalar_M);
      if (scalar_scheme == "rexi") {
        scalar.scheme = Variant::Rexi;
      } else if (scalar_scheme != "rexii") {
        throw std::invalid_argument("unknown scheme '" + scalar_scheme + "' (expected rexi or rexii)");
      }
      OutputTarget out(scalar_out);
      return cmd_scalar_study(scalar, coeffs, out.stream());
    }

    if (*matrix_cmd) {
      matrix.op = parse_operator_kind(matrix_op);
      matrix.scheme = parse_matrix_scheme(matrix_scheme);
      matrix.M_list = parse_int_list(matrix_M);
      if (matrix_shift != "auto" && matrix_shift != "none") {
        throw std::invalid_argument("--shift must be auto or none");
      }
      matrix.shift = matrix_shift == "auto";
      if (matrix_solver != "fft" && matrix_solver != "dense") throw std::invalid_argument("--solver must be fft or dense");
      matrix.dense = matrix_solver == "dense";
      ExecPolicy policy;
      policy.threads = matrix_threads;
      OutputTarget out(matrix_out);
      return cmd_matrix_study(matrix, coeffs, out.stream(), policy);
    }

    lrsw.scenario = lrsw::parse_scenario(lrsw_scenario);
    lrsw.method = parse_method(lrsw_method);
    if (lrsw_M != "auto") lrsw.M = parse_integer(lrsw_M);
    return cmd_lrsw(lrsw, coeffs, std::cout, lrsw_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
