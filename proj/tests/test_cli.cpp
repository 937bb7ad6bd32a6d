#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rexi/cli.hpp"
#include "rexi/coeff_io.hpp"

namespace {

namespace cli = rexi::cli;

const rexi::RationalGaussianCoeffs& coeffs() {
  static const auto c = rexi::builtin_coefficients();
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// keeps empty fields, unlike cli::split
std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row + ",");
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rexi_cli_test_" + name);
}

}  // namespace

TEST(Parsing, Lists) {
  EXPECT_EQ(cli::parse_real_list("0.3, 0.5,1.0"), (std::vector<double>{0.3, 0.5, 1.0}));
  EXPECT_EQ(cli::parse_int_list("12,20:40:10, 7:9"), (std::vector<int>{12, 20, 30, 40, 7, 8, 9}));
  EXPECT_TRUE(cli::parse_int_list("").empty());
  EXPECT_THROW(cli::parse_int_list("5:3"), std::invalid_argument);
  EXPECT_THROW(cli::parse_int_list("1:5:0"), std::invalid_argument);
  EXPECT_THROW(cli::parse_int_list("1:2:3:4"), std::invalid_argument);
  EXPECT_THROW(cli::parse_real_list("0.5,abc"), std::invalid_argument);
  EXPECT_THROW(cli::parse_integer("3.5"), std::invalid_argument);
}

TEST(Parsing, ShortestRoundTripFormatting) {
  EXPECT_EQ(cli::fmt(0.5), "0.5");
  EXPECT_EQ(cli::fmt(1e-13), "1e-13");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(cli::parse_real(cli::fmt(x)), x);
}

TEST(Parsing, Names) {
  EXPECT_EQ(cli::parse_method("rk4"), cli::Method::Rk4);
  EXPECT_EQ(cli::parse_matrix_scheme("rexie"), cli::MatrixScheme::Rexie);
  EXPECT_THROW(cli::parse_method("euler"), std::invalid_argument);
  EXPECT_THROW(cli::parse_matrix_scheme("rexiii"), std::invalid_argument);
}

TEST(Fit, NotConvergedWritesBestSoFar) {
  const auto path = temp_file("fit_l2.txt");
  cli::FitCommand o;
  o.L = 2;
  o.target = 1e-14;
  o.out = path.string();
  std::ostringstream log;
  EXPECT_EQ(cli::cmd_fit(o, log), cli::kExitNotConverged);
  const auto back = rexi::read_coefficients(path.string());
  EXPECT_EQ(back.L(), 2);
  EXPECT_GT(back.fit_error, 1e-14);
  const auto out = lines(log.str());
  ASSERT_EQ(out.size(), 2U);
  EXPECT_EQ(out[0], "L,mu,points,fit_error,converged");
  EXPECT_TRUE(out[1].ends_with(",false"));
  std::filesystem::remove(path);
}

TEST(Fit, FullCapacityConvergesAndRoundTrips) {
  const auto path = temp_file("fit_l24.txt");
  cli::FitCommand o;
  o.out = path.string();
  std::ostringstream log;
  EXPECT_EQ(cli::cmd_fit(o, log), cli::kExitOk);
  const auto back = rexi::read_coefficients(path.string());
  EXPECT_LE(rexi::certify(back), 2e-14);
  std::ostringstream again;
  rexi::write_coefficients(again, back);
  std::ifstream in(path);
  std::stringstream disk;
  disk << in.rdbuf();
  EXPECT_EQ(again.str(), disk.str());
  std::filesystem::remove(path);
}

TEST(Fit, WideIntervalControlsTail) {
  const auto path = temp_file("fit_wide.txt");
  cli::FitCommand o;
  o.x_max = 120.0;
  o.out = path.string();
  std::ostringstream log;
  EXPECT_EQ(cli::cmd_fit(o, log), cli::kExitOk);
  const auto c = rexi::read_coefficients(path.string());
  double tail = 0.0;
  for (double x = 30.0; x <= 400.0; x += 0.25) tail = std::max(tail, std::abs(rexi::eval_R(c, x)));
  EXPECT_LE(tail, 2e-14);
  const auto t = rexi::build_terms(0.5, 71, c, rexi::Variant::Rexii);
  EXPECT_LE(std::abs(rexi::eval_scalar(t, 30.0) - std::polar(1.0, 30.0)), 1e-12);
  std::filesystem::remove(path);
}

TEST(ScalarStudy, EmptyListGivesHeaderOnly) {
  cli::ScalarStudyCommand o;
  std::ostringstream csv;
  EXPECT_EQ(cli::cmd_scalar_study(o, coeffs(), csv), cli::kExitOk);
  EXPECT_EQ(csv.str(), "h,M,error\n");
}

TEST(ScalarStudy, ThresholdAtCoverage) {
  cli::ScalarStudyCommand o;
  o.x = 100.0;
  o.h_list = {0.5};
  o.M_list = cli::parse_int_list("200:225");
  std::ostringstream csv;
  cli::cmd_scalar_study(o, coeffs(), csv);
  const auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 27U);
  int first = -1;
  for (std::size_t i = 1; i < rows.size() && first < 0; ++i) {
    const auto f = cli::split(rows[i], ',');
    ASSERT_EQ(f.size(), 3U);
    if (cli::parse_real(f[2]) < 1e-11) first = cli::parse_integer(f[1]);
  }
  EXPECT_NEAR(first, 211, 2);
}

TEST(ScalarStudy, RejectsBadInput) {
  cli::ScalarStudyCommand o;
  o.M_list = {-1};
  std::ostringstream csv;
  EXPECT_THROW(cli::cmd_scalar_study(o, coeffs(), csv), std::invalid_argument);
  o.M_list = {10};
  o.h_list = {4.0};
  EXPECT_THROW(cli::cmd_scalar_study(o, coeffs(), csv), std::invalid_argument);
}

TEST(MatrixStudy, AdvectionSchemes) {
  cli::MatrixStudyCommand o;
  o.M_list = {100, 153};
  std::ostringstream csv;
  cli::cmd_matrix_study(o, coeffs(), csv);
  const auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0], "scheme,h,M,error");
  EXPECT_TRUE(rows[2].starts_with("rexii,0.5,153,"));
  const auto rexii = cli::matrix_study_errors(o, coeffs());
  EXPECT_GE(rexii[0], 1e-6);
  EXPECT_LE(rexii[1], 1e-10);
  o.scheme = cli::MatrixScheme::Rexi;
  const auto rexi = cli::matrix_study_errors(o, coeffs());
  EXPECT_GE(rexi[1], 1e3 * rexii[1]);
  o.dense = true;
  const auto dense = cli::matrix_study_errors(o, coeffs());
  EXPECT_NEAR(dense[1], rexi[1], 1e-9 * rexi[1]);
}

TEST(MatrixStudy, ShiftHalvesM) {
  cli::MatrixStudyCommand o;
  o.op = rexi::TestOperatorKind::Schrodinger;
  o.scheme = cli::MatrixScheme::Rexie;
  o.M_list = {rexi::min_M(0.5, 2450.0)};
  const auto shifted = cli::matrix_study_errors(o, coeffs());
  o.shift = false;
  const auto plain = cli::matrix_study_errors(o, coeffs());
  EXPECT_LE(shifted[0], 1e-10);
  EXPECT_GE(plain[0], 1e-6);
}

TEST(MatrixStudy, RejectsPairings) {
  cli::MatrixStudyCommand o;
  o.M_list = {20};
  o.scheme = cli::MatrixScheme::Rexie;
  EXPECT_THROW(cli::matrix_study_errors(o, coeffs()), std::invalid_argument);
  o.op = rexi::TestOperatorKind::Schrodinger;
  o.scheme = cli::MatrixScheme::Rexi;
  EXPECT_THROW(cli::matrix_study_errors(o, coeffs()), std::invalid_argument);
}

TEST(Lrsw, AutoMFollowsEffectiveGrid) {
  cli::LrswCommand o;
  EXPECT_EQ(cli::resolve_M(o), 65);
  o.h = 1.0;
  o.scenario = rexi::lrsw::Scenario::Gaussian;
  EXPECT_EQ(cli::resolve_M(o), 580);
  o.scenario = rexi::lrsw::Scenario::Wave2;
  o.tau = 50.0;
  o.h = 0.5;
  EXPECT_EQ(cli::resolve_M(o), rexi::lrsw::estimate_M(46, 50.0, 0.5));
  o.M = 123;
  EXPECT_EQ(cli::resolve_M(o), 123);
}

TEST(Lrsw, WaveOneAutoRun) {
  cli::LrswCommand o;
  std::ostringstream summary;
  EXPECT_EQ(cli::cmd_lrsw(o, coeffs(), summary, ""), cli::kExitOk);
  const auto rows = lines(summary.str());
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0], "method,h,M_or_TS,error,ms,solves");
  const auto f = cli::split(rows[1], ',');
  ASSERT_EQ(f.size(), 6U);
  EXPECT_EQ(f[0], "rexii");
  EXPECT_EQ(f[2], "65");
  EXPECT_LE(cli::parse_real(f[3]), 1e-12);
  EXPECT_EQ(f[5], "180");
}

TEST(Lrsw, GaussianAutoRun) {
  cli::LrswCommand o;
  o.scenario = rexi::lrsw::Scenario::Gaussian;
  o.h = 1.0;
  o.threads = rexi::hardware_threads();
  const auto rec = cli::run_lrsw(o, coeffs());
  EXPECT_EQ(rec.M, 580);
  EXPECT_LE(rec.error, 1e-11);
}

TEST(Lrsw, ThreadCountDoesNotChangeBits) {
  cli::LrswCommand o;
  o.D = 32;
  rexi::lrsw::SpectralState a;
  rexi::lrsw::SpectralState b;
  cli::run_lrsw(o, coeffs(), &a);
  o.threads = 8;
  cli::run_lrsw(o, coeffs(), &b);
  EXPECT_EQ(a.data, b.data);
}

TEST(Lrsw, RecordReproducesItsError) {
  cli::LrswCommand o;
  o.method = cli::Method::Rexi;
  o.h = 0.2;
  o.M = 150;
  o.D = 64;
  const auto rec = cli::run_lrsw(o, coeffs());
  std::ostringstream csv;
  cli::write_record(csv, rec);
  const auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 2U);
  const auto head = fields(rows[0]);
  const auto f = fields(rows[1]);
  ASSERT_EQ(head.size(), f.size());
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < head.size(); ++i) {
      if (head[i] == name) return f[i];
    }
    ADD_FAILURE() << "missing column " << name;
    return std::string();
  };
  cli::LrswCommand again;
  again.scenario = rexi::lrsw::parse_scenario(col("scenario"));
  again.method = cli::parse_method(col("method"));
  again.h = cli::parse_real(col("h"));
  again.M = cli::parse_integer(col("M"));
  again.D = cli::parse_integer(col("D"));
  again.tau = cli::parse_real(col("tau"));
  again.S = static_cast<std::size_t>(cli::parse_integer(col("S")));
  again.threads = static_cast<unsigned>(cli::parse_integer(col("threads")));
  again.deterministic = col("deterministic") == "true";
  EXPECT_NEAR(cli::run_lrsw(again, coeffs()).error, cli::parse_real(col("error")), 1e-13);
}

TEST(Lrsw, Rk4RowLeavesSpacingEmpty) {
  cli::LrswCommand o;
  o.method = cli::Method::Rk4;
  o.time_steps = 50;
  o.D = 16;
  std::ostringstream summary;
  cli::cmd_lrsw(o, coeffs(), summary, "");
  EXPECT_TRUE(lines(summary.str())[1].starts_with("rk4,,50,"));
}

TEST(Lrsw, RejectsUnderResolvedWaveTwo) {
  cli::LrswCommand o;
  o.scenario = rexi::lrsw::Scenario::Wave2;
  o.D = 64;
  EXPECT_THROW(cli::run_lrsw(o, coeffs()), std::invalid_argument);
  o.D = 128;
  o.tau = -1.0;
  EXPECT_THROW(cli::run_lrsw(o, coeffs()), std::invalid_argument);
}
