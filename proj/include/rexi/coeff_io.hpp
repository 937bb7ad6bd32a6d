#pragma once

// Line-oriented coefficient file:
//
//   L 24
//   mu -5.1333333333333329e+00
//   a_0 -6.5204308289198640e+01 0.0000000000000000e+00
//   a_1 ...
//
// Every value carries 17 significant digits, enough to round-trip a double.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rexi/rational_fit.hpp"

namespace rexi {

inline constexpr const char* kCoeffPathVariable = "REXI_COEFF_PATH";

inline std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline void write_coefficients(std::ostream& out, const RationalGaussianCoeffs& c) {
  require_valid(c);
  out << "L " << c.L() << '\n';
  out << "mu " << format_exact(c.mu) << '\n';
  for (int l = 0; l <= c.L(); ++l) {
    const cplx al = c.a[static_cast<std::size_t>(l)];
    out << "a_" << l << ' ' << format_exact(al.real()) << ' ' << format_exact(al.imag()) << '\n';
  }
}

inline void write_coefficients(const std::string& path, const RationalGaussianCoeffs& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open coefficient file for writing: " + path);
  write_coefficients(out, c);
  if (!out) throw std::runtime_error("failed writing coefficient file: " + path);
}

namespace detail {

inline double parse_double(const std::string& token, int line) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw std::runtime_error("coefficient file line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  return v;
}

}  // namespace detail

/// Parses the file format; the certified fit_error is recomputed on load.
inline RationalGaussianCoeffs read_coefficients(std::istream& in, bool recertify = true) {
  std::string line;
  int line_no = 0;
  auto next_fields = [&](const std::string& expected_key) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (!in && line.empty()) {
      throw std::runtime_error("coefficient file ended early, expected '" + expected_key + "'");
    }
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key != expected_key) {
      throw std::runtime_error("coefficient file line " + std::to_string(line_no) + ": expected '" +
                               expected_key + "', found '" + key + "'");
    }
    return fields;
  };

  RationalGaussianCoeffs c;
  {
    auto fields = next_fields("L");
    int L = 0;
    if (!(fields >> L) || L < 1) throw std::runtime_error("coefficient file: L must be a positive integer");
    c.a.resize(static_cast<std::size_t>(L + 1));
  }
  {
    auto fields = next_fields("mu");
    std::string token;
    fields >> token;
    c.mu = detail::parse_double(token, line_no);
  }
  for (int l = 0; l <= c.L(); ++l) {
    auto fields = next_fields("a_" + std::to_string(l));
    std::string re;
    std::string im;
    fields >> re >> im;
    c.a[static_cast<std::size_t>(l)] = cplx(detail::parse_double(re, line_no), detail::parse_double(im, line_no));
  }
  require_valid(c);
  if (recertify) c.fit_error = certify(c);
  return c;
}

inline RationalGaussianCoeffs read_coefficients(const std::string& path, bool recertify = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
  return read_coefficients(in, recertify);
}

/// Built-in table unless REXI_COEFF_PATH names a coefficient file.
inline RationalGaussianCoeffs default_coefficients() {
  if (const char* path = std::getenv(kCoeffPathVariable); path != nullptr && *path != '\0') {
    return read_coefficients(std::string(path));
  }
  return builtin_coefficients();
}

}  // namespace rexi
