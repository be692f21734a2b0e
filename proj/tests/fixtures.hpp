// SPDX-License-Identifier: Apache-2.0
// Shared carpets and closed-form oracles for the test suites.  The oracles
// below are written from scratch against the constant-slope reductions and
// never call into the library's solvers.
#ifndef CARPETDIM_TESTS_FIXTURES_HPP
#define CARPETDIM_TESTS_FIXTURES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/observable.hpp"
#include "carpetdim/transfer.hpp"

#define CHECK_NEAR(a, b, tol)                                                            \
  do {                                                                                   \
    const double cn_a_ = (a), cn_b_ = (b), cn_t_ = (tol);                                \
    CHECK_MESSAGE(std::abs(cn_a_ - cn_b_) <= cn_t_, #a " = ", cn_a_, ", " #b " = ", cn_b_, \
                  ", diff = ", std::abs(cn_a_ - cn_b_), ", tol = ", cn_t_);              \
  } while (0)

#define REQUIRE_NEAR(a, b, tol)                                                            \
  do {                                                                                     \
    const double rn_a_ = (a), rn_b_ = (b), rn_t_ = (tol);                                  \
    REQUIRE_MESSAGE(std::abs(rn_a_ - rn_b_) <= rn_t_, #a " = ", rn_a_, ", " #b " = ", rn_b_, \
                    ", diff = ", std::abs(rn_a_ - rn_b_), ", tol = ", rn_t_);              \
  } while (0)

namespace fixtures {

using carpetdim::CarpetSpec;
using carpetdim::CellSpec;
using carpetdim::Poly;
using carpetdim::RowSpec;

inline CellSpec cell(Poly a, double u) { return CellSpec{std::move(a), Poly::constant(u)}; }

// a = 0.2, b = 0.45, m = (3, 2).
inline CarpetSpec S1() {
  CarpetSpec s;
  s.rows.push_back(RowSpec{Poly::linear(0.0, 0.45),
                           {cell(Poly::constant(0.2), 0.05), cell(Poly::constant(0.2), 0.35),
                            cell(Poly::constant(0.2), 0.65)}});
  s.rows.push_back(RowSpec{Poly::linear(0.55, 0.45),
                           {cell(Poly::constant(0.2), 0.1), cell(Poly::constant(0.2), 0.6)}});
  return s;
}

// Row-1 slopes 0.2 (1 + 0.05 T3(2y - 1)), expanded in the monomial basis.
inline Poly s1eps_slope() { return Poly({0.19, 0.18, -0.48, 0.32}); }

inline CarpetSpec S1eps() {
  CarpetSpec s = S1();
  for (auto& c : s.rows[0].cells) c.a_tilde = s1eps_slope();
  return s;
}

// S1 with a curved first base map; psi is no longer constant.
inline CarpetSpec S1b() {
  CarpetSpec s = S1();
  s.rows[0].b = Poly({0.0, 0.43, 0.02});
  return s;
}

// Every row has the same two slopes: log A is constant.
inline CarpetSpec uniform_fibres() {
  CarpetSpec s;
  s.rows.push_back(RowSpec{Poly::linear(0.0, 0.45),
                           {cell(Poly::constant(0.2), 0.1), cell(Poly::constant(0.2), 0.6)}});
  s.rows.push_back(RowSpec{Poly::linear(0.55, 0.45),
                           {cell(Poly::constant(0.2), 0.1), cell(Poly::constant(0.2), 0.6)}});
  return s;
}

// ---- constant-slope oracles -------------------------------------------------

inline double sierpinski_rho(double a, double b) { return std::log(b) / std::log(a); }

inline double sierpinski_D(double a, double b, const std::vector<int>& m) {
  const double rho = sierpinski_rho(a, b);
  double s = 0.0;
  for (int mi : m) s += std::pow(mi, rho);
  return std::log(s) / std::log(1.0 / b);
}

// Optimal row marginal p_i = m_i^rho / sum m_k^rho.
inline std::vector<double> sierpinski_p(double a, double b, const std::vector<int>& m) {
  const double rho = sierpinski_rho(a, b);
  double s = 0.0;
  for (int mi : m) s += std::pow(mi, rho);
  std::vector<double> p;
  for (int mi : m) p.push_back(std::pow(mi, rho) / s);
  return p;
}

// t(nu) for a Bernoulli row measure with uniform fibres.
inline double bernoulli_t(const std::vector<double>& p, const std::vector<int>& m, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log(m[i]);
  return s / std::log(1.0 / a);
}

// D(mu) for Bernoulli(p) rows and uniform fibres.
inline double bernoulli_dimension(const std::vector<double>& p, const std::vector<int>& m,
                                  double a, double b) {
  double h = 0.0;
  for (double q : p)
    if (q > 0.0) h -= q * std::log(q);
  return h / std::log(1.0 / b) + bernoulli_t(p, m, a);
}

// Pressure curve of Phi_t for a two-row constant-slope carpet, at candidate D.
// The Gibbs state is Bernoulli(q); beta is fixed by q1 logA_1 + q2 logA_2 = 0.
struct TwoRowCurve {
  double q1 = 0.0, beta = 0.0, beta_prime = 0.0, P = 0.0, dPdt = 0.0, d2Pdt2 = 0.0;
};

inline TwoRowCurve two_row_curve(double a, double b, int m1, int m2, double t, double D) {
  const double la = std::log(a);
  const double A1 = std::log(m1) + t * la;
  const double A2 = std::log(m2) + t * la;
  const double L = A1 - A2;
  const double psi = -std::log(b);
  TwoRowCurve c;
  c.q1 = -A2 / L;
  const double q2 = 1.0 - c.q1;
  c.beta = std::log(c.q1 / q2) / L;
  c.beta_prime = -la / (L * L * c.q1 * q2);
  c.P = (t - D) * psi + std::log(std::exp(c.beta * A1) + std::exp(c.beta * A2));
  c.dPdt = psi + c.beta * la;
  c.d2Pdt2 = c.beta_prime * la;
  return c;
}

// ---- numerics helpers -------------------------------------------------------

// Five-point central first derivative.
inline double fd1(const std::function<double(double)>& f, double x, double h) {
  return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12.0 * h);
}

// Three-point central second derivative.
inline double fd2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline carpetdim::Observable bernoulli_potential(const carpetdim::Collocation& c,
                                                 const std::vector<double>& p) {
  return c.tabulate([&](int i, double) { return std::log(p[i]); });
}

// Smooth random potential: a short cosine series per component.
inline carpetdim::Observable random_potential(const carpetdim::Collocation& c, std::mt19937_64& rng,
                                              double amplitude = 0.5) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<std::vector<double>> coef(c.components(), std::vector<double>(4));
  for (auto& row : coef)
    for (double& x : row) x = u(rng);
  return c.tabulate([&](int i, double z) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += coef[i][k] * std::cos(k * M_PI * z);
    return s;
  });
}

}  // namespace fixtures

#endif  // CARPETDIM_TESTS_FIXTURES_HPP
