// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "carpetdim/coding.hpp"
#include "carpetdim/error.hpp"
#include "carpetdim/fulldim.hpp"
#include "fixtures.hpp"

using namespace carpetdim;

namespace {

const double kD1 = fixtures::sierpinski_D(0.2, 0.45, {3, 2});

const FullDimSolution& solved(int which) {
  static const FullDimSolution s1 = solve_full_dimension(fixtures::S1());
  static const FullDimSolution s1e = solve_full_dimension(fixtures::S1eps());
  static const FullDimSolution s1b = solve_full_dimension(fixtures::S1b());
  return which == 0 ? s1 : which == 1 ? s1e : s1b;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::MalformedSpec;
}

}  // namespace

TEST_CASE("A family of S1") {
  const AFamily af = a_family(fixtures::S1());
  CHECK_NEAR(af.A(0, 0.3, 0.5), 3.0 * std::sqrt(0.2), 1e-14);
  CHECK_NEAR(af.A(0, 0.3, 0.5), 1.3416, 1e-4);
  for (double t : {0.1, 0.6, 1.3})
    for (int i : {0, 1}) {
      const AValues v = af.evaluate(i, 0.77, t);
      CHECK_NEAR(v.dlog_A, std::log(0.2), 1e-14);
      CHECK_NEAR(v.d2log_A, 0.0, 1e-14);
    }
  CHECK_FALSE(af.log_A_constant());
  CHECK(a_family(fixtures::uniform_fibres()).log_A_constant());
}

TEST_CASE("A family sign invariants") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const CarpetSpec& s : {fixtures::S1eps(), perturb_carpet(fixtures::S1(), 0.05, 3).spec}) {
    const AFamily af = a_family(s);
    for (int k = 0; k < 50; ++k) {
      const int i = k % 2;
      const double z = U(rng), t = 2.0 * U(rng);
      const AValues v = af.evaluate(i, z, t);
      CHECK(std::exp(v.log_A) > 0.0);
      CHECK(v.dlog_A < 0.0);
      CHECK(v.d2log_A >= -1e-12);
      const auto w = fiber_weights(af, t, i, z);
      double sum = 0.0;
      for (double x : w) sum += x;
      CHECK_NEAR(sum, 1.0, 1e-14);
    }
  }
}

TEST_CASE("RR1 and RR2 against finite differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const CarpetSpec& s : {fixtures::S1eps(), perturb_carpet(fixtures::S1(), 0.05, 7).spec}) {
    const AFamily af = a_family(s);
    for (int k = 0; k < 20; ++k) {
      const int i = k % 2;
      const double z = U(rng), t = 0.1 + 1.5 * U(rng);
      auto logA = [&](double x) { return af.evaluate(i, z, x).log_A; };
      auto dlogA = [&](double x) { return af.evaluate(i, z, x).dlog_A; };
      const AValues v = af.evaluate(i, z, t);
      CHECK_NEAR(v.dlog_A, fixtures::fd1(logA, t, 1e-4), 1e-7);
      CHECK_NEAR(v.d2log_A, fixtures::fd1(dlogA, t, 1e-4), 1e-6);
    }
  }
}

TEST_CASE("fiber weights") {
  const AFamily s1 = a_family(fixtures::S1());
  for (double w : fiber_weights(s1, 0.7, 0, 0.2)) CHECK_NEAR(w, 1.0 / 3.0, 1e-15);
  const CarpetSpec p = perturb_carpet(fixtures::S1(), 0.05, 2).spec;
  const AFamily af = a_family(p);
  for (double w : fiber_weights(af, 0.0, 0, 0.4)) CHECK_NEAR(w, 1.0 / 3.0, 1e-15);
  // Tilt toward the largest slope.
  const auto w = fiber_weights(af, 2.0, 0, 0.4);
  int big = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(p.a_tilde(0, j)(0.4)) > std::abs(p.a_tilde(0, big)(0.4))) big = j;
  for (int j = 0; j < 3; ++j) CHECK(w[big] >= w[j]);
}

TEST_CASE("t of Bernoulli measures on S1") {
  auto c = Collocation::make(fixtures::S1());
  const AFamily af = a_family(fixtures::S1());
  for (double p1 : {0.1, 0.5, 0.55012, 0.9}) {
    const GibbsSystem nu = build_operator(c, fixtures::bernoulli_potential(*c, {p1, 1.0 - p1}));
    CHECK_NEAR(t_of_measure(af, nu), fixtures::bernoulli_t({p1, 1.0 - p1}, {3, 2}, 0.2), 1e-12);
  }
  CHECK_NEAR(fixtures::bernoulli_t({0.55012, 0.44988}, {3, 2}, 0.2), 0.56926, 1e-5);
  CHECK_NEAR(fixtures::bernoulli_t({0.0, 1.0}, {3, 2}, 0.2), 0.43068, 1e-5);
}

TEST_CASE("t range of S1") {
  const TRange r = t_range(a_family(fixtures::S1()), 8);
  CHECK_NEAR(r.lower, std::log(2.0) / std::log(5.0), 1e-9);
  CHECK_NEAR(r.upper, std::log(3.0) / std::log(5.0), 1e-9);
  CHECK(r.lower_word == parse_row_word("2"));
  CHECK(r.upper_word == parse_row_word("1"));
  CHECK(r.outer_lower <= r.lower + 1e-12);
  CHECK(r.outer_upper >= r.upper - 1e-12);
}

TEST_CASE("t range envelopes contain the periodic optima") {
  for (int seed = 1; seed <= 4; ++seed) {
    const CarpetSpec s = perturb_carpet(fixtures::S1(), 0.05, seed).spec;
    for (int period : {1, 3, 8}) {
      const TRange r = t_range(a_family(s), period);
      CHECK(r.outer_lower <= r.lower);
      CHECK(r.upper <= r.outer_upper);
      CHECK(r.lower < r.upper);
    }
  }
  const TRange r3 = t_range(a_family(fixtures::S1eps()), 3);
  CHECK(r3.lower < 0.4307);
  // The row-1 perturbation moves the upper end by O(epsilon).
  CHECK(std::abs(r3.upper - std::log(3.0) / std::log(5.0)) < 0.05);
  CHECK(r3.upper - r3.lower < 0.2519 + 0.1);
}

TEST_CASE("t range of equal fibres collapses") {
  const TRange r = t_range(a_family(fixtures::uniform_fibres()), 4);
  CHECK_NEAR(r.lower, std::log(2.0) / std::log(5.0), 1e-12);
  CHECK_NEAR(r.upper, r.lower, 1e-12);
}

TEST_CASE("beta and the pressure curve of S1 match the two-row oracle") {
  auto c = Collocation::make(fixtures::S1());
  for (double D : {kD1, 1.3}) {
    const PhiFamily pf(c, D);
    for (double t : {0.46, 0.5, 0.56926, 0.62, 0.66}) {
      const auto o = fixtures::two_row_curve(0.2, 0.45, 3, 2, t, D);
      const PressurePoint p = pressure_curve(pf, t);
      CHECK_NEAR(p.beta, o.beta, 1e-9);
      CHECK_NEAR(p.P, o.P, 1e-10);
      CHECK_NEAR(p.dPdt, o.dPdt, 1e-9);
      CHECK_NEAR(p.beta_prime, o.beta_prime, 1e-6 * std::max(1.0, std::abs(o.beta_prime)));
      CHECK_NEAR(p.d2Pdt2, o.d2Pdt2, 1e-6 * std::max(1.0, std::abs(o.d2Pdt2)));
      CHECK(std::abs(p.beta_residual) <= 1e-12);
      CHECK(p.d2Pdt2 < 0.0);
    }
  }
}

TEST_CASE("beta residual and finite differences on a curved carpet") {
  const FullDimSolution& sol = solved(2);
  const PhiFamily pf(sol.colloc, sol.D);
  const double w = sol.t_range.upper - sol.t_range.lower;
  for (int k = 0; k < 5; ++k) {
    const double t = sol.t_range.lower + w * (0.1 + 0.2 * k);
    const PressurePoint p = pressure_curve(pf, t);
    CHECK(std::abs(p.beta_residual) <= 1e-12);
    auto P = [&](double x) { return pressure_curve(pf, x).P; };
    auto dP = [&](double x) { return pressure_curve(pf, x).dPdt; };
    CHECK_NEAR(p.dPdt, fixtures::fd1(P, t, 1e-4), 1e-6);
    CHECK_NEAR(p.d2Pdt2, fixtures::fd1(dP, t, 1e-4), 1e-5);
  }
}

TEST_CASE("degenerate family") {
  const CarpetSpec s = fixtures::uniform_fibres();
  auto c = Collocation::make(s);
  const PhiFamily pf(c, 1.3);
  CHECK(kind_of([&] { beta_of_t(pf, 0.43, 1e-12); }) == ErrorKind::DegenerateFamily);
  const FullDimSolution sol = solve_full_dimension(s);
  CHECK(sol.degenerate);
  CHECK(std::isnan(sol.beta_star));
  CHECK_NEAR(sol.D, std::log(2.0) / std::log(1.0 / 0.45) + std::log(2.0) / std::log(5.0), 1e-10);
  CHECK_FALSE(check_H_eps(sol, sol.t_range, 0.0));
  const UniquenessReport rep = uniqueness_certificate(sol);
  CHECK(rep.degenerate);
  CHECK(rep.rows.empty());
  CHECK(rep.unique);
}

TEST_CASE("S1 full dimension against the closed form") {
  const FullDimSolution& sol = solved(0);
  CHECK_NEAR(sol.D, kD1, 1e-9);
  const double rho = fixtures::sierpinski_rho(0.2, 0.45);
  CHECK_NEAR(sol.rho_star, rho, 1e-8);
  CHECK_NEAR(sol.beta_star, rho, 1e-8);
  const auto p = fixtures::sierpinski_p(0.2, 0.45, {3, 2});
  CHECK_NEAR(sol.t_star, fixtures::bernoulli_t(p, {3, 2}, 0.2), 1e-9);
  CHECK_NEAR(cylinder_mass(*sol.nu, parse_row_word("1")), p[0], 1e-9);
  CHECK_NEAR(p[0], 0.55012, 1e-5);
  CHECK(sol.t_range.lower < sol.t_star);
  CHECK(sol.t_star < sol.t_range.upper);
  CHECK_FALSE(sol.degenerate);
}

TEST_CASE("stationarity and full-dimension identities") {
  const double tol = 1e-10;
  for (int which : {0, 1, 2}) {
    const FullDimSolution& sol = solved(which);
    CHECK(std::abs(sol.diagnostics.P_at_star) <= tol);
    CHECK(std::abs(sol.diagnostics.dPdt_at_star) <= tol);
    CHECK(std::abs(sol.beta_star - sol.rho_star) <= 10 * tol);
    CHECK(std::abs(dimension_of_measure(sol) - sol.D) <= 10 * tol);
    CHECK(std::abs(sol.diagnostics.beta_residual) <= tol);
    CHECK(sol.diagnostics.d2Pdt2_at_star < 0.0);
  }
}

TEST_CASE("S1eps stays close to S1") {
  CHECK_NEAR(solved(1).D, kD1, 0.02);
  const FullDimSolution half = solve_full_dimension(perturb_carpet(fixtures::S1(), 0.025, 1).spec);
  const FullDimSolution full = solve_full_dimension(perturb_carpet(fixtures::S1(), 0.05, 1).spec);
  CHECK(std::abs(half.D - kD1) <= std::abs(full.D - kD1) + 1e-6);
}

TEST_CASE("dimension of Bernoulli measures never exceeds D") {
  auto c = Collocation::make(fixtures::S1());
  const AFamily af = a_family(fixtures::S1());
  for (double p1 : {0.2, 0.5, 0.55012, 0.8}) {
    const GibbsSystem nu = build_operator(c, fixtures::bernoulli_potential(*c, {p1, 1.0 - p1}));
    const double t = t_of_measure(af, nu);
    const double d = dimension_of_measure(af, nu, t);
    CHECK_NEAR(d, fixtures::bernoulli_dimension({p1, 1.0 - p1}, {3, 2}, 0.2, 0.45), 1e-10);
    CHECK(d <= kD1 + 1e-10);
  }
  CHECK_NEAR(fixtures::bernoulli_dimension({0.5, 0.5}, {3, 2}, 0.2, 0.45), 1.42469, 1e-5);
}

TEST_CASE("measure of full dimension on cylinders") {
  const FullDimSolution& sol = solved(0);
  const double p1 = fixtures::sierpinski_p(0.2, 0.45, {3, 2})[0];
  CHECK_NEAR(measure_cylinder(sol, parse_full_word("1.1")), p1 / 3.0, 1e-9);
  CHECK_NEAR(p1 / 3.0, 0.18337, 1e-5);
  for (int which : {0, 1, 2}) {
    const FullDimSolution& s = solved(which);
    double total = 0.0;
    for (const FullWord& w : all_full_words(s.af.spec, 1)) total += measure_cylinder(s, w);
    CHECK_NEAR(total, 1.0, 1e-9);
    for (int i = 0; i < 2; ++i) {
      double row = 0.0;
      for (const FullWord& w : full_words_over(s.af.spec, RowWord{{i}})) row += measure_cylinder(s, w);
      CHECK_NEAR(row, cylinder_mass(*s.nu, RowWord{{i}}), 1e-9);
    }
  }
}

TEST_CASE("measure of full dimension is shift compatible") {
  std::mt19937_64 rng(9);
  for (int which : {1, 2}) {
    const FullDimSolution& s = solved(which);
    const std::vector<FullWord> letters = all_full_words(s.af.spec, 1);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(letters.size()) - 1);
    for (int trial = 0; trial < 20; ++trial) {
      FullWord w;
      for (int k = 0; k <= trial % 3; ++k) w.symbols.push_back(letters[pick(rng)][0]);
      const double mw = measure_cylinder(s, w);
      double pre = 0.0, post = 0.0;
      for (const FullWord& l : letters) {
        FullWord a = l, b = w;
        a.symbols.insert(a.symbols.end(), w.symbols.begin(), w.symbols.end());
        b.symbols.push_back(l[0]);
        pre += measure_cylinder(s, a);
        post += measure_cylinder(s, b);
      }
      CHECK_NEAR(pre, mw, 1e-8);
      CHECK_NEAR(post, mw, 1e-8);
    }
  }
}

TEST_CASE("H_eps check") {
  const FullDimSolution& sol = solved(0);
  CHECK(check_H_eps(sol, sol.t_range, 0.05));
  const double half = 0.5 * (sol.t_range.upper - sol.t_range.lower);
  CHECK_FALSE(check_H_eps(sol, sol.t_range, half));
  CHECK_FALSE(check_H_eps(sol, sol.t_range, half + 0.1));
}

TEST_CASE("uniqueness certificate of S1") {
  const UniquenessReport rep = uniqueness_certificate(solved(0));
  CHECK(rep.unique);
  CHECK(rep.concavity_ok);
  CHECK(rep.H_eps_ok);
  REQUIRE(rep.rows.size() == 50);
  for (const CurveRow& r : rep.rows) {
    CHECK(r.d2Pdt2 < 0.0);
    CHECK(r.t >= rep.t_lo - 1e-15);
    CHECK(r.t <= rep.t_hi + 1e-15);
    const auto o = fixtures::two_row_curve(0.2, 0.45, 3, 2, r.t, rep.D);
    CHECK_NEAR(r.d2Pdt2, o.d2Pdt2, 1e-6 * std::abs(o.d2Pdt2));
  }
  CHECK(rep.max_d2P < -1e-4);
  CHECK_NEAR(rep.epsilon, 0.05 * (rep.t_range.upper - rep.t_range.lower), 1e-15);
  CHECK(rep.gamma_witness >= std::log(5.0));
  CHECK(rep.hoelder_phi == 0.0);
  CHECK(rep.hoelder_psi == 0.0);
}

TEST_CASE("uniqueness certificate of S1eps and a curved carpet") {
  for (int which : {1, 2}) {
    const UniquenessReport rep = uniqueness_certificate(solved(which));
    CHECK(rep.unique);
    CHECK(rep.max_d2P < -1e-4);
  }
  CHECK(uniqueness_certificate(solved(1)).hoelder_phi > 0.0);
  CHECK(uniqueness_certificate(solved(2)).hoelder_psi > 0.0);
}

TEST_CASE("certificate rows do not depend on the thread count") {
  UniquenessOptions o;
  o.grid = 12;
  const UniquenessReport a = uniqueness_certificate(solved(1), o);
  setenv("CARPETDIM_THREADS", "1", 1);
  const UniquenessReport b = uniqueness_certificate(solved(1), o);
  unsetenv("CARPETDIM_THREADS");
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].t == b.rows[k].t);
    CHECK(a.rows[k].d2Pdt2 == b.rows[k].d2Pdt2);
  }
}

TEST_CASE("solution is stable under K refinement") {
  for (const CarpetSpec& s : {fixtures::S1(), fixtures::S1eps(), fixtures::S1b()}) {
    FullDimOptions o;
    o.K = 128;
    const FullDimSolution hi = solve_full_dimension(s, o);
    const FullDimSolution lo = solve_full_dimension(s);
    CHECK_NEAR(hi.D, lo.D, 1e-8);
    CHECK_NEAR(hi.t_star, lo.t_star, 1e-8);
    CHECK_NEAR(hi.beta_star, lo.beta_star, 1e-8);
  }
}
