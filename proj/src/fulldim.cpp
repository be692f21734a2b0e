// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/fulldim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "carpetdim/error.hpp"
#include "carpetdim/parallel.hpp"

namespace carpetdim {

namespace {

constexpr double kExpTol = 1e-13;
constexpr double kDegenerateQ = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Root of a decreasing f on [lo, inf) with f(lo) >= 0; the right end is found
// by doubling.  Returns NaN if no sign change appears below `cap`.
template <class F>
double decreasing_root(F f, double lo, double cap) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (flo < 0.0) return kNaN;
  double hi = std::max(1.0, 2.0 * lo);
  double fhi = f(hi);
  while (fhi > 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    if (hi > cap) return kNaN;
    fhi = f(hi);
  }
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

double lipschitz_log_ratio(const CarpetSpec& spec, double h) {
  // max over cells of sup|a~'| / inf|a~|, the inf taken on the grid minus slack.
  double R = 0.0;
  for (int i = 0; i < spec.row_count(); ++i)
    for (int j = 0; j < spec.cell_count(i); ++j) {
      const Poly& a = spec.a_tilde(i, j);
      const double da = a.derivative().sup_bound();
      if (da == 0.0) continue;
      double amin = kInf;
      for (double y : unit_grid(static_cast<int>(std::lround(1.0 / h)) + 1))
        amin = std::min(amin, std::abs(a(y)));
      amin -= 0.5 * da * h;
      R = std::max(R, amin > 0.0 ? da / amin : kInf);
    }
  return R;
}

}  // namespace

// ---------------------------------------------------------------------------
// A-family

AValues AFamily::evaluate(int row, double z, double t) const {
  const int n = spec.cell_count(row);
  double L[64];
  std::vector<double> Lbig;
  double* Lp = L;
  if (n > 64) {
    Lbig.resize(n);
    Lp = Lbig.data();
  }
  double mx = -kInf;
  for (int j = 0; j < n; ++j) {
    Lp[j] = std::log(std::abs(spec.a_tilde(row, j)(z)));
    mx = std::max(mx, t * Lp[j]);
  }
  double S = 0.0, S1 = 0.0, S2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double e = std::exp(t * Lp[j] - mx);
    S += e;
    S1 += e * Lp[j];
  }
  const double mean = S1 / S;
  for (int j = 0; j < n; ++j) {
    const double e = std::exp(t * Lp[j] - mx);
    S2 += e * (Lp[j] - mean) * (Lp[j] - mean);
  }
  return {mx + std::log(S), mean, std::max(0.0, S2 / S)};
}

double AFamily::A(int row, double z, double t) const { return std::exp(evaluate(row, z, t).log_A); }

std::vector<double> AFamily::weights(int row, double z, double t) const {
  const int n = spec.cell_count(row);
  std::vector<double> w(n);
  double mx = -kInf;
  for (int j = 0; j < n; ++j) {
    w[j] = t * std::log(std::abs(spec.a_tilde(row, j)(z)));
    mx = std::max(mx, w[j]);
  }
  double S = 0.0;
  for (double& x : w) S += (x = std::exp(x - mx));
  for (double& x : w) x /= S;
  return w;
}

AFamily::Tabulated AFamily::tabulate(const Collocation& colloc, double t) const {
  Tabulated out{colloc.constant(0.0), colloc.constant(0.0), colloc.constant(0.0)};
  const int K = colloc.nodes();
  for (int i = 0; i < colloc.components(); ++i)
    for (int k = 0; k < K; ++k) {
      const AValues v = evaluate(i, colloc.grid_ptr()->node(k), t);
      out.log_A.component(i)[k] = v.log_A;
      out.dlog_A.component(i)[k] = v.dlog_A;
      out.d2log_A.component(i)[k] = v.d2log_A;
    }
  return out;
}

bool AFamily::log_A_constant() const {
  std::vector<double> ref;
  for (int i = 0; i < spec.row_count(); ++i) {
    std::vector<double> slopes;
    for (int j = 0; j < spec.cell_count(i); ++j) {
      const Poly& a = spec.a_tilde(i, j);
      if (!a.is_constant()) return false;
      slopes.push_back(std::abs(a(0.0)));
    }
    std::sort(slopes.begin(), slopes.end());
    if (i == 0) {
      ref = std::move(slopes);
      continue;
    }
    if (slopes.size() != ref.size()) return false;
    for (std::size_t k = 0; k < ref.size(); ++k)
      if (std::abs(slopes[k] - ref[k]) > 1e-15) return false;
  }
  return true;
}

AFamily a_family(const CarpetSpec& spec) {
  check_well_formed(spec);
  return AFamily{spec};
}

std::vector<double> fiber_weights(const AFamily& af, double t, int row, double z) {
  return af.weights(row, z, t);
}

Observable psi_observable(const Collocation& colloc) {
  const CarpetSpec& spec = colloc.spec();
  std::vector<Poly> db;
  for (int i = 0; i < spec.row_count(); ++i) db.push_back(spec.b(i).derivative());
  return colloc.tabulate([&](int i, double z) { return -std::log(std::abs(db[i](z))); });
}

PhiFamily::PhiFamily(std::shared_ptr<const Collocation> colloc, double D)
    : colloc_(std::move(colloc)), D_(D), af_{colloc_->spec()}, psi_(psi_observable(*colloc_)) {}

Observable PhiFamily::potential(double t, double beta, const Observable& log_A) const {
  Observable g = (t - D_) * psi_;
  g.values() += beta * log_A.values();
  return g;
}

// ---------------------------------------------------------------------------
// beta(t) and the pressure curve

BetaSolution beta_of_t(const PhiFamily& pf, double t, double tol, std::optional<double> beta_hint) {
  const AFamily::Tabulated tab = pf.a_family().tabulate(pf.collocation(), t);
  const Observable& logA = tab.log_A;

  BetaSolution out;
  auto evaluate = [&](double beta) {
    auto sys = std::make_shared<const GibbsSystem>(
        build_operator(pf.collocation_ptr(), pf.potential(t, beta, logA)));
    ++out.evaluations;
    return std::make_pair(sys, expectation(*sys, logA, kExpTol));
  };

  double beta = beta_hint.value_or(0.0);
  if (!std::isfinite(beta)) beta = 0.0;
  double a = -kInf, b = kInf;  // F(a) < 0 < F(b)
  double cap = 2.0;
  bool zero_checked = false;
  for (int it = 0; it < 300; ++it) {
    auto [sys, F] = evaluate(beta);
    out.beta = beta;
    out.nu = sys;
    out.residual = F;
    if (std::abs(F) <= tol) return out;
    if (F > 0.0) b = beta;
    else a = beta;
    double dF = correlation_form(*sys, logA, logA, kExpTol);
    if (dF < kDegenerateQ && !zero_checked) {
      zero_checked = true;
      const double dF0 = beta == 0.0 ? dF
                                     : correlation_form(*evaluate(0.0).first, logA, logA, kExpTol);
      if (dF0 < kDegenerateQ)
        throw Error(ErrorKind::DegenerateFamily,
                    "log A has (numerically) zero asymptotic variance; beta is undefined");
    }
    double next = dF > 0.0 ? beta - F / dF : kNaN;
    if (std::isfinite(a) && std::isfinite(b)) {
      if (b - a <= 4e-16 * (1.0 + std::abs(beta))) return out;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
    } else {
      const double dir = F > 0.0 ? -1.0 : 1.0;
      if (!std::isfinite(next) || std::abs(next - beta) > cap) next = beta + dir * cap;
      cap *= 2.0;
      if (std::abs(next) > 1e4)
        throw Error(ErrorKind::BracketFailure,
                    "no beta with zero mean log A; t is outside the admissible range");
    }
    beta = next;
  }
  throw Error(ErrorKind::NoConvergence, "beta(t) solve did not converge");
}

PressurePoint pressure_curve(const PhiFamily& pf, double t, double tol, std::optional<double> beta_hint) {
  const BetaSolution bs = beta_of_t(pf, t, tol, beta_hint);
  const AFamily::Tabulated tab = pf.a_family().tabulate(pf.collocation(), t);
  const GibbsSystem& nu = *bs.nu;
  const double beta = bs.beta;
  const Observable& psi = pf.psi();

  const double E_psi = expectation(nu, psi, kExpTol);
  const double E_d = expectation(nu, tab.dlog_A, kExpTol);
  const double E_d2 = expectation(nu, tab.d2log_A, kExpTol);

  const double F_beta = correlation_form(nu, tab.log_A, tab.log_A, kExpTol);
  Observable dphi_dt = psi;  // d/dt Phi_t at fixed beta
  dphi_dt.values() += beta * tab.dlog_A.values();
  const double F_t = E_d + correlation_form(nu, tab.log_A, dphi_dt, kExpTol);
  const double beta_prime = -F_t / F_beta;

  Observable phidot = dphi_dt;
  phidot.values() += beta_prime * tab.log_A.values();

  PressurePoint p;
  p.t = t;
  p.P = nu.pressure();
  p.dPdt = E_psi + beta * E_d;
  p.d2Pdt2 = beta_prime * E_d + beta * E_d2 + correlation_form(nu, psi, phidot, kExpTol) +
             beta * correlation_form(nu, tab.dlog_A, phidot, kExpTol);
  p.beta = beta;
  p.beta_prime = beta_prime;
  p.rho = -E_psi / E_d;
  p.beta_residual = bs.residual;
  p.nu = bs.nu;
  return p;
}

// ---------------------------------------------------------------------------
// t(nu) and the admissible range

double t_of_measure(const AFamily& af, const GibbsSystem& nu, double tol) {
  const Collocation& colloc = nu.collocation();
  auto F = [&](double t) { return expectation(nu, af.tabulate(colloc, t).log_A, tol); };
  const double t = decreasing_root(F, 0.0, 1e3);
  if (!std::isfinite(t))
    throw Error(ErrorKind::BracketFailure, "int log A dnu keeps its sign on [0, 1000]");
  return t;
}

TRange t_range(const AFamily& af, int max_period) {
  const CarpetSpec& spec = af.spec;
  const int m = spec.row_count();
  if (max_period < 1) throw Error(ErrorKind::MalformedSpec, "t_range: max_period must be >= 1");

  TRange out;
  out.lower = kInf;
  out.upper = -kInf;
  double words = 0.0;
  int period = 0;
  for (int p = 1; p <= max_period; ++p) {
    words += std::pow(static_cast<double>(m), p);
    if (words > 20000.0 && p > 1) break;
    period = p;
  }
  out.max_period = period;

  for (int p = 1; p <= period; ++p) {
    for (const RowWord& w : all_row_words(m, p)) {
      // log|a~| at each orbit point, z_k the tail coordinate after symbol k.
      std::vector<std::vector<double>> L(p);
      for (int k = 0; k < p; ++k) {
        RowWord tail;
        for (int q = 1; q <= p; ++q) tail.symbols.push_back(w[(k + q) % p]);
        const double z = tail_coordinate(spec, tail, p, 1e-16).z;
        for (int j = 0; j < spec.cell_count(w[k]); ++j)
          L[k].push_back(std::log(std::abs(spec.a_tilde(w[k], j)(z))));
      }
      auto F = [&](double t) {
        double s = 0.0;
        for (const auto& Lk : L) {
          const double mx = t * *std::max_element(Lk.begin(), Lk.end());
          double acc = 0.0;
          for (double l : Lk) acc += std::exp(t * l - mx);
          s += mx + std::log(acc);
        }
        return s / static_cast<double>(L.size());
      };
      const double t = decreasing_root(F, 0.0, 1e3);
      if (!std::isfinite(t)) continue;
      // Repeats of a word tie up to root tolerance; keep the shortest.
      if (t < out.lower - 1e-12) {
        out.lower = t;
        out.lower_word = w;
      }
      if (t > out.upper + 1e-12) {
        out.upper = t;
        out.upper_word = w;
      }
    }
  }

  // Envelope: min/max of log A over a grid, widened by a Lipschitz bound in z.
  const int G = 1025;
  const double h = 1.0 / (G - 1);
  const double R = lipschitz_log_ratio(spec, h);
  const std::vector<double> ys = unit_grid(G);
  auto extreme = [&](double t, bool want_min) {
    double e = want_min ? kInf : -kInf;
    for (int i = 0; i < m; ++i)
      for (double y : ys) {
        const double v = af.evaluate(i, y, t).log_A;
        e = want_min ? std::min(e, v) : std::max(e, v);
      }
    const double slack = 0.5 * t * R * h;
    return want_min ? e - slack : e + slack;
  };
  out.outer_lower = decreasing_root([&](double t) { return extreme(t, true); }, 0.0, 1e3);
  out.outer_upper = decreasing_root([&](double t) { return extreme(t, false); }, 0.0, 1e3);
  if (!std::isfinite(out.outer_lower)) out.outer_lower = 0.0;
  if (!std::isfinite(out.outer_upper)) out.outer_upper = kInf;
  return out;
}

// ---------------------------------------------------------------------------
// Full-dimension solve

namespace {

struct InnerResult {
  PressurePoint point;
  int evaluations = 0;
};

// Stationary point of t -> P(Phi_t) in (lo, hi): Newton on dP/dt, bisection
// on its sign when Newton leaves the bracket or the curvature is not negative.
InnerResult maximize_pressure(const PhiFamily& pf, double lo, double hi, double t0,
                              std::optional<double> hint, double tol, int max_iter) {
  const double width = hi - lo;
  double a = lo, b = hi;
  double t = std::clamp(t0, lo + 0.01 * width, hi - 0.01 * width);
  const double beta_tol = std::max(0.01 * tol, 1e-13);
  const double stop = std::max(0.01 * tol, 1e-13);
  InnerResult out;
  for (int it = 0; it < max_iter; ++it) {
    PressurePoint pt = pressure_curve(pf, t, beta_tol, hint);
    ++out.evaluations;
    hint = pt.beta;
    out.point = pt;
    if (std::abs(pt.dPdt) <= stop) return out;
    if (pt.dPdt > 0.0) a = t;
    else b = t;
    double next = pt.d2Pdt2 < 0.0 ? t - pt.dPdt / pt.d2Pdt2 : kNaN;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) return out;
    t = next;
  }
  throw Error(ErrorKind::NoConvergence, "stationary point of the pressure curve not found");
}

FullDimSolution solve_degenerate(FullDimSolution sol) {
  const AFamily& af = sol.af;
  const double t0 = decreasing_root([&](double t) { return af.evaluate(0, 0.0, t).log_A; }, 0.0, 1e3);
  if (!std::isfinite(t0)) throw Error(ErrorKind::BracketFailure, "log A has no root in t");
  const Observable psi = psi_observable(*sol.colloc);
  auto P = [&](double s) { return build_operator(sol.colloc, -s * psi).pressure(); };
  const double s = decreasing_root(P, 0.0, 1e3);
  if (!std::isfinite(s)) throw Error(ErrorKind::BracketFailure, "no root of P(-s psi)");
  auto nu = std::make_shared<const GibbsSystem>(build_operator(sol.colloc, -s * psi));
  const double E_psi = expectation(*nu, psi, kExpTol);
  const double int_phi = -af.evaluate(0, 0.0, t0).dlog_A;

  sol.D = s + t0;
  sol.t_star = t0;
  sol.beta_star = kNaN;
  sol.rho_star = E_psi / int_phi;
  sol.degenerate = true;
  sol.nu = nu;
  sol.t_range.lower = sol.t_range.upper = t0;
  sol.diagnostics.P_at_star = nu->pressure();
  sol.diagnostics.eigen_residual = nu->eigen_residual();
  return sol;
}

}  // namespace

FullDimSolution solve_full_dimension(const CarpetSpec& spec, const FullDimOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::MalformedSpec, "tol must be positive");
  FullDimSolution sol;
  sol.colloc = Collocation::make(spec, opts.K);
  sol.af = a_family(spec);
  sol.t_range = t_range(sol.af, opts.max_period);
  if (sol.af.log_A_constant()) return solve_degenerate(std::move(sol));

  const TRange& tr = sol.t_range;
  if (!(tr.upper - tr.lower > 1e-12))
    throw Error(ErrorKind::DegenerateFamily, "t(nu) is constant over periodic measures");

  double D = 1.5;
  double lo = -kInf, hi = kInf;  // g(lo) > 0 > g(hi)
  double t_guess = 0.5 * (tr.lower + tr.upper);
  std::optional<double> beta_guess;
  const double stop = 0.1 * opts.tol;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const PhiFamily pf(sol.colloc, D);
    const InnerResult inner =
        maximize_pressure(pf, tr.lower, tr.upper, t_guess, beta_guess, opts.tol, opts.max_inner);
    const PressurePoint& pt = inner.point;
    sol.diagnostics.inner_evaluations += inner.evaluations;
    sol.diagnostics.outer_iterations = outer;
    t_guess = pt.t;
    beta_guess = pt.beta;

    const double g = pt.P;
    // dg/dD = -int psi dnu.
    const double E_psi = expectation(*pt.nu, pf.psi(), kExpTol);
    const double step = g / E_psi;
    if (std::abs(g) <= stop || std::abs(step) <= 1e-15 * D) {
      sol.D = D;
      sol.t_star = pt.t;
      sol.beta_star = pt.beta;
      sol.rho_star = pt.rho;
      sol.nu = pt.nu;
      sol.diagnostics.P_at_star = pt.P;
      sol.diagnostics.dPdt_at_star = pt.dPdt;
      sol.diagnostics.d2Pdt2_at_star = pt.d2Pdt2;
      sol.diagnostics.beta_residual = pt.beta_residual;
      sol.diagnostics.eigen_residual = pt.nu->eigen_residual();
      return sol;
    }
    if (g > 0.0) lo = D;
    else hi = D;
    double next = D + step;
    if (std::isfinite(lo) && std::isfinite(hi) && !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next <= 0.0) next = 0.5 * D;
    D = next;
  }
  throw Error(ErrorKind::NoConvergence, "dimension solve did not converge");
}

// ---------------------------------------------------------------------------
// Measures and dimensions

double measure_cylinder(const FullDimSolution& sol, const FullWord& word, double tol) {
  if (word.size() == 0) throw Error(ErrorKind::MalformedSpec, "cylinder word is empty");
  const CarpetSpec& spec = sol.af.spec;
  for (const Letter& l : word.symbols)
    if (l.row < 0 || l.row >= spec.row_count() || l.col < 0 || l.col >= spec.cell_count(l.row))
      throw Error(ErrorKind::MalformedSpec, "cylinder word letter out of range");
  const double t = sol.t_star;
  const BranchFactor factor = [&](std::size_t k, int row, double zeta) {
    return sol.af.weights(row, zeta, t)[word[k].col];
  };
  return expectation(*sol.nu, cylinder_branch(*sol.nu, word.rows(), factor), tol);
}

double dimension_of_measure(const AFamily& af, const GibbsSystem& nu, double t, double tol) {
  const Collocation& colloc = nu.collocation();
  const AFamily::Tabulated tab = af.tabulate(colloc, t);
  const double h = entropy(nu, tol);
  const double E_psi = expectation(nu, psi_observable(colloc), tol);
  const double E_logA = expectation(nu, tab.log_A, tol);
  const double int_phi = -expectation(nu, tab.dlog_A, tol);
  // h_mu(T) - h_nu(S) = int log A dnu + t int phi dmu.
  return h / E_psi + (E_logA + t * int_phi) / int_phi;
}

double dimension_of_measure(const FullDimSolution& sol, double tol) {
  return dimension_of_measure(sol.af, *sol.nu, sol.t_star, tol);
}

bool check_H_eps(const FullDimSolution& sol, const TRange& range, double epsilon) {
  if (sol.degenerate) return false;
  return range.lower + epsilon < sol.t_star && sol.t_star < range.upper - epsilon;
}

// ---------------------------------------------------------------------------
// Uniqueness certificate

UniquenessReport uniqueness_certificate(const CarpetSpec& spec, const UniquenessOptions& opts) {
  return uniqueness_certificate(solve_full_dimension(spec, opts.solve), opts);
}

UniquenessReport uniqueness_certificate(const FullDimSolution& sol, const UniquenessOptions& opts) {
  const CarpetSpec& spec = sol.af.spec;
  UniquenessReport rep;
  rep.D = sol.D;
  rep.t_star = sol.t_star;
  rep.t_range = sol.t_range;

  // Derivative-based proxies for the Hoelder seminorms of phi and psi.
  const std::vector<double> ys = unit_grid(513);
  double phi_min = kInf, phi_max = -kInf;
  for (int i = 0; i < spec.row_count(); ++i) {
    const Poly db = spec.b(i).derivative();
    const Poly d2b = db.derivative();
    for (int j = 0; j < spec.cell_count(i); ++j) {
      const Poly& a = spec.a_tilde(i, j);
      const Poly da = a.derivative();
      for (double y : ys) {
        const double phi = -std::log(std::abs(a(y)));
        phi_min = std::min(phi_min, phi);
        phi_max = std::max(phi_max, phi);
        rep.hoelder_phi = std::max(rep.hoelder_phi, std::abs(da(y) / a(y)));
      }
    }
    for (double y : ys) rep.hoelder_psi = std::max(rep.hoelder_psi, std::abs(d2b(y) / db(y)));
  }
  rep.gamma_witness = std::max(phi_max, 1.0 / phi_min);

  if (sol.degenerate) {
    rep.degenerate = true;
    rep.unique = true;  // t(nu) is constant; the maximiser is the Bowen equilibrium state
    rep.t_lo = rep.t_hi = sol.t_star;
    return rep;
  }

  const TRange& tr = sol.t_range;
  rep.epsilon = opts.epsilon.value_or(0.05 * (tr.upper - tr.lower));
  rep.t_lo = tr.lower + rep.epsilon;
  rep.t_hi = tr.upper - rep.epsilon;
  rep.H_eps_ok = check_H_eps(sol, tr, rep.epsilon);
  if (!(rep.t_lo < rep.t_hi) || opts.grid < 1) {
    rep.max_d2P = kNaN;
    return rep;
  }

  const PhiFamily pf(sol.colloc, sol.D);
  const int n = opts.grid;
  rep.rows.resize(n);
  const double root_tol = std::max(1e-13, 0.01 * opts.solve.tol);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const double t = n == 1 ? 0.5 * (rep.t_lo + rep.t_hi)
                            : rep.t_lo + (rep.t_hi - rep.t_lo) * static_cast<double>(k) / (n - 1);
    const PressurePoint p = pressure_curve(pf, t, root_tol);
    rep.rows[k] = {p.t, p.P, p.dPdt, p.d2Pdt2, p.beta, p.beta_prime, p.rho};
  });

  rep.max_d2P = -kInf;
  for (const CurveRow& r : rep.rows) {
    rep.max_d2P = std::max(rep.max_d2P, r.d2Pdt2);
    rep.gamma_witness = std::max({rep.gamma_witness, std::abs(r.beta), std::abs(r.beta_prime)});
  }
  rep.concavity_ok = rep.max_d2P < -opts.tol;
  rep.unique = rep.concavity_ok && rep.H_eps_ok;
  return rep;
}

}  // namespace carpetdim
