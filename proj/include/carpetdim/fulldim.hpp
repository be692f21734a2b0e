// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_FULLDIM_HPP
#define CARPETDIM_FULLDIM_HPP

#include <memory>
#include <optional>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/coding.hpp"
#include "carpetdim/transfer.hpp"

namespace carpetdim {

/// Pointwise values of log A(i, z; t) = log sum_j |a~_ij(z)|^t and its first
/// two t-derivatives.
struct AValues {
  double log_A = 0.0;
  double dlog_A = 0.0;   // sum_j w_j log|a~_ij|
  double d2log_A = 0.0;  // Var_w(log|a~_ij|)
};

/// The fibre-sum family t -> A_{-t phi}.  Closed form for class-L carpets.
struct AFamily {
  CarpetSpec spec;

  AValues evaluate(int row, double z, double t) const;
  double A(int row, double z, double t) const;
  /// w_j = |a~_row,j(z)|^t / A(row, z; t).
  std::vector<double> weights(int row, double z, double t) const;

  struct Tabulated {
    Observable log_A, dlog_A, d2log_A;
  };
  Tabulated tabulate(const Collocation& colloc, double t) const;

  /// True when every a~ is constant and all rows carry the same multiset of
  /// slopes, so log A is one constant per t.
  bool log_A_constant() const;
};

AFamily a_family(const CarpetSpec& spec);

std::vector<double> fiber_weights(const AFamily& af, double t, int row, double z);

/// psi(i, z) = -log|b_i'(z)|.
Observable psi_observable(const Collocation& colloc);

/// Phi_t = (t - D) psi + beta log A_{-t phi}, for a fixed candidate D.
class PhiFamily {
 public:
  PhiFamily(std::shared_ptr<const Collocation> colloc, double D);

  double D() const { return D_; }
  const Collocation& collocation() const { return *colloc_; }
  const std::shared_ptr<const Collocation>& collocation_ptr() const { return colloc_; }
  const AFamily& a_family() const { return af_; }
  const Observable& psi() const { return psi_; }

  Observable potential(double t, double beta, const Observable& log_A) const;

 private:
  std::shared_ptr<const Collocation> colloc_;
  double D_;
  AFamily af_;
  Observable psi_;
};

struct BetaSolution {
  double beta = 0.0;
  std::shared_ptr<const GibbsSystem> nu;
  double residual = 0.0;  // int log A dnu at the returned beta
  int evaluations = 0;
};

/// Solves int log A_{-t phi} dnu_{Phi_t} = 0 for beta.
BetaSolution beta_of_t(const PhiFamily& pf, double t, double tol = 1e-12,
                       std::optional<double> beta_hint = std::nullopt);

struct PressurePoint {
  double t = 0.0;
  double P = 0.0;
  double dPdt = 0.0;
  double d2Pdt2 = 0.0;
  double beta = 0.0;
  double beta_prime = 0.0;
  double rho = 0.0;
  double beta_residual = 0.0;
  std::shared_ptr<const GibbsSystem> nu;
};

PressurePoint pressure_curve(const PhiFamily& pf, double t, double tol = 1e-12,
                             std::optional<double> beta_hint = std::nullopt);

/// Root of t -> int log A_{-t phi} dnu.
double t_of_measure(const AFamily& af, const GibbsSystem& nu, double tol = 1e-13);

struct TRange {
  double lower = 0.0;        // min of t(nu) over periodic-orbit measures
  double upper = 0.0;        // max of t(nu) over periodic-orbit measures
  double outer_lower = 0.0;  // root of min_{i,z} log A, a lower bound of lower
  double outer_upper = 0.0;  // root of max_{i,z} log A, an upper bound of upper
  RowWord lower_word;
  RowWord upper_word;
  int max_period = 0;        // period actually scanned
};

/// Periodic orbits of period <= max_period; the scan shortens the period when
/// the word count would exceed 20000.
TRange t_range(const AFamily& af, int max_period = 8);

struct FullDimOptions {
  int K = 64;
  double tol = 1e-10;
  int max_period = 8;
  int max_outer = 80;
  int max_inner = 80;
};

struct FullDimDiagnostics {
  double P_at_star = 0.0;
  double dPdt_at_star = 0.0;
  double d2Pdt2_at_star = 0.0;
  double beta_residual = 0.0;
  double eigen_residual = 0.0;
  int outer_iterations = 0;
  int inner_evaluations = 0;
};

struct FullDimSolution {
  double D = 0.0;
  double t_star = 0.0;
  double beta_star = 0.0;  // NaN for a degenerate family
  double rho_star = 0.0;
  bool degenerate = false;
  std::shared_ptr<const Collocation> colloc;
  AFamily af;
  TRange t_range;
  std::shared_ptr<const GibbsSystem> nu;
  FullDimDiagnostics diagnostics;
};

FullDimSolution solve_full_dimension(const CarpetSpec& spec, const FullDimOptions& opts);
inline FullDimSolution solve_full_dimension(const CarpetSpec& spec, double tol = 1e-10) {
  FullDimOptions o;
  o.tol = tol;
  return solve_full_dimension(spec, o);
}

/// mu([word]) for the measure of full dimension.
double measure_cylinder(const FullDimSolution& sol, const FullWord& word, double tol = 1e-13);

/// D(mu) of the relative equilibrium state over nu at parameter t.
double dimension_of_measure(const AFamily& af, const GibbsSystem& nu, double t, double tol = 1e-13);
double dimension_of_measure(const FullDimSolution& sol, double tol = 1e-13);

bool check_H_eps(const FullDimSolution& sol, const TRange& range, double epsilon);

struct CurveRow {
  double t, P, dPdt, d2Pdt2, beta, beta_prime, rho;
};

struct UniquenessReport {
  double D = 0.0;
  double t_star = 0.0;
  double epsilon = 0.0;
  double t_lo = 0.0;  // certified interval [t_lo, t_hi]
  double t_hi = 0.0;
  TRange t_range;
  std::vector<CurveRow> rows;
  double max_d2P = 0.0;
  bool concavity_ok = false;
  bool H_eps_ok = false;
  bool unique = false;
  bool degenerate = false;
  double gamma_witness = 0.0;  // max(sup phi, 1/inf phi, |beta|, |beta'|) over the grid
  double hoelder_phi = 0.0;    // max |d/dz log|a~||
  double hoelder_psi = 0.0;    // max |d/dz log|b'||
};

struct UniquenessOptions {
  std::optional<double> epsilon;  // default 0.05 (upper - lower)
  int grid = 50;
  double tol = 1e-8;
  FullDimOptions solve;
};

UniquenessReport uniqueness_certificate(const CarpetSpec& spec, const UniquenessOptions& opts = {});
/// Certificate for an already solved carpet; opts.solve is ignored.
UniquenessReport uniqueness_certificate(const FullDimSolution& sol, const UniquenessOptions& opts = {});

}  // namespace carpetdim

#endif  // CARPETDIM_FULLDIM_HPP
