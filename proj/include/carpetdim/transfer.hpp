// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_TRANSFER_HPP
#define CARPETDIM_TRANSFER_HPP

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "carpetdim/carpet.hpp"
#include "carpetdim/coding.hpp"
#include "carpetdim/observable.hpp"

namespace carpetdim {

/// Carpet-dependent part of the discretised transfer operator: for each row j
/// the K x K matrix taking node values of F to node values of z -> F(b_j(z)).
class Collocation {
 public:
  Collocation(CarpetSpec spec, int K);

  static std::shared_ptr<const Collocation> make(const CarpetSpec& spec, int K = 64);

  const CarpetSpec& spec() const { return spec_; }
  int components() const { return spec_.row_count(); }
  int nodes() const { return grid_->size(); }
  const std::shared_ptr<const ChebyshevGrid>& grid_ptr() const { return grid_; }
  const Eigen::MatrixXd& pullback(int j) const { return pullback_[j]; }

  Observable constant(double c) const { return Observable::constant(grid_, components(), c); }

  template <class F>
  Observable tabulate(F&& f) const {
    return Observable::tabulate(grid_, components(), std::forward<F>(f));
  }

 private:
  CarpetSpec spec_;
  std::shared_ptr<const ChebyshevGrid> grid_;
  std::vector<Eigen::MatrixXd> pullback_;
};

enum class EigenMethod {
  Power,  // power iteration on L and L^T; falls back to Dense on stagnation
  Dense,  // full eigendecomposition
};

/// Collocation matrix of (L f)(j, z) = sum_i exp(g(i, b_j(z))) F(i, b_j(z)),
/// its Perron eigen-data and the Gibbs state it defines.  Immutable.
class GibbsSystem {
 public:
  double pressure() const { return pressure_; }
  double eigenvalue() const { return eigenvalue_; }
  const Observable& potential() const { return potential_; }
  /// Positive eigenfunction, max-normalised.
  const Observable& right_eigen() const { return right_; }
  /// Eigenfunctional as node weights, scaled so that left . right = 1.
  const Eigen::VectorXd& left_eigen() const { return left_; }
  /// Node weights of the Gibbs state: left (*) right, summing to one.
  const Eigen::VectorXd& measure_weights() const { return weights_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// exp(-P) R^-1 L R with R = diag(right eigenfunction).
  const Eigen::MatrixXd& normalized_matrix() const { return normalized_; }
  double eigen_residual() const { return residual_; }

  const Collocation& collocation() const { return *colloc_; }
  const std::shared_ptr<const Collocation>& collocation_ptr() const { return colloc_; }
  int components() const { return colloc_->components(); }

  Observable transfer(const Observable& f) const;
  Observable normalized_transfer(const Observable& f) const;

 private:
  friend GibbsSystem build_operator(std::shared_ptr<const Collocation>, const Observable&,
                                    EigenMethod);
  GibbsSystem(std::shared_ptr<const Collocation> c, Observable potential)
      : colloc_(std::move(c)), potential_(std::move(potential)), right_(potential_) {}

  std::shared_ptr<const Collocation> colloc_;
  Observable potential_;
  Observable right_;
  Eigen::VectorXd left_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd normalized_;
  double eigenvalue_ = 0.0;
  double pressure_ = 0.0;
  double residual_ = 0.0;
};

GibbsSystem build_operator(std::shared_ptr<const Collocation> colloc, const Observable& potential,
                           EigenMethod method = EigenMethod::Power);
/// Convenience overload; K must match the potential's grid.
GibbsSystem build_operator(const CarpetSpec& spec, const Observable& potential, int K);

/// Integral against the Gibbs state, obtained by iterating the normalised
/// operator until the iterate is constant to within tol * max(1, |h|_inf).
double expectation(const GibbsSystem& sys, const Observable& h, double tol = 1e-13);

/// h = P(g) - int g dnu.
double entropy(const GibbsSystem& sys, double tol = 1e-13);

/// Weight along a branch: factor(k, row_k, zeta_k) multiplies the k-th step,
/// zeta_k being the tail coordinate after the k-th symbol.
using BranchFactor = std::function<double(std::size_t k, int row, double zeta)>;

/// The single-branch function z -> (L^n (1_[word] * prod factor))(j, z) of the
/// normalised operator.  Its expectation is the weighted cylinder mass.
Observable cylinder_branch(const GibbsSystem& sys, const RowWord& word,
                           const BranchFactor& factor = nullptr);

double cylinder_mass(const GibbsSystem& sys, const RowWord& word, double tol = 1e-13);

/// Two-sided correlation sum  sum_{n in Z} Cov(h1 o S^n, h2), evaluated as
/// int h1 sum_{n>=0} Lhat^n h2~ dnu + int h2 sum_{n>=1} Lhat^n h1~ dnu.
/// Equals d/ds int h2 dnu_{g + s h1}; Q(h, h) is the second derivative of pressure.
double correlation_form(const GibbsSystem& sys, const Observable& h1, const Observable& h2,
                        double tol = 1e-13);

}  // namespace carpetdim

#endif  // CARPETDIM_TRANSFER_HPP
