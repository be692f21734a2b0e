// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_OBSERVABLE_HPP
#define CARPETDIM_OBSERVABLE_HPP

#include <memory>

#include <Eigen/Dense>

#include "carpetdim/chebyshev.hpp"

namespace carpetdim {

/// Function on the row shift of the form y = (i1 i2 ...) -> F(i1, z), where z
/// is the tail coordinate of (i2 i3 ...).  Each of the m components F(i, .) is
/// stored by its values at the Chebyshev nodes; values are stacked
/// component-major, index i*K + k.
class Observable {
 public:
  static constexpr int kMinNodes = 8;

  Observable(std::shared_ptr<const ChebyshevGrid> grid, int components);

  template <class F>
  static Observable tabulate(std::shared_ptr<const ChebyshevGrid> grid, int components, F&& f) {
    Observable o(std::move(grid), components);
    const int K = o.nodes();
    for (int i = 0; i < components; ++i)
      for (int k = 0; k < K; ++k) o.values_[i * K + k] = f(i, o.grid_->node(k));
    return o;
  }

  static Observable constant(std::shared_ptr<const ChebyshevGrid> grid, int components, double c);
  /// 1 on the cylinder [row], 0 elsewhere.
  static Observable indicator(std::shared_ptr<const ChebyshevGrid> grid, int components, int row);

  int components() const { return components_; }
  int nodes() const { return grid_->size(); }
  const ChebyshevGrid& grid() const { return *grid_; }
  const std::shared_ptr<const ChebyshevGrid>& grid_ptr() const { return grid_; }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  auto component(int i) { return values_.segment(i * nodes(), nodes()); }
  auto component(int i) const { return values_.segment(i * nodes(), nodes()); }

  /// Interpolated value F(i, z).
  double operator()(int i, double z) const;
  double sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

  Observable& operator+=(const Observable& o);
  Observable& operator-=(const Observable& o);
  Observable& operator*=(double s);
  Observable& operator+=(double c);

 private:
  std::shared_ptr<const ChebyshevGrid> grid_;
  int components_;
  Eigen::VectorXd values_;
};

Observable operator+(Observable a, const Observable& b);
Observable operator-(Observable a, const Observable& b);
Observable operator*(double s, Observable a);
Observable operator+(Observable a, double c);
/// Pointwise product; products of observables are observables.
Observable product(const Observable& a, const Observable& b);

}  // namespace carpetdim

#endif  // CARPETDIM_OBSERVABLE_HPP
