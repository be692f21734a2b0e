// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_CHEBYSHEV_HPP
#define CARPETDIM_CHEBYSHEV_HPP

#include <memory>

#include <Eigen/Dense>

namespace carpetdim {

/// Chebyshev points of the second kind mapped to [0,1] (ascending) with their
/// barycentric weights.
class ChebyshevGrid {
 public:
  explicit ChebyshevGrid(int K);

  /// Process-wide cache keyed by K.
  static std::shared_ptr<const ChebyshevGrid> shared(int K);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  double node(int k) const { return nodes_[k]; }

  /// Barycentric interpolant of `values` (one per node) at z.
  double interpolate(const Eigen::Ref<const Eigen::VectorXd>& values, double z) const;

  /// Lagrange basis values l_0(z) .. l_{K-1}(z).
  Eigen::RowVectorXd basis_row(double z) const;

  /// Rows: basis_row(points[r]).
  Eigen::MatrixXd interpolation_matrix(const Eigen::Ref<const Eigen::VectorXd>& points) const;

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

}  // namespace carpetdim

#endif  // CARPETDIM_CHEBYSHEV_HPP
