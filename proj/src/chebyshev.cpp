// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/chebyshev.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "carpetdim/error.hpp"

namespace carpetdim {

ChebyshevGrid::ChebyshevGrid(int K) : nodes_(K), weights_(K) {
  if (K < 2) throw Error(ErrorKind::MalformedSpec, "Chebyshev grid needs K >= 2");
  for (int k = 0; k < K; ++k) {
    nodes_[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * k / (K - 1)));
    weights_[k] = (k % 2 == 0) ? 1.0 : -1.0;
  }
  // Exact endpoints keep b_i(0), b_i(1) evaluations on the nodes.
  nodes_[0] = 0.0;
  nodes_[K - 1] = 1.0;
  weights_[0] *= 0.5;
  weights_[K - 1] *= 0.5;
}

std::shared_ptr<const ChebyshevGrid> ChebyshevGrid::shared(int K) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const ChebyshevGrid>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[K];
  if (!slot) slot = std::make_shared<const ChebyshevGrid>(K);
  return slot;
}

double ChebyshevGrid::interpolate(const Eigen::Ref<const Eigen::VectorXd>& values, double z) const {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < size(); ++k) {
    const double d = z - nodes_[k];
    if (d == 0.0) return values[k];
    const double q = weights_[k] / d;
    num += q * values[k];
    den += q;
  }
  return num / den;
}

Eigen::RowVectorXd ChebyshevGrid::basis_row(double z) const {
  Eigen::RowVectorXd row(size());
  double den = 0.0;
  for (int k = 0; k < size(); ++k) {
    const double d = z - nodes_[k];
    if (d == 0.0) {
      row.setZero();
      row[k] = 1.0;
      return row;
    }
    row[k] = weights_[k] / d;
    den += row[k];
  }
  return row / den;
}

Eigen::MatrixXd ChebyshevGrid::interpolation_matrix(
    const Eigen::Ref<const Eigen::VectorXd>& points) const {
  Eigen::MatrixXd E(points.size(), size());
  for (Eigen::Index r = 0; r < points.size(); ++r) E.row(r) = basis_row(points[r]);
  return E;
}

}  // namespace carpetdim
