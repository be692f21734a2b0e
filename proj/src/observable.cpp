// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/observable.hpp"

#include "carpetdim/error.hpp"

namespace carpetdim {

Observable::Observable(std::shared_ptr<const ChebyshevGrid> grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (!grid_ || grid_->size() < kMinNodes)
    throw Error(ErrorKind::MalformedSpec, "observables need at least 8 collocation nodes");
  if (components_ < 1) throw Error(ErrorKind::MalformedSpec, "observable needs a component");
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(components_) * grid_->size());
}

Observable Observable::constant(std::shared_ptr<const ChebyshevGrid> grid, int components, double c) {
  Observable o(std::move(grid), components);
  o.values_.setConstant(c);
  return o;
}

Observable Observable::indicator(std::shared_ptr<const ChebyshevGrid> grid, int components, int row) {
  Observable o(std::move(grid), components);
  o.component(row).setOnes();
  return o;
}

double Observable::operator()(int i, double z) const { return grid_->interpolate(component(i), z); }

Observable& Observable::operator+=(const Observable& o) {
  values_ += o.values_;
  return *this;
}

Observable& Observable::operator-=(const Observable& o) {
  values_ -= o.values_;
  return *this;
}

Observable& Observable::operator*=(double s) {
  values_ *= s;
  return *this;
}

Observable& Observable::operator+=(double c) {
  values_.array() += c;
  return *this;
}

Observable operator+(Observable a, const Observable& b) { return a += b; }
Observable operator-(Observable a, const Observable& b) { return a -= b; }
Observable operator*(double s, Observable a) { return a *= s; }
Observable operator+(Observable a, double c) { return a += c; }

Observable product(const Observable& a, const Observable& b) {
  Observable out = a;
  out.values() = a.values().cwiseProduct(b.values());
  return out;
}

}  // namespace carpetdim
