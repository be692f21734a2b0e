// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/poly.hpp"

#include <algorithm>
#include <cmath>

#include "carpetdim/error.hpp"

namespace carpetdim {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedSpec: return "MalformedSpec";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InfeasibleLayout: return "InfeasibleLayout";
    case ErrorKind::PerturbationTooLarge: return "PerturbationTooLarge";
    case ErrorKind::TooDeep: return "TooDeep";
    case ErrorKind::DegenerateFamily: return "DegenerateFamily";
    case ErrorKind::NonContractive: return "NonContractive";
    case ErrorKind::NonPrimitive: return "NonPrimitive";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NoRootInUnitInterval: return "NoRootInUnitInterval";
    case ErrorKind::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedSpec:
    case ErrorKind::ParseError:
    case ErrorKind::IoError:
      return 3;
    case ErrorKind::InfeasibleLayout:
    case ErrorKind::PerturbationTooLarge:
    case ErrorKind::TooDeep:
    case ErrorKind::DegenerateFamily:
      return 1;
    default:
      return 2;
  }
}

Poly::Poly(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

Poly::Poly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void Poly::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Poly::operator()(double y) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * y + *it;
  return acc;
}

bool Poly::is_constant() const { return coeffs_.size() == 1; }

Poly Poly::derivative() const {
  if (coeffs_.size() == 1) return Poly::constant(0.0);
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Poly(std::move(d));
}

std::vector<double> Poly::bernstein() const {
  // b_k = sum_{j<=k} C(k,j)/C(d,j) c_j
  const int d = degree();
  std::vector<double> b(d + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    double ckj = 1.0;  // C(k, j)
    double cdj = 1.0;  // C(d, j)
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      acc += ckj / cdj * coeffs_[j];
      ckj = ckj * (k - j) / (j + 1);
      cdj = cdj * (d - j) / (j + 1);
    }
    b[k] = acc;
  }
  return b;
}

Poly Poly::from_bernstein(const std::vector<double>& b) {
  // B_{k,d}(y) = C(d,k) y^k (1-y)^{d-k} expanded in monomials.
  const int d = static_cast<int>(b.size()) - 1;
  std::vector<double> c(d + 1, 0.0);
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
  };
  for (int k = 0; k <= d; ++k) {
    const double ck = binom(d, k) * b[k];
    for (int i = 0; i <= d - k; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      c[k + i] += ck * sign * binom(d - k, i);
    }
  }
  return Poly(std::move(c));
}

double Poly::sup_bound() const {
  const auto b = bernstein();
  double m = 0.0;
  for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
  return Poly(std::move(c));
}

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Poly(std::move(c));
}

Poly operator*(double s, const Poly& p) {
  std::vector<double> c = p.coeffs_;
  for (double& v : c) v *= s;
  return Poly(std::move(c));
}

double coeff_distance(const Poly& a, const Poly& b) {
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  double d = 0.0;
  for (std::size_t k = 0; k < std::max(ca.size(), cb.size()); ++k) {
    const double x = k < ca.size() ? ca[k] : 0.0;
    const double y = k < cb.size() ? cb[k] : 0.0;
    d = std::max(d, std::abs(x - y));
  }
  return d;
}

}  // namespace carpetdim
