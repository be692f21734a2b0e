// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_POLY_HPP
#define CARPETDIM_POLY_HPP

#include <initializer_list>
#include <vector>

namespace carpetdim {

/// Real polynomial c0 + c1 y + ... + cd y^d on [0,1].
class Poly {
 public:
  static constexpr int kMaxDegree = 16;

  Poly() : coeffs_{0.0} {}
  Poly(std::initializer_list<double> coeffs);
  explicit Poly(std::vector<double> coeffs);

  static Poly constant(double c) { return Poly({c}); }
  static Poly linear(double c0, double c1) { return Poly({c0, c1}); }

  /// Horner evaluation.
  double operator()(double y) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  bool is_constant() const;

  Poly derivative() const;

  /// Upper bound for max_{[0,1]} |p| from the Bernstein coefficients
  /// (convex-hull property).  Exact for constants and monotone linears.
  double sup_bound() const;

  /// Coefficients of p in the degree-d Bernstein basis on [0,1].
  std::vector<double> bernstein() const;
  static Poly from_bernstein(const std::vector<double>& b);

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& p);

  bool operator==(const Poly& other) const = default;

 private:
  std::vector<double> coeffs_;
  void trim();
};

/// Largest |coefficient| difference, padding the shorter polynomial with zeros.
double coeff_distance(const Poly& a, const Poly& b);

}  // namespace carpetdim

#endif  // CARPETDIM_POLY_HPP
