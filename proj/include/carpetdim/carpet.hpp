// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_CARPET_HPP
#define CARPETDIM_CARPET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "carpetdim/poly.hpp"

namespace carpetdim {

/// One column map x -> a_tilde(y) x + u(y) of a row.
struct CellSpec {
  Poly a_tilde;
  Poly u;
  bool operator==(const CellSpec&) const = default;
};

/// A row of the carpet: the fibre map b_i and its column maps.
struct RowSpec {
  Poly b;
  std::vector<CellSpec> cells;
  bool operator==(const RowSpec&) const = default;
};

/// Skew-product IFS f_ij(x, y) = (a_tilde_ij(y) x + u_ij(y), b_i(y)).
/// Row and column indices are zero-based in code and one-based in files.
struct CarpetSpec {
  std::vector<RowSpec> rows;

  int row_count() const { return static_cast<int>(rows.size()); }
  int cell_count(int i) const { return static_cast<int>(rows[i].cells.size()); }
  int alphabet_size() const;

  const Poly& b(int i) const { return rows[i].b; }
  const Poly& a_tilde(int i, int j) const { return rows[i].cells[j].a_tilde; }
  const Poly& u(int i, int j) const { return rows[i].cells[j].u; }

  bool operator==(const CarpetSpec&) const = default;
};

struct Violation {
  std::string hypothesis;  // "structure", "H2", "H3", "H4"
  int row = -1;            // zero-based, -1 when not row specific
  int cell = -1;
  double y = 0.0;          // witness
  double margin = 0.0;     // signed margin after slack (negative = violated)
  std::string detail;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;

  std::string to_string() const;
};

/// Grid + Lipschitz-slack check of (H2)-(H4) and the structural requirements.
/// Throws MalformedSpec for unusable input (no rows, an empty row,
/// non-finite coefficients, degree above Poly::kMaxDegree).
ValidationReport validate_carpet(const CarpetSpec& spec, int grid_points = 2001);

/// Throws MalformedSpec on structural defects only; no hypothesis checks.
void check_well_formed(const CarpetSpec& spec);

struct DominationConstants {
  double lambda = 0.0;
  double C = 0.0;
};

/// Certified upper bounds of lambda = max |a~|/|b'| and
/// C = (1 - lambda)^-1 max |d_y a| / |b'|.
DominationConstants domination_constants(const CarpetSpec& spec, int grid_points = 2001);

enum class LayoutRule {
  /// Leftover length split evenly over all m+1 gaps (outer margins included).
  EvenGaps,
};

/// General Sierpinski carpet with constant slopes a < b.
CarpetSpec make_sierpinski(double a, double b, const std::vector<int>& m_list,
                           LayoutRule layout = LayoutRule::EvenGaps);

struct PerturbedCarpet {
  CarpetSpec spec;
  double hoelder_proxy = 0.0;    // max |d/dy log|a~_ij||
  double coeff_distance = 0.0;   // max coefficient change against the input
  int attempts = 0;
};

/// a~ -> a~ (1 + eps q), u -> u + eps s r with seeded random q, r, |q|,|r| <= 1
/// on [0,1].  The offset perturbation is scaled by half the row clearance so it
/// alone never closes a gap; draws that break (H2)-(H4) are redrawn up to
/// eight times before PerturbationTooLarge.
PerturbedCarpet perturb_carpet(const CarpetSpec& spec, double epsilon, std::uint64_t seed);

/// Uniform grid on [0,1] with n >= 2 points.
std::vector<double> unit_grid(int n);

}  // namespace carpetdim

#endif  // CARPETDIM_CARPET_HPP
