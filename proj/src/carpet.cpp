// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "carpetdim/error.hpp"

namespace carpetdim {

namespace {

constexpr double kContainTol = 1e-12;

bool finite_poly(const Poly& p) {
  return std::all_of(p.coeffs().begin(), p.coeffs().end(),
                     [](double c) { return std::isfinite(c); });
}

// Tracks the worst (smallest) margin of one hypothesis instance over the grid.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double y = 0.0;
  void update(double m, double at) {
    if (m < margin) {
      margin = m;
      y = at;
    }
  }
};

struct Interval {
  double lo, hi;
};

Interval cell_image(const CellSpec& c, double y) {
  const double a = c.a_tilde(y);
  const double u = c.u(y);
  return {u + std::min(0.0, a), u + std::max(0.0, a)};
}

}  // namespace

int CarpetSpec::alphabet_size() const {
  int n = 0;
  for (const auto& r : rows) n += static_cast<int>(r.cells.size());
  return n;
}

std::vector<double> unit_grid(int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = static_cast<double>(k) / (n - 1);
  return g;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << "\n";
  for (const auto& v : violations) {
    os << "  " << v.hypothesis;
    if (v.row >= 0) os << " row " << v.row + 1;
    if (v.cell >= 0) os << " cell " << v.cell + 1;
    os << " at y=" << v.y << " margin=" << v.margin << ": " << v.detail << "\n";
  }
  return os.str();
}

void check_well_formed(const CarpetSpec& spec) {
  if (spec.rows.empty()) throw Error(ErrorKind::MalformedSpec, "carpet has no rows");
  for (std::size_t i = 0; i < spec.rows.size(); ++i) {
    const auto& row = spec.rows[i];
    if (row.cells.empty())
      throw Error(ErrorKind::MalformedSpec, "row " + std::to_string(i + 1) + " has no cells");
    std::vector<const Poly*> polys{&row.b};
    for (const auto& c : row.cells) {
      polys.push_back(&c.a_tilde);
      polys.push_back(&c.u);
    }
    for (const Poly* p : polys) {
      if (!finite_poly(*p))
        throw Error(ErrorKind::MalformedSpec,
                    "non-finite coefficient in row " + std::to_string(i + 1));
      if (p->degree() > Poly::kMaxDegree)
        throw Error(ErrorKind::MalformedSpec,
                    "polynomial degree above 16 in row " + std::to_string(i + 1));
    }
  }
}

ValidationReport validate_carpet(const CarpetSpec& spec, int grid_points) {
  check_well_formed(spec);
  if (grid_points < 2) throw Error(ErrorKind::MalformedSpec, "grid_points must be >= 2");

  ValidationReport report;
  auto fail = [&](std::string hyp, int row, int cell, double y, double margin, std::string what) {
    report.pass = false;
    report.violations.push_back({std::move(hyp), row, cell, y, margin, std::move(what)});
  };

  const int m = spec.row_count();
  if (m < 2) fail("structure", -1, -1, 0.0, -1.0, "need at least two rows");
  bool fibre_ok = false;
  for (int i = 0; i < m; ++i) fibre_ok = fibre_ok || spec.cell_count(i) >= 2;
  if (!fibre_ok) fail("structure", -1, -1, 0.0, -1.0, "every row has a single cell");

  const auto ys = unit_grid(grid_points);
  const double h = 1.0 / (grid_points - 1);

  // (H2)
  std::vector<Interval> row_images;
  for (int i = 0; i < m; ++i) {
    const Poly db = spec.b(i).derivative();
    const double lip = db.derivative().sup_bound();
    Worst nonzero, below_one;
    const double sign0 = db(0.0) >= 0 ? 1.0 : -1.0;
    for (double y : ys) {
      const double d = db(y);
      nonzero.update(sign0 * d - lip * h, y);
      below_one.update(1.0 - std::abs(d) - lip * h, y);
    }
    if (!(nonzero.margin > 0))
      fail("H2", i, -1, nonzero.y, nonzero.margin, "b_i' vanishes or changes sign");
    if (!(below_one.margin > 0))
      fail("H2", i, -1, below_one.y, below_one.margin, "|b_i'| not < 1");
    const double b0 = spec.b(i)(0.0), b1 = spec.b(i)(1.0);
    const Interval img{std::min(b0, b1), std::max(b0, b1)};
    if (img.lo < -kContainTol || img.hi > 1.0 + kContainTol)
      fail("H2", i, -1, img.lo < 0 ? 0.0 : 1.0, std::min(img.lo, 1.0 - img.hi),
           "b_i([0,1]) not inside [0,1]");
    row_images.push_back(img);
  }
  {
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return row_images[a].lo < row_images[b].lo; });
    for (int k = 0; k + 1 < m; ++k) {
      const double gap = row_images[order[k + 1]].lo - row_images[order[k]].hi;
      if (!(gap > 0))
        fail("H2", order[k + 1], -1, 0.0, gap,
             "images of rows " + std::to_string(order[k] + 1) + " and " +
                 std::to_string(order[k + 1] + 1) + " are not disjoint");
    }
  }

  // (H3), (H4)
  for (int i = 0; i < m; ++i) {
    const int mi = spec.cell_count(i);
    const Poly db = spec.b(i).derivative();
    const double db_lip = db.derivative().sup_bound();
    std::vector<double> a_lip(mi), u_lip(mi);
    for (int j = 0; j < mi; ++j) {
      a_lip[j] = spec.a_tilde(i, j).derivative().sup_bound();
      u_lip[j] = spec.u(i, j).derivative().sup_bound();
    }
    for (int j = 0; j < mi; ++j) {
      const auto& cell = spec.rows[i].cells[j];
      const Poly& a = cell.a_tilde;
      const double sign0 = a(0.0) >= 0 ? 1.0 : -1.0;
      Worst nonzero, below_one, inside_lo, inside_hi, dominated;
      for (double y : ys) {
        const double av = a(y);
        nonzero.update(sign0 * av - a_lip[j] * h, y);
        below_one.update(1.0 - std::abs(av) - a_lip[j] * h, y);
        const Interval img = cell_image(cell, y);
        inside_lo.update(img.lo - (a_lip[j] + u_lip[j]) * h, y);
        inside_hi.update(1.0 - img.hi - (a_lip[j] + u_lip[j]) * h, y);
        dominated.update(std::abs(db(y)) - std::abs(av) - (db_lip + a_lip[j]) * h, y);
      }
      if (!(nonzero.margin > 0))
        fail("H3", i, j, nonzero.y, nonzero.margin, "a~_ij vanishes or changes sign");
      if (!(below_one.margin > 0))
        fail("H3", i, j, below_one.y, below_one.margin, "|a~_ij| not < 1");
      if (!(inside_lo.margin >= -kContainTol))
        fail("H3", i, j, inside_lo.y, inside_lo.margin, "cell image leaves [0,1] on the left");
      if (!(inside_hi.margin >= -kContainTol))
        fail("H3", i, j, inside_hi.y, inside_hi.margin, "cell image leaves [0,1] on the right");
      if (!(dominated.margin > 0))
        fail("H4", i, j, dominated.y, dominated.margin, "|a~_ij| not < |b_i'|");
    }
    if (mi >= 2) {
      // Pairwise disjointness: adjacent cells in x-order at each grid point.
      std::vector<std::vector<Worst>> gaps(mi, std::vector<Worst>(mi));
      std::vector<int> order(mi);
      for (double y : ys) {
        for (int j = 0; j < mi; ++j) order[j] = j;
        std::vector<Interval> img(mi);
        for (int j = 0; j < mi; ++j) img[j] = cell_image(spec.rows[i].cells[j], y);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return img[a].lo < img[b].lo; });
        for (int k = 0; k + 1 < mi; ++k) {
          const int l = order[k], r = order[k + 1];
          const double lip = a_lip[l] + u_lip[l] + a_lip[r] + u_lip[r];
          gaps[std::min(l, r)][std::max(l, r)].update(img[r].lo - img[l].hi - lip * h, y);
        }
      }
      for (int l = 0; l < mi; ++l)
        for (int r = l + 1; r < mi; ++r)
          if (!(gaps[l][r].margin > 0))
            fail("H3", i, r, gaps[l][r].y, gaps[l][r].margin,
                 "cells " + std::to_string(l + 1) + " and " + std::to_string(r + 1) +
                     " overlap");
    }
  }
  return report;
}

DominationConstants domination_constants(const CarpetSpec& spec, int grid_points) {
  check_well_formed(spec);
  const auto ys = unit_grid(grid_points);
  const double h = 1.0 / (grid_points - 1);
  double lambda = 0.0;
  double kappa = 0.0;  // max |d_y a| / |b'|
  for (int i = 0; i < spec.row_count(); ++i) {
    const Poly db = spec.b(i).derivative();
    const Poly ddb = db.derivative();
    const double db_sup = db.sup_bound();
    const double ddb_sup = ddb.sup_bound();
    const double db_lip = ddb_sup;
    double db_min = std::numeric_limits<double>::infinity();
    for (double y : ys) db_min = std::min(db_min, std::abs(db(y)));
    db_min -= db_lip * h;
    if (!(db_min > 0)) throw Error(ErrorKind::MalformedSpec, "b_i' vanishes; validate first");
    for (int j = 0; j < spec.cell_count(i); ++j) {
      const Poly& a = spec.a_tilde(i, j);
      const Poly da = a.derivative();
      const Poly du = spec.u(i, j).derivative();
      const Poly dy_at_one = da + du;  // d_y a at x = 1
      // Lipschitz bounds of the quotients f / |b'| via (f' g + f g') / g^2.
      const double lip_ratio =
          (da.sup_bound() * db_sup + a.sup_bound() * ddb_sup) / (db_min * db_min);
      const double lip_dy =
          (std::max(dy_at_one.derivative().sup_bound(), du.derivative().sup_bound()) * db_sup +
           std::max(dy_at_one.sup_bound(), du.sup_bound()) * ddb_sup) /
          (db_min * db_min);
      double ratio_max = 0.0, dy_max = 0.0;
      for (double y : ys) {
        const double g = std::abs(db(y));
        ratio_max = std::max(ratio_max, std::abs(a(y)) / g);
        dy_max = std::max(dy_max, std::max(std::abs(dy_at_one(y)), std::abs(du(y))) / g);
      }
      lambda = std::max(lambda, ratio_max + lip_ratio * h);
      kappa = std::max(kappa, dy_max + lip_dy * h);
    }
  }
  DominationConstants out;
  out.lambda = lambda;
  out.C = lambda < 1.0 ? kappa / (1.0 - lambda) : std::numeric_limits<double>::infinity();
  return out;
}

CarpetSpec make_sierpinski(double a, double b, const std::vector<int>& m_list,
                           LayoutRule /*layout*/) {
  if (!(0.0 < a && a < b && b < 1.0))
    throw Error(ErrorKind::InfeasibleLayout, "need 0 < a < b < 1");
  const int m = static_cast<int>(m_list.size());
  if (m < 2) throw Error(ErrorKind::InfeasibleLayout, "need at least two rows");
  int max_cells = 0;
  for (int mi : m_list) {
    if (mi < 1) throw Error(ErrorKind::InfeasibleLayout, "every row needs a cell");
    max_cells = std::max(max_cells, mi);
  }
  if (max_cells < 2) throw Error(ErrorKind::InfeasibleLayout, "some row needs two cells");
  if (!(m * b < 1.0)) throw Error(ErrorKind::InfeasibleLayout, "rows of height b do not fit");
  if (!(max_cells * a < 1.0))
    throw Error(ErrorKind::InfeasibleLayout, "cells of width a do not fit");

  CarpetSpec spec;
  const double row_gap = (1.0 - m * b) / (m + 1);
  for (int i = 0; i < m; ++i) {
    RowSpec row;
    row.b = Poly::linear(row_gap + i * (b + row_gap), b);
    const int mi = m_list[i];
    const double cell_gap = (1.0 - mi * a) / (mi + 1);
    for (int j = 0; j < mi; ++j)
      row.cells.push_back({Poly::constant(a), Poly::constant(cell_gap + j * (a + cell_gap))});
    spec.rows.push_back(std::move(row));
  }
  return spec;
}

namespace {

Poly random_unit_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> bern(degree + 1);
  for (double& c : bern) c = coef(rng);
  return Poly::from_bernstein(bern);
}

// Smallest gap between consecutive cell images (and the walls) of a row.
double row_clearance(const RowSpec& row, const std::vector<double>& ys) {
  double best = std::numeric_limits<double>::infinity();
  for (double y : ys) {
    std::vector<Interval> img;
    for (const auto& c : row.cells) img.push_back(cell_image(c, y));
    std::sort(img.begin(), img.end(), [](auto& l, auto& r) { return l.lo < r.lo; });
    best = std::min(best, img.front().lo);
    best = std::min(best, 1.0 - img.back().hi);
    for (std::size_t k = 0; k + 1 < img.size(); ++k) best = std::min(best, img[k + 1].lo - img[k].hi);
  }
  return std::max(best, 0.0);
}

double max_coeff_distance(const CarpetSpec& x, const CarpetSpec& y) {
  double d = 0.0;
  for (int i = 0; i < x.row_count(); ++i) {
    d = std::max(d, coeff_distance(x.b(i), y.b(i)));
    for (int j = 0; j < x.cell_count(i); ++j) {
      d = std::max(d, coeff_distance(x.a_tilde(i, j), y.a_tilde(i, j)));
      d = std::max(d, coeff_distance(x.u(i, j), y.u(i, j)));
    }
  }
  return d;
}

}  // namespace

PerturbedCarpet perturb_carpet(const CarpetSpec& spec, double epsilon, std::uint64_t seed) {
  check_well_formed(spec);
  constexpr int kDegree = 3;
  constexpr int kAttempts = 8;
  const auto ys = unit_grid(257);

  PerturbedCarpet out;
  if (epsilon == 0.0) {
    out.spec = spec;
  } else {
    std::vector<double> clearance;
    for (const auto& row : spec.rows) clearance.push_back(row_clearance(row, ys));
    bool ok = false;
    for (int attempt = 0; attempt < kAttempts && !ok; ++attempt) {
      std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(attempt));
      CarpetSpec trial = spec;
      for (int i = 0; i < trial.row_count(); ++i) {
        for (auto& cell : trial.rows[i].cells) {
          const Poly q = random_unit_poly(rng, kDegree);
          const Poly r = random_unit_poly(rng, kDegree);
          cell.a_tilde = cell.a_tilde * (Poly::constant(1.0) + epsilon * q);
          cell.u = cell.u + (epsilon * 0.5 * clearance[i]) * r;
        }
      }
      out.attempts = attempt + 1;
      bool well_formed = true;
      try {
        check_well_formed(trial);
      } catch (const Error&) {
        well_formed = false;
      }
      if (well_formed && validate_carpet(trial, 1025).pass) {
        out.spec = std::move(trial);
        ok = true;
      }
    }
    if (!ok)
      throw Error(ErrorKind::PerturbationTooLarge,
                  "no valid perturbation after " + std::to_string(kAttempts) + " attempts");
  }

  for (const auto& row : out.spec.rows)
    for (const auto& cell : row.cells) {
      const Poly da = cell.a_tilde.derivative();
      for (double y : ys)
        out.hoelder_proxy = std::max(out.hoelder_proxy, std::abs(da(y) / cell.a_tilde(y)));
    }
  out.coeff_distance = max_coeff_distance(spec, out.spec);
  return out;
}

}  // namespace carpetdim
