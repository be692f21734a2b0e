// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/coding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "carpetdim/error.hpp"

namespace carpetdim {

RowWord FullWord::rows() const {
  RowWord w;
  for (const auto& l : symbols) w.symbols.push_back(l.row);
  return w;
}

double fibre_contraction(const CarpetSpec& spec) {
  double c = 0.0;
  for (int i = 0; i < spec.row_count(); ++i) c = std::max(c, spec.b(i).derivative().sup_bound());
  return c;
}

TailCoordinate tail_coordinate(const CarpetSpec& spec, const RowWord& word, int depth, double tol) {
  if (word.size() == 0) throw Error(ErrorKind::MalformedSpec, "empty word");
  const double c = fibre_contraction(spec);
  if (!(c < 1.0)) throw Error(ErrorKind::NonContractive, "max |b_i'| >= 1");
  int n = std::max<int>(depth, static_cast<int>(word.size()));
  if (c > 0.0 && tol > 0.0) {
    const double need = std::ceil(std::log(2.0 * tol) / std::log(c));
    if (need > n) n = static_cast<int>(std::min(need, 1e6));
  }
  double y = 0.5;
  for (int k = n - 1; k >= 0; --k) y = spec.b(word[static_cast<std::size_t>(k) % word.size()])(y);
  return {y, 0.5 * std::pow(c, n), n};
}

CompositionBounds composition_bounds(const CarpetSpec& spec, const FullWord& word, int grid_points) {
  const std::size_t n = word.size();
  if (n == 0) throw Error(ErrorKind::MalformedSpec, "empty word");
  std::vector<double> a_sup(n), a_lip(n), b_sup(n), b_lip(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [i, j] = word[k];
    const Poly& a = spec.a_tilde(i, j);
    const Poly db = spec.b(i).derivative();
    a_sup[k] = a.sup_bound();
    a_lip[k] = a.derivative().sup_bound();
    b_sup[k] = db.sup_bound();
    b_lip[k] = db.derivative().sup_bound();
  }
  // Lipschitz constants of y -> prod_k |g_k(y_k)| with |dy_k/dy| <= prod_{l>k} b_sup[l].
  auto product_lip = [&](const std::vector<double>& sup, const std::vector<double>& lip) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double term = lip[k];
      for (std::size_t l = 0; l < n; ++l)
        if (l != k) term *= sup[l];
      for (std::size_t l = k + 1; l < n; ++l) term *= b_sup[l];
      total += term;
    }
    return total;
  };
  const double h = 1.0 / (grid_points - 1);
  double alpha = 0.0, beta = 0.0;
  std::vector<double> yk(n);
  for (double y : unit_grid(grid_points)) {
    // y_n = y, y_k = b_{i_{k+1}}(y_{k+1}) (zero-based: y_{n-1} = y).
    yk[n - 1] = y;
    for (std::size_t k = n - 1; k-- > 0;) yk[k] = spec.b(word[k + 1].row)(yk[k + 1]);
    double pa = 1.0, pb = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      pa *= std::abs(spec.a_tilde(word[k].row, word[k].col)(yk[k]));
      pb *= std::abs(spec.b(word[k].row).derivative()(yk[k]));
    }
    alpha = std::max(alpha, pa);
    beta = std::max(beta, pb);
  }
  return {alpha + product_lip(a_sup, a_lip) * h, beta + product_lip(b_sup, b_lip) * h};
}

std::pair<double, double> cylinder_interval(const CarpetSpec& spec, const RowWord& word) {
  if (word.size() == 0) throw Error(ErrorKind::MalformedSpec, "empty word");
  double lo = 0.0, hi = 1.0;
  for (std::size_t k = word.size(); k-- > 0;) {
    const Poly& b = spec.b(word[k]);
    const double x = b(lo), y = b(hi);
    lo = std::min(x, y);
    hi = std::max(x, y);
  }
  return {lo, hi};
}

std::vector<RowWord> all_row_words(int m, int n) {
  std::vector<RowWord> out;
  std::vector<int> cur(n, 0);
  while (true) {
    out.push_back({cur});
    int k = n - 1;
    while (k >= 0 && cur[k] == m - 1) cur[k--] = 0;
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

std::vector<FullWord> full_words_over(const CarpetSpec& spec, const RowWord& rows) {
  std::vector<FullWord> out;
  const std::size_t n = rows.size();
  std::vector<int> cur(n, 0);
  while (true) {
    FullWord w;
    for (std::size_t k = 0; k < n; ++k) w.symbols.push_back({rows[k], cur[k]});
    out.push_back(std::move(w));
    std::size_t k = n;
    while (k > 0 && cur[k - 1] == spec.cell_count(rows[k - 1]) - 1) cur[--k] = 0;
    if (k == 0) break;
    ++cur[k - 1];
  }
  return out;
}

std::vector<FullWord> all_full_words(const CarpetSpec& spec, int n) {
  std::vector<FullWord> out;
  for (const auto& r : all_row_words(spec.row_count(), n)) {
    auto fw = full_words_over(spec, r);
    out.insert(out.end(), fw.begin(), fw.end());
  }
  return out;
}

namespace {

int parse_one_based(std::string_view tok) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v < 1)
    throw Error(ErrorKind::ParseError, "bad word symbol '" + std::string(tok) + "'");
  return v - 1;
}

std::vector<std::string> tokens(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace

RowWord parse_row_word(std::string_view text) {
  RowWord w;
  for (const auto& t : tokens(text)) w.symbols.push_back(parse_one_based(t));
  if (w.size() == 0) throw Error(ErrorKind::ParseError, "empty word");
  return w;
}

FullWord parse_full_word(std::string_view text) {
  FullWord w;
  for (const auto& t : tokens(text)) {
    const auto dot = t.find('.');
    if (dot == std::string::npos) throw Error(ErrorKind::ParseError, "expected i.j in '" + t + "'");
    const std::string_view sv(t);
    w.symbols.push_back({parse_one_based(sv.substr(0, dot)), parse_one_based(sv.substr(dot + 1))});
  }
  if (w.size() == 0) throw Error(ErrorKind::ParseError, "empty word");
  return w;
}

std::string format_word(const RowWord& w) {
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(w[k] + 1);
  }
  return s;
}

std::string format_word(const FullWord& w) {
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(w[k].row + 1) + "." + std::to_string(w[k].col + 1);
  }
  return s;
}

}  // namespace carpetdim
