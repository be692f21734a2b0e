// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_CODING_HPP
#define CARPETDIM_CODING_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carpetdim/carpet.hpp"

namespace carpetdim {

/// Finite word over the row alphabet {0..m-1}.
struct RowWord {
  std::vector<int> symbols;

  std::size_t size() const { return symbols.size(); }
  int operator[](std::size_t k) const { return symbols[k]; }
  bool operator==(const RowWord&) const = default;
};

struct Letter {
  int row = 0;
  int col = 0;
  bool operator==(const Letter&) const = default;
};

/// Finite word over the carpet alphabet {(i, j)}.
struct FullWord {
  std::vector<Letter> symbols;

  std::size_t size() const { return symbols.size(); }
  const Letter& operator[](std::size_t k) const { return symbols[k]; }
  RowWord rows() const;
  bool operator==(const FullWord&) const = default;
};

/// Point of the {b_i}-attractor coded by a word, repeated cyclically.
struct TailCoordinate {
  double z = 0.0;
  double error_bound = 0.0;
  int depth = 0;
};

/// Max over [0,1] of |b_i'| for all rows (Bernstein bound).
double fibre_contraction(const CarpetSpec& spec);

/// b_{w1} o ... o b_{wN}(1/2) for the cyclic extension of `word`, with N large
/// enough that the truncation error is at most `tol`.
TailCoordinate tail_coordinate(const CarpetSpec& spec, const RowWord& word, int depth, double tol);

struct CompositionBounds {
  double alpha = 0.0;  // max |d_x a_ij| of the composed map
  double beta = 0.0;   // max |b_i'| of the composed fibre map
};

/// Certified upper bounds for the composed derivatives along a full word.
CompositionBounds composition_bounds(const CarpetSpec& spec, const FullWord& word,
                                     int grid_points = 513);

/// b_{w1} o ... o b_{wn}([0,1]).
std::pair<double, double> cylinder_interval(const CarpetSpec& spec, const RowWord& word);

/// All words of length n over the row alphabet, lexicographic.
std::vector<RowWord> all_row_words(int m, int n);
/// All full words of length n, lexicographic in (i, j).
std::vector<FullWord> all_full_words(const CarpetSpec& spec, int n);
/// Full words of length n lying over the given row word.
std::vector<FullWord> full_words_over(const CarpetSpec& spec, const RowWord& rows);

// Textual forms use one-based indices: "1 2" and "1.1 2.2".
RowWord parse_row_word(std::string_view text);
FullWord parse_full_word(std::string_view text);
std::string format_word(const RowWord& w);
std::string format_word(const FullWord& w);

}  // namespace carpetdim

#endif  // CARPETDIM_CODING_HPP
