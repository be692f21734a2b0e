// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_VARIATIONAL_HPP
#define CARPETDIM_VARIATIONAL_HPP

#include <cstdint>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/coding.hpp"

namespace carpetdim {

/// Level-n data: certified maxima of the composed derivatives over all words of
/// length n, and a probability vector over row words.
struct LevelNProblem {
  int n = 0;
  int m = 0;
  std::vector<int> cells;                    // m_i
  std::vector<RowWord> row_words;            // lexicographic
  std::vector<double> beta;                  // beta_{i,n}, one per row word
  std::vector<std::vector<double>> alpha;    // alpha_{ij,n}, full words over row word i
  std::vector<double> p;                     // probability over row words
};

/// Largest row-word count accepted by make_level_n / optimize_level_n.
inline constexpr double kMaxLevelWords = 4096;

/// Builds the tables with uniform p.  TooDeep when m^n > 4096.
LevelNProblem make_level_n(const CarpetSpec& spec, int n, int grid_points = 513);

/// (sum p log p) / (sum p log beta), with 0 log 0 = 0.
double lambda_n(const LevelNProblem& prob);

/// Root in [0,1] of t -> sum_i p_i log(sum_j alpha_ij^t), by bisection.
double t_n_root(const LevelNProblem& prob, double tol = 1e-15);

/// p_i alpha_ij^t / sum_j' alpha_ij'^t at t = t_n(p).
double bernoulli_weights_level_n(const LevelNProblem& prob, const FullWord& word);

struct LevelNOptimum {
  double value = 0.0;
  std::vector<double> p_star;
  double t_star = 0.0;
  double lambda_star = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  double start_spread = 0.0;  // max - min of the values reached from all starts
};

/// Maximises lambda_n + t_n over the simplex by exponentiated-gradient ascent
/// from the uniform vector and five seeded random starts.
LevelNOptimum optimize_level_n(const CarpetSpec& spec, int n, double tol = 1e-10,
                               std::uint64_t seed = 0);
LevelNOptimum optimize_level_n(LevelNProblem prob, double tol = 1e-10, std::uint64_t seed = 0);

}  // namespace carpetdim

#endif  // CARPETDIM_VARIATIONAL_HPP
