// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "carpetdim/error.hpp"

namespace carpetdim {

namespace {

constexpr int kMaxIter = 200000;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// sum_i p_i log(sum_j alpha_ij^t)
double level_sum(const LevelNProblem& prob, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < prob.p.size(); ++i) {
    if (prob.p[i] == 0.0) continue;
    double acc = 0.0;
    for (double a : prob.alpha[i]) acc += std::pow(a, t);
    s += prob.p[i] * std::log(acc);
  }
  return s;
}

struct Evaluation {
  double value = 0.0;
  double t = 0.0;
  double lambda = 0.0;
  std::vector<double> grad;
};

Evaluation evaluate(const LevelNProblem& prob) {
  Evaluation e;
  e.t = t_n_root(prob);
  e.lambda = lambda_n(prob);
  e.value = e.lambda + e.t;

  const std::size_t W = prob.p.size();
  double N = 0.0, B = 0.0, denom = 0.0;
  std::vector<double> logS(W);
  for (std::size_t i = 0; i < W; ++i) {
    N += xlogx(prob.p[i]);
    B += prob.p[i] * std::log(prob.beta[i]);
    double S = 0.0, T = 0.0;
    for (double a : prob.alpha[i]) {
      const double at = std::pow(a, e.t);
      S += at;
      T += at * std::log(a);
    }
    logS[i] = std::log(S);
    denom += prob.p[i] * T / S;
  }
  e.grad.resize(W);
  for (std::size_t i = 0; i < W; ++i) {
    const double lp = prob.p[i] > 0.0 ? std::log(prob.p[i]) : -745.0;
    const double dlambda = ((lp + 1.0) * B - N * std::log(prob.beta[i])) / (B * B);
    const double dt = -logS[i] / denom;  // implicit differentiation of the t_n equation
    e.grad[i] = dlambda + dt;
  }
  return e;
}

// sqrt(sum_i p_i (g_i - gbar)^2), the gradient size seen by the simplex geometry.
double simplex_norm(const std::vector<double>& p, const std::vector<double>& g, double* gbar_out) {
  double gbar = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) gbar += p[i] * g[i];
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * (g[i] - gbar) * (g[i] - gbar);
  if (gbar_out) *gbar_out = gbar;
  return std::sqrt(s);
}

LevelNOptimum ascend(LevelNProblem prob, double tol) {
  Evaluation cur = evaluate(prob);
  double eta = 1.0;
  for (int it = 0; it < kMaxIter; ++it) {
    double gbar = 0.0;
    const double gn = simplex_norm(prob.p, cur.grad, &gbar);
    if (gn <= tol || eta < 1e-14) {
      LevelNOptimum out;
      out.value = cur.value;
      out.p_star = prob.p;
      out.t_star = cur.t;
      out.lambda_star = cur.lambda;
      out.gradient_norm = gn;
      out.iterations = it;
      return out;
    }
    LevelNProblem trial = prob;
    for (;;) {
      double Z = 0.0;
      for (std::size_t i = 0; i < prob.p.size(); ++i)
        Z += (trial.p[i] = prob.p[i] * std::exp(eta * (cur.grad[i] - gbar)));
      for (double& x : trial.p) x /= Z;
      Evaluation next = evaluate(trial);
      // Near the optimum value differences drop below rounding; there a step
      // counts as progress when it keeps the value and shrinks the gradient.
      const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.value);
      bool accept = next.value > cur.value + 1e-4 * eta * gn * gn;
      if (!accept && next.value >= cur.value - noise)
        accept = simplex_norm(trial.p, next.grad, nullptr) < gn;
      if (accept) {
        prob.p = std::move(trial.p);
        cur = std::move(next);
        eta = std::min(2.0 * eta, 1e3);
        break;
      }
      eta *= 0.5;
      if (eta < 1e-14) break;
    }
  }
  throw Error(ErrorKind::IterationLimit, "exponentiated-gradient ascent hit the iteration cap");
}

}  // namespace

LevelNProblem make_level_n(const CarpetSpec& spec, int n, int grid_points) {
  check_well_formed(spec);
  if (n < 1) throw Error(ErrorKind::MalformedSpec, "level n must be >= 1");
  const int m = spec.row_count();
  if (std::pow(static_cast<double>(m), n) > kMaxLevelWords)
    throw Error(ErrorKind::TooDeep, "m^n exceeds 4096 row words");
  LevelNProblem prob;
  prob.n = n;
  prob.m = m;
  prob.row_words = all_row_words(m, n);
  for (int i = 0; i < m; ++i) prob.cells.push_back(spec.cell_count(i));
  const std::size_t W = prob.row_words.size();
  prob.beta.resize(W);
  prob.alpha.resize(W);
  for (std::size_t i = 0; i < W; ++i) {
    const auto words = full_words_over(spec, prob.row_words[i]);
    for (const FullWord& fw : words) {
      const CompositionBounds cb = composition_bounds(spec, fw, grid_points);
      prob.alpha[i].push_back(cb.alpha);
      prob.beta[i] = cb.beta;  // depends on the row word only
    }
  }
  prob.p.assign(W, 1.0 / static_cast<double>(W));
  return prob;
}

double lambda_n(const LevelNProblem& prob) {
  double N = 0.0, B = 0.0;
  for (std::size_t i = 0; i < prob.p.size(); ++i) {
    N += xlogx(prob.p[i]);
    if (prob.p[i] > 0.0) B += prob.p[i] * std::log(prob.beta[i]);
  }
  if (B == 0.0) throw Error(ErrorKind::MalformedSpec, "lambda_n: p has no mass");
  return N / B;
}

double t_n_root(const LevelNProblem& prob, double tol) {
  double lo = 0.0, hi = 1.0;
  const double f0 = level_sum(prob, lo);
  if (f0 == 0.0) return 0.0;
  const double f1 = level_sum(prob, hi);
  if (f0 < 0.0 || f1 > 0.0)
    throw Error(ErrorKind::NoRootInUnitInterval, "level-n equation has no sign change on [0,1]");
  if (f1 == 0.0) return 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (level_sum(prob, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double bernoulli_weights_level_n(const LevelNProblem& prob, const FullWord& word) {
  if (static_cast<int>(word.size()) != prob.n)
    throw Error(ErrorKind::MalformedSpec, "word length differs from n");
  std::size_t i = 0, j = 0;
  for (const Letter& l : word.symbols) {
    if (l.row < 0 || l.row >= prob.m || l.col < 0 || l.col >= prob.cells[l.row])
      throw Error(ErrorKind::MalformedSpec, "word letter out of range");
    i = i * prob.m + l.row;
    j = j * prob.cells[l.row] + l.col;  // full words are listed in mixed radix
  }
  const double t = t_n_root(prob);
  double S = 0.0;
  for (double a : prob.alpha[i]) S += std::pow(a, t);
  return prob.p[i] * std::pow(prob.alpha[i][j], t) / S;
}

LevelNOptimum optimize_level_n(LevelNProblem prob, double tol, std::uint64_t seed) {
  const std::size_t W = prob.p.size();
  std::vector<std::vector<double>> starts;
  starts.emplace_back(W, 1.0 / static_cast<double>(W));
  for (int s = 0; s < 5; ++s) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(s) + 1);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(W);
    double Z = 0.0;
    for (double& x : p) Z += (x = expo(rng) + 1e-12);
    for (double& x : p) x /= Z;
    starts.push_back(std::move(p));
  }
  LevelNOptimum best;
  double lo = 0.0, hi = 0.0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    prob.p = starts[s];
    LevelNOptimum r = ascend(prob, tol);
    const double v = r.value;
    if (s == 0 || r.value > best.value) {
      const int total = best.iterations + r.iterations;
      best = std::move(r);
      best.iterations = total;
    } else {
      best.iterations += r.iterations;
    }
    lo = s == 0 ? v : std::min(lo, v);
    hi = s == 0 ? v : std::max(hi, v);
  }
  best.start_spread = hi - lo;
  return best;
}

LevelNOptimum optimize_level_n(const CarpetSpec& spec, int n, double tol, std::uint64_t seed) {
  return optimize_level_n(make_level_n(spec, n), tol, seed);
}

}  // namespace carpetdim
