// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "carpetdim/carpet_io.hpp"
#include "carpetdim/error.hpp"
#include "carpetdim/parallel.hpp"

namespace carpetdim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

Point2 apply(const CarpetSpec& spec, const Letter& l, Point2 p) {
  const double y = p.y;
  return {spec.a_tilde(l.row, l.col)(y) * p.x + spec.u(l.row, l.col)(y), spec.b(l.row)(y)};
}

Point2 apply_word(const CarpetSpec& spec, const FullWord& w, Point2 p) {
  for (std::size_t k = w.size(); k > 0; --k) p = apply(spec, w[k - 1], p);
  return p;
}

std::vector<Letter> alphabet(const CarpetSpec& spec) {
  std::vector<Letter> out;
  for (int i = 0; i < spec.row_count(); ++i)
    for (int j = 0; j < spec.cell_count(i); ++j) out.push_back({i, j});
  return out;
}

}  // namespace

std::vector<Region> render_regions(const CarpetSpec& spec, int depth) {
  check_well_formed(spec);
  if (depth < 0) throw Error(ErrorKind::MalformedSpec, "depth must be >= 0");
  const double letters = static_cast<double>(alphabet(spec).size());
  if (std::pow(letters, depth) > 1e6) throw Error(ErrorKind::TooDeep, "more than 10^6 regions");

  const double C = domination_constants(spec).C;
  std::vector<FullWord> words = depth == 0 ? std::vector<FullWord>{FullWord{}}
                                           : all_full_words(spec, depth);
  std::vector<Region> out(words.size());
  parallel_for(words.size(), [&](std::size_t r) {
    Region& reg = out[r];
    reg.word = std::move(words[r]);
    reg.left.resize(kBoundarySamples);
    reg.right.resize(kBoundarySamples);
    for (int k = 0; k < kBoundarySamples; ++k) {
      const double s = static_cast<double>(k) / (kBoundarySamples - 1);
      reg.left[k] = apply_word(spec, reg.word, {0.0, s});
      reg.right[k] = apply_word(spec, reg.word, {1.0, s});
    }
    const auto [ylo, yhi] = depth == 0 ? std::pair{0.0, 1.0} : cylinder_interval(spec, reg.word.rows());
    reg.y0 = ylo;
    reg.y1 = yhi;
    // The image of a vertical line is a graph over y with slope at most C, so
    // between samples it leaves the sampled hull by at most C * gap / 2.
    std::vector<double> ys;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (const auto* side : {&reg.left, &reg.right})
      for (const Point2& p : *side) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        if (side == &reg.left) ys.push_back(p.y);
      }
    std::sort(ys.begin(), ys.end());
    double gap = 0.0;
    for (std::size_t k = 1; k < ys.size(); ++k) gap = std::max(gap, ys[k] - ys[k - 1]);
    reg.x0 = xmin - 0.5 * C * gap;
    reg.x1 = xmax + 0.5 * C * gap;
  });
  return out;
}

std::vector<double> dyadic_scales(int lo, int hi) {
  std::vector<double> s;
  for (int k = lo; k <= hi; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

BoxCountResult box_count(const CarpetSpec& spec, std::int64_t samples, int depth,
                         const std::vector<double>& scales, std::uint64_t seed) {
  check_well_formed(spec);
  if (samples < 10000) throw Error(ErrorKind::MalformedSpec, "box counting needs >= 10^4 samples");
  if (depth < 1) throw Error(ErrorKind::MalformedSpec, "box counting depth must be >= 1");
  if (scales.size() < 2) throw Error(ErrorKind::MalformedSpec, "box counting needs two scales");
  for (double s : scales)
    if (!(s > 0.0)) throw Error(ErrorKind::MalformedSpec, "box scales must be positive");

  const std::vector<Letter> letters = alphabet(spec);
  const auto n = static_cast<std::size_t>(samples);
  std::vector<Point2> pts(n);
  constexpr std::size_t kChunk = 4096;
  parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t c) {
    std::vector<int> word(depth);
    for (std::size_t k = c * kChunk; k < std::min(n, (c + 1) * kChunk); ++k) {
      std::mt19937_64 rng(stream_seed(seed, k));
      std::uniform_int_distribution<int> pick(0, static_cast<int>(letters.size()) - 1);
      for (int& w : word) w = pick(rng);
      Point2 p{0.5, 0.5};
      for (int q = depth - 1; q >= 0; --q) p = apply(spec, letters[word[q]], p);
      pts[k] = p;
    }
  });

  BoxCountResult out;
  std::vector<double> X, Y;
  std::vector<std::uint64_t> keys(n);
  for (double s : scales) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto ix = static_cast<std::uint64_t>(std::max(0.0, std::floor(pts[k].x / s)));
      const auto iy = static_cast<std::uint64_t>(std::max(0.0, std::floor(pts[k].y / s)));
      keys[k] = (ix << 32) | iy;
    }
    std::sort(keys.begin(), keys.end());
    const auto count = std::unique(keys.begin(), keys.end()) - keys.begin();
    out.counts.emplace_back(s, static_cast<std::int64_t>(count));
    X.push_back(std::log(1.0 / s));
    Y.push_back(std::log(static_cast<double>(count)));
  }
  const double mx = std::accumulate(X.begin(), X.end(), 0.0) / X.size();
  const double my = std::accumulate(Y.begin(), Y.end(), 0.0) / Y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    sxy += (X[k] - mx) * (Y[k] - my);
    sxx += (X[k] - mx) * (X[k] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorKind::MalformedSpec, "box scales must differ");
  out.estimate = sxy / sxx;
  return out;
}

DistortionCheck vertical_graph_distortion_check(const CarpetSpec& spec, int trials, int depth,
                                                std::uint64_t seed) {
  check_well_formed(spec);
  if (trials < 1) throw Error(ErrorKind::MalformedSpec, "trials must be >= 1");
  DistortionCheck out;
  out.C = domination_constants(spec).C;
  const std::vector<Letter> letters = alphabet(spec);

  struct Deriv {
    Poly da, du, db;
  };
  std::vector<Deriv> d;
  for (const Letter& l : letters)
    d.push_back({spec.a_tilde(l.row, l.col).derivative(), spec.u(l.row, l.col).derivative(),
                 spec.b(l.row).derivative()});

  constexpr int kHeights = 17;
  std::vector<double> worst(static_cast<std::size_t>(trials), 0.0);
  parallel_for(worst.size(), [&](std::size_t tr) {
    std::mt19937_64 rng(stream_seed(seed, tr));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(letters.size()) - 1);
    std::vector<int> chain(depth);
    for (int& c : chain) c = pick(rng);
    double local = 0.0;
    for (double x0 : {0.0, 1.0})
      for (int h = 0; h < kHeights; ++h) {
        // (x, slope, y) of the graph point above height y; G(y) = x, G'(y) = slope.
        double x = x0, slope = 0.0, y = static_cast<double>(h) / (kHeights - 1);
        for (int c : chain) {
          const Letter& l = letters[c];
          const double a = spec.a_tilde(l.row, l.col)(y);
          slope = (a * slope + d[c].da(y) * x + d[c].du(y)) / d[c].db(y);
          x = a * x + spec.u(l.row, l.col)(y);
          y = spec.b(l.row)(y);
          local = std::max(local, std::abs(slope));
        }
      }
    worst[tr] = local;
  });
  out.max_slope_seen = *std::max_element(worst.begin(), worst.end());
  out.pass = out.max_slope_seen <= out.C + 1e-9;
  return out;
}

void write_regions_csv(std::ostream& os, const std::vector<Region>& regions) {
  os << "word,x0,y0,x1,y1\n";
  for (const Region& r : regions)
    os << format_word(r.word) << ',' << format_real(r.x0) << ',' << format_real(r.y0) << ','
       << format_real(r.x1) << ',' << format_real(r.y1) << '\n';
}

void write_boundaries_csv(std::ostream& os, const std::vector<Region>& regions) {
  os << "word,side,k,x,y\n";
  for (const Region& r : regions) {
    const std::string w = format_word(r.word);
    for (int k = 0; k < static_cast<int>(r.left.size()); ++k)
      os << w << ",left," << k << ',' << format_real(r.left[k].x) << ',' << format_real(r.left[k].y)
         << '\n';
    for (int k = 0; k < static_cast<int>(r.right.size()); ++k)
      os << w << ",right," << k << ',' << format_real(r.right[k].x) << ','
         << format_real(r.right[k].y) << '\n';
  }
}

void write_box_counts_csv(std::ostream& os, const BoxCountResult& result) {
  os << "scale,count\n";
  for (const auto& [s, c] : result.counts) os << format_real(s) << ',' << c << '\n';
}

}  // namespace carpetdim
