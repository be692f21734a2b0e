// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_GEOMETRY_HPP
#define CARPETDIM_GEOMETRY_HPP

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/coding.hpp"

namespace carpetdim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Image of the unit square under f_{w1} o ... o f_{wn}.
struct Region {
  FullWord word;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // bounding box
  std::vector<Point2> left;   // image of {0} x [0,1]
  std::vector<Point2> right;  // image of {1} x [0,1]
};

inline constexpr int kBoundarySamples = 16;

/// All regions of the given depth in lexicographic word order.  The x-extent of
/// each box is widened by C * dy / 2 (C the distortion constant, dy the largest
/// gap between boundary samples), which bounds the curve between samples.
/// TooDeep when the region count exceeds 10^6.
std::vector<Region> render_regions(const CarpetSpec& spec, int depth);

struct BoxCountResult {
  double estimate = 0.0;
  std::vector<std::pair<double, std::int64_t>> counts;  // (scale, occupied boxes)
};

/// Least-squares slope of log N(s) against log(1/s) from `samples` points of
/// the attractor.  Sample k uses its own generator seeded from (seed, k), so the
/// result does not depend on the thread count.
BoxCountResult box_count(const CarpetSpec& spec, std::int64_t samples, int depth,
                         const std::vector<double>& scales, std::uint64_t seed);

/// Scales 2^-lo .. 2^-hi.
std::vector<double> dyadic_scales(int lo, int hi);

struct DistortionCheck {
  double max_slope_seen = 0.0;
  double C = 0.0;
  bool pass = false;
};

/// Pushes the vertical graphs x = 0 and x = 1 through `depth` random maps per
/// trial, tracking the exact graph derivative at sampled heights.
DistortionCheck vertical_graph_distortion_check(const CarpetSpec& spec, int trials, int depth,
                                                std::uint64_t seed);

void write_regions_csv(std::ostream& os, const std::vector<Region>& regions);
/// Long format: word,side,k,x,y with side in {left,right}.
void write_boundaries_csv(std::ostream& os, const std::vector<Region>& regions);
void write_box_counts_csv(std::ostream& os, const BoxCountResult& result);

}  // namespace carpetdim

#endif  // CARPETDIM_GEOMETRY_HPP
