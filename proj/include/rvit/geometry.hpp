#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rvit/lens.hpp"

namespace rvit {

// Polar partition of the unit image disk: azimuth split equiangular in phi,
// radial split equiangular in theta and mapped through the lens curve.
struct PolarGrid {
  int n_r = 0;
  int n_phi = 0;
  std::vector<double> theta_bounds;  // n_r + 1, theta_bounds[i] = i*theta_max/n_r
  std::vector<double> r_bounds;      // n_r + 1, r_bounds[i] = P(theta_bounds[i])
  std::vector<double> phi_bounds;    // n_phi + 1, equiangular over [0, 2pi]

  int patch_count() const { return n_r * n_phi; }

  // (ring, sector) of a normalized point with radius <= 1.
  // Cells are half-open [lo, hi) except the outermost/last, which is closed.
  std::pair<int, int> cell_of(double x, double y) const;

  std::string to_json() const;
};

PolarGrid partition(const LensProjection& lens, int n_r, int n_phi);

struct JitterSpec {
  double fraction = 0.25;  // of the local sample spacing, must be < 0.5
  uint64_t seed = 0;
};

// Per-patch sample locations in normalized cartesian coordinates, patch-major
// (ring-major across patches), radius-major within a patch. Every patch
// carries exactly n_sr * n_sphi samples.
struct SamplingPattern {
  int n_r = 0, n_phi = 0;
  int n_sr = 0, n_sphi = 0;
  std::vector<double> xs, ys;  // n_r*n_phi*n_sr*n_sphi each
  std::optional<JitterSpec> jitter;

  int samples_per_patch() const { return n_sr * n_sphi; }
  int64_t total() const { return int64_t(n_r) * n_phi * n_sr * n_sphi; }
  int patch_of_sample(int64_t s) const { return int(s / samples_per_patch()); }

  std::string to_json() const;
};

SamplingPattern sampling_grid(const PolarGrid& grid, const LensProjection& lens,
                              int n_sr, int n_sphi,
                              std::optional<JitterSpec> jitter = std::nullopt);

// Fixed pixel -> k nearest samples map; equal weights 1/k. Depends only on
// geometry, never on features.
struct KnnTable {
  int h = 0, w = 0, k = 0;
  std::vector<int32_t> indices;  // h*w*k, row-major pixels

  double weight() const { return 1.0 / k; }
  const int32_t* at(int y, int x) const { return indices.data() + (int64_t(y) * w + x) * k; }
};

KnnTable knn_table(const SamplingPattern& pattern, int h, int w, int k);

// normalized coordinate of a pixel center, [-1, 1] across the image extent
inline double pixel_center_norm(int i, int extent) {
  return (2.0 * i + 1.0) / extent - 1.0;
}

}  // namespace rvit
