#pragma once

#include <cstdint>
#include <vector>

#include "rvit/common.hpp"

namespace rvit {

enum class Interp { Bilinear, Nearest };

// Row-major real-valued raster, values conventionally in [0, 1]. Normalized
// coordinates are centered on the optical center: pixel center (x, y) sits at
// ((2x+1)/w - 1, (2y+1)/h - 1), y pointing down.
struct ImageBuffer {
  int h = 0, w = 0, c = 0;
  std::vector<double> data;     // h*w*c
  std::vector<uint8_t> mask;    // empty, or h*w with 1 = valid

  ImageBuffer() = default;
  ImageBuffer(int hh, int ww, int cc, double fill = 0.0)
      : h(hh), w(ww), c(cc), data(size_t(hh) * ww * cc, fill) {
    require(hh > 0 && ww > 0 && cc > 0, "ImageBuffer: non-positive extent");
  }

  bool empty() const { return data.empty(); }
  bool has_mask() const { return !mask.empty(); }
  void ensure_mask(uint8_t fill = 1) {
    if (!has_mask()) mask.assign(size_t(h) * w, fill);
  }

  double& at(int y, int x, int ch) { return data[(size_t(y) * w + x) * c + ch]; }
  double at(int y, int x, int ch) const { return data[(size_t(y) * w + x) * c + ch]; }
  uint8_t valid(int y, int x) const { return has_mask() ? mask[size_t(y) * w + x] : 1; }
};

// Sample at a normalized point; writes c values to out. Out-of-bounds
// coordinates clamp to the edge.
void sample_at(const ImageBuffer& img, double nx, double ny, Interp interp,
               double* out);

// Bulk form of sample_at with bilinear interpolation; returns n*c values.
std::vector<double> bilinear_sample(const ImageBuffer& img,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ys);

ImageBuffer checkerboard(int size, int squares);

// Area-average (box) resample, exact for integer ratios. A mask pixel stays
// valid only when its entire source footprint is valid.
ImageBuffer resize_box(const ImageBuffer& img, int out_h, int out_w);

ImageBuffer rot90_ccw(const ImageBuffer& img);

// Peak signal-to-noise ratio over jointly valid pixels, peak = 1.0.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace rvit
