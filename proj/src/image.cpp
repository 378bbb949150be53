#include "rvit/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rvit {

void sample_at(const ImageBuffer& img, double nx, double ny, Interp interp,
               double* out) {
  require(!img.empty(), "sample_at: empty image");
  // continuous pixel coordinates, pixel centers at integer + 0.5
  double cx = (nx + 1.0) * 0.5 * img.w;
  double cy = (ny + 1.0) * 0.5 * img.h;
  if (interp == Interp::Nearest) {
    int x = std::clamp(int(std::floor(cx)), 0, img.w - 1);
    int y = std::clamp(int(std::floor(cy)), 0, img.h - 1);
    for (int ch = 0; ch < img.c; ++ch) out[ch] = img.at(y, x, ch);
    return;
  }
  double fx = cx - 0.5, fy = cy - 0.5;
  int x0 = int(std::floor(fx)), y0 = int(std::floor(fy));
  double ax = fx - x0, ay = fy - y0;
  int x0c = std::clamp(x0, 0, img.w - 1), x1c = std::clamp(x0 + 1, 0, img.w - 1);
  int y0c = std::clamp(y0, 0, img.h - 1), y1c = std::clamp(y0 + 1, 0, img.h - 1);
  for (int ch = 0; ch < img.c; ++ch) {
    double v00 = img.at(y0c, x0c, ch), v10 = img.at(y0c, x1c, ch);
    double v01 = img.at(y1c, x0c, ch), v11 = img.at(y1c, x1c, ch);
    out[ch] = (1.0 - ay) * ((1.0 - ax) * v00 + ax * v10) +
              ay * ((1.0 - ax) * v01 + ax * v11);
  }
}

std::vector<double> bilinear_sample(const ImageBuffer& img,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  require(!img.empty(), "bilinear_sample: empty image");
  require(xs.size() == ys.size(), "bilinear_sample: coordinate size mismatch");
  for (size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(xs[i]) && std::isfinite(ys[i]),
            "bilinear_sample: non-finite coordinate");
  }
  std::vector<double> out(xs.size() * size_t(img.c));
  for (size_t i = 0; i < xs.size(); ++i) {
    sample_at(img, xs[i], ys[i], Interp::Bilinear, out.data() + i * img.c);
  }
  return out;
}

ImageBuffer checkerboard(int size, int squares) {
  require(size >= 1 && squares >= 1 && squares <= size,
          "checkerboard: need 1 <= squares <= size");
  ImageBuffer img(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      int parity = (y * squares / size + x * squares / size) % 2;
      img.at(y, x, 0) = double(parity);
    }
  }
  return img;
}

ImageBuffer resize_box(const ImageBuffer& img, int out_h, int out_w) {
  require(!img.empty(), "resize_box: empty image");
  require(out_h >= 1 && out_w >= 1, "resize_box: non-positive output extent");
  ImageBuffer out(out_h, out_w, img.c);
  if (img.has_mask()) out.ensure_mask(1);
  double sy = double(img.h) / out_h;
  double sx = double(img.w) / out_w;
  for (int oy = 0; oy < out_h; ++oy) {
    double y_lo = oy * sy, y_hi = (oy + 1) * sy;
    int y0 = int(std::floor(y_lo)), y1 = std::min(img.h, int(std::ceil(y_hi)));
    for (int ox = 0; ox < out_w; ++ox) {
      double x_lo = ox * sx, x_hi = (ox + 1) * sx;
      int x0 = int(std::floor(x_lo)), x1 = std::min(img.w, int(std::ceil(x_hi)));
      double area = 0.0;
      bool all_valid = true;
      std::vector<double> acc(size_t(img.c), 0.0);
      for (int y = y0; y < y1; ++y) {
        double wy = std::min(y_hi, double(y + 1)) - std::max(y_lo, double(y));
        if (wy <= 0.0) continue;
        for (int x = x0; x < x1; ++x) {
          double wx = std::min(x_hi, double(x + 1)) - std::max(x_lo, double(x));
          if (wx <= 0.0) continue;
          double wgt = wx * wy;
          area += wgt;
          if (img.has_mask() && !img.valid(y, x)) all_valid = false;
          for (int ch = 0; ch < img.c; ++ch) acc[size_t(ch)] += wgt * img.at(y, x, ch);
        }
      }
      for (int ch = 0; ch < img.c; ++ch) out.at(oy, ox, ch) = acc[size_t(ch)] / area;
      if (out.has_mask()) out.mask[size_t(oy) * out_w + ox] = all_valid ? 1 : 0;
    }
  }
  return out;
}

ImageBuffer rot90_ccw(const ImageBuffer& img) {
  require(!img.empty(), "rot90_ccw: empty image");
  ImageBuffer out(img.w, img.h, img.c);
  if (img.has_mask()) out.ensure_mask();
  // (y, x) <- (x, h_out - 1 - y) so that column x becomes row (w-1-x)
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      int sy = x, sx = img.w - 1 - y;
      for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(sy, sx, ch);
      if (out.has_mask())
        out.mask[size_t(y) * out.w + x] = img.mask[size_t(sy) * img.w + sx];
    }
  }
  return out;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require(a.h == b.h && a.w == b.w && a.c == b.c, "psnr: shape mismatch");
  double mse = 0.0;
  int64_t n = 0;
  for (int y = 0; y < a.h; ++y) {
    for (int x = 0; x < a.w; ++x) {
      if (!a.valid(y, x) || !b.valid(y, x)) continue;
      for (int ch = 0; ch < a.c; ++ch) {
        double d = a.at(y, x, ch) - b.at(y, x, ch);
        mse += d * d;
        ++n;
      }
    }
  }
  require(n > 0, "psnr: no jointly valid pixels");
  mse /= double(n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace rvit
