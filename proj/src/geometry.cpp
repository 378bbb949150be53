#include "rvit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace rvit {

PolarGrid partition(const LensProjection& lens, int n_r, int n_phi) {
  require(n_r >= 1 && n_phi >= 1, "partition: n_r and n_phi must be >= 1");
  require(lens.is_normalized(),
          "partition: lens must be normalized (P(theta_max) == 1)");
  PolarGrid g;
  g.n_r = n_r;
  g.n_phi = n_phi;
  g.theta_bounds.resize(n_r + 1);
  g.r_bounds.resize(n_r + 1);
  for (int i = 0; i <= n_r; ++i) {
    g.theta_bounds[i] = lens.theta_max() * double(i) / n_r;
    g.r_bounds[i] = lens.project(g.theta_bounds[i]);
  }
  g.r_bounds[0] = 0.0;
  g.r_bounds[n_r] = 1.0;  // snap; normalized() guarantees 1 within 1e-12
  g.phi_bounds.resize(n_phi + 1);
  for (int j = 0; j <= n_phi; ++j)
    g.phi_bounds[j] = 2.0 * kPi * double(j) / n_phi;
  return g;
}

std::pair<int, int> PolarGrid::cell_of(double x, double y) const {
  double r = std::hypot(x, y);
  require_domain(r <= 1.0, "cell_of: point outside the unit disk");
  // last interval is closed so r == 1 lands in ring n_r - 1
  auto it = std::upper_bound(r_bounds.begin(), r_bounds.end(), r);
  int ring = int(it - r_bounds.begin()) - 1;
  ring = std::clamp(ring, 0, n_r - 1);
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * kPi;
  int sector = std::min(int(phi / (2.0 * kPi) * n_phi), n_phi - 1);
  return {ring, sector};
}

SamplingPattern sampling_grid(const PolarGrid& grid, const LensProjection& lens,
                              int n_sr, int n_sphi,
                              std::optional<JitterSpec> jitter) {
  require(n_sr >= 1 && n_sphi >= 1, "sampling_grid: sample counts must be >= 1");
  require(lens.is_normalized(), "sampling_grid: lens must be normalized");
  require(grid.n_r >= 1 && int(grid.theta_bounds.size()) == grid.n_r + 1,
          "sampling_grid: malformed grid");
  require(std::abs(grid.theta_bounds.back() - lens.theta_max()) <= 1e-12,
          "sampling_grid: grid was built from a different lens");
  if (jitter) {
    require(jitter->fraction >= 0.0 && jitter->fraction < 0.5,
            "sampling_grid: jitter fraction must lie in [0, 0.5)");
  }

  SamplingPattern p;
  p.n_r = grid.n_r;
  p.n_phi = grid.n_phi;
  p.n_sr = n_sr;
  p.n_sphi = n_sphi;
  p.jitter = jitter;
  p.xs.resize(size_t(p.total()));
  p.ys.resize(size_t(p.total()));

  SplitRng root(jitter ? jitter->seed : 0);
  size_t out = 0;
  for (int ir = 0; ir < grid.n_r; ++ir) {
    double t_lo = grid.theta_bounds[ir];
    double t_span = grid.theta_bounds[ir + 1] - t_lo;
    for (int ip = 0; ip < grid.n_phi; ++ip) {
      double f_lo = grid.phi_bounds[ip];
      double f_span = grid.phi_bounds[ip + 1] - f_lo;
      SplitRng rng = root.split(uint64_t(ir) * grid.n_phi + ip);
      for (int a = 0; a < n_sr; ++a) {
        for (int b = 0; b < n_sphi; ++b) {
          double ft = (a + 0.5) / n_sr;    // cell-centered offsets
          double ff = (b + 0.5) / n_sphi;
          if (jitter && jitter->fraction > 0.0) {
            ft += rng.uniform(-jitter->fraction, jitter->fraction) / n_sr;
            ff += rng.uniform(-jitter->fraction, jitter->fraction) / n_sphi;
          }
          double theta = t_lo + ft * t_span;
          double phi = f_lo + ff * f_span;
          double r = lens.project(theta);
          p.xs[out] = r * std::cos(phi);
          p.ys[out] = r * std::sin(phi);
          ++out;
        }
      }
    }
  }
  return p;
}

namespace {

struct KBest {
  // ascending (d2, idx); exact lexicographic order gives the deterministic
  // lowest-index tie break
  int k;
  std::vector<std::pair<double, int32_t>> heap;

  explicit KBest(int kk) : k(kk) { heap.reserve(size_t(kk)); }

  bool full() const { return int(heap.size()) == k; }
  double worst() const { return heap.back().first; }

  void offer(double d2, int32_t idx) {
    std::pair<double, int32_t> cand{d2, idx};
    if (full() && !(cand < heap.back())) return;
    auto pos = std::lower_bound(heap.begin(), heap.end(), cand);
    heap.insert(pos, cand);
    if (int(heap.size()) > k) heap.pop_back();
  }
};

}  // namespace

KnnTable knn_table(const SamplingPattern& pattern, int h, int w, int k) {
  int64_t total = pattern.total();
  require(total > 0, "knn_table: empty sampling pattern");
  require(k >= 1 && int64_t(k) <= total, "knn_table: k must lie in [1, total samples]");
  require(h >= 1 && w >= 1, "knn_table: image extent must be positive");

  // uniform binning over the sample bounding box, expanding ring search
  double min_x = *std::min_element(pattern.xs.begin(), pattern.xs.end());
  double max_x = *std::max_element(pattern.xs.begin(), pattern.xs.end());
  double min_y = *std::min_element(pattern.ys.begin(), pattern.ys.end());
  double max_y = *std::max_element(pattern.ys.begin(), pattern.ys.end());
  double extent = std::max({max_x - min_x, max_y - min_y, 1e-9});
  int g = std::clamp(int(std::sqrt(double(total))), 1, 1024);
  double cell = extent / g;

  auto bin_of = [&](double v, double lo) {
    return std::clamp(int((v - lo) / cell), 0, g - 1);
  };

  std::vector<std::vector<int32_t>> bins(size_t(g) * g);
  for (int64_t s = 0; s < total; ++s) {
    int bx = bin_of(pattern.xs[size_t(s)], min_x);
    int by = bin_of(pattern.ys[size_t(s)], min_y);
    bins[size_t(by) * g + bx].push_back(int32_t(s));
  }

  KnnTable table;
  table.h = h;
  table.w = w;
  table.k = k;
  table.indices.resize(size_t(h) * w * k);

  parallel_for(int64_t(h) * w, [&](int64_t p0, int64_t p1) {
    for (int64_t p = p0; p < p1; ++p) {
      int y = int(p / w), x = int(p % w);
      double px = pixel_center_norm(x, w);
      double py = pixel_center_norm(y, h);
      int bx = bin_of(px, min_x);
      int by = bin_of(py, min_y);
      KBest best(k);
      for (int ring = 0; ring < 2 * g; ++ring) {
        // any point in a bin at Chebyshev ring distance `ring` is at least
        // (ring-1)*cell away; stop once the k-th best beats that bound
        if (best.full()) {
          double lo = double(ring - 1) * cell;
          if (lo > 0.0 && lo * lo > best.worst()) break;
        }
        int x0 = bx - ring, x1 = bx + ring;
        int y0 = by - ring, y1 = by + ring;
        auto scan_bin = [&](int cx, int cy) {
          if (cx < 0 || cy < 0 || cx >= g || cy >= g) return;
          for (int32_t s : bins[size_t(cy) * g + cx]) {
            double dx = pattern.xs[size_t(s)] - px;
            double dy = pattern.ys[size_t(s)] - py;
            best.offer(dx * dx + dy * dy, s);
          }
        };
        if (ring == 0) {
          scan_bin(bx, by);
          continue;
        }
        for (int cx = x0; cx <= x1; ++cx) {
          scan_bin(cx, y0);
          scan_bin(cx, y1);
        }
        for (int cy = y0 + 1; cy < y1; ++cy) {
          scan_bin(x0, cy);
          scan_bin(x1, cy);
        }
      }
      int32_t* out = table.indices.data() + p * k;
      for (int j = 0; j < k; ++j) out[j] = best.heap[size_t(j)].second;
    }
  });
  return table;
}

std::string PolarGrid::to_json() const {
  nlohmann::ordered_json j;
  j["n_r"] = n_r;
  j["n_phi"] = n_phi;
  j["theta_bounds"] = theta_bounds;
  j["r_bounds"] = r_bounds;
  j["phi_bounds"] = phi_bounds;
  return j.dump();
}

std::string SamplingPattern::to_json() const {
  nlohmann::ordered_json j;
  j["n_r"] = n_r;
  j["n_phi"] = n_phi;
  j["n_sr"] = n_sr;
  j["n_sphi"] = n_sphi;
  if (jitter) {
    j["jitter"] = {{"fraction", jitter->fraction}, {"seed", jitter->seed}};
  }
  j["xs"] = xs;
  j["ys"] = ys;
  return j.dump();
}

}  // namespace rvit
