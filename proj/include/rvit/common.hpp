#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace rvit {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

[[noreturn]] void fail_contract(const std::string& msg);
[[noreturn]] void fail_domain(const std::string& msg);

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail_contract(msg);
}
inline void require_domain(bool cond, const std::string& msg) {
  if (!cond) fail_domain(msg);
}

// Counter-free splittable RNG built on splitmix64. Child streams derived from
// (state, key) are independent of draw order, so per-item streams stay stable
// under parallel generation.
class SplitRng {
 public:
  explicit SplitRng(uint64_t seed) : state_(mix(seed ^ kGamma)) {}

  SplitRng split(uint64_t key) const {
    return SplitRng(mix(state_ ^ mix(key + kGamma)), 0);
  }
  SplitRng split(const std::string& key) const { return split(fnv1a(key)); }

  uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // uniform in [0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  int64_t uniform_int(int64_t lo, int64_t hi);  // inclusive bounds

  double normal();  // standard normal, Box-Muller

  // normal(0, sigma) resampled until |x| <= bound
  double truncated_normal(double sigma, double bound);

  static uint64_t fnv1a(const std::string& s);

 private:
  SplitRng(uint64_t raw_state, int) : state_(raw_state) {}
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  uint64_t state_;
};

// Chunked thread pool helper. body(begin, end) must not touch overlapping
// output ranges for different chunks.
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& body);

}  // namespace rvit
