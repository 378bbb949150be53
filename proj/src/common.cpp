#include "rvit/common.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace rvit {

void fail_contract(const std::string& msg) { throw std::invalid_argument(msg); }
void fail_domain(const std::string& msg) { throw std::domain_error(msg); }

int64_t SplitRng::uniform_int(int64_t lo, int64_t hi) {
  require(lo <= hi, "uniform_int: lo > hi");
  uint64_t span = uint64_t(hi - lo) + 1;
  // rejection sampling to avoid modulo bias
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + int64_t(x % span);
}

double SplitRng::normal() {
  // Box-Muller, one value per call; u1 in (0,1]
  double u1 = 1.0 - next_double();
  double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double SplitRng::truncated_normal(double sigma, double bound) {
  for (;;) {
    double x = normal() * sigma;
    if (std::abs(x) <= bound) return x;
  }
}

uint64_t SplitRng::fnv1a(const std::string& s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& body) {
  if (n <= 0) return;
  int64_t hw = std::max(1u, std::thread::hardware_concurrency());
  int64_t n_threads = std::min<int64_t>(hw, n);
  if (n_threads <= 1 || n < 1024) {
    body(0, n);
    return;
  }
  int64_t chunk = (n + n_threads - 1) / n_threads;
  std::vector<std::thread> pool;
  pool.reserve(size_t(n_threads));
  for (int64_t t = 0; t < n_threads; ++t) {
    int64_t begin = t * chunk;
    int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rvit
