#include "spikebench/rng.hpp"

namespace spikebench {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ splitmix64(index); }

std::uint64_t trial_seed(std::uint64_t base, std::uint32_t grid_index, std::uint32_t trial) {
  return derive_seed(base, (static_cast<std::uint64_t>(grid_index) << 32) | trial);
}

void fill_normal(Rng& rng, double* out, std::size_t n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) out[i] = nd(rng);
}

Vec normal_vector(Rng& rng, Eigen::Index n) {
  Vec v(n);
  fill_normal(rng, v.data(), static_cast<std::size_t>(n));
  return v;
}

}  // namespace spikebench
