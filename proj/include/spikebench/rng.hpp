#pragma once

#include <cstdint>
#include <random>

#include "spikebench/matrix.hpp"

namespace spikebench {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// base XOR a finalizer-mixed index; distinct indices give unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Grid point and trial packed into one index.
std::uint64_t trial_seed(std::uint64_t base, std::uint32_t grid_index, std::uint32_t trial);

void fill_normal(Rng& rng, double* out, std::size_t n);
Vec normal_vector(Rng& rng, Eigen::Index n);

}  // namespace spikebench
