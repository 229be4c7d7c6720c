#include <cstdlib>
#include <cstring>

#include "spikebench/kernels.hpp"

namespace spikebench::kernels {
namespace {

const Table& pick() {
  const char* env = std::getenv("SPIKEBENCH_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return scalar();
  if (env && std::strcmp(env, "avx2") == 0 && avx2()) return *avx2();
  if (env && std::strcmp(env, "neon") == 0 && neon()) return *neon();
  if (const Table* t = avx2()) return *t;
  if (const Table* t = neon()) return *t;
  return scalar();
}

}  // namespace

const Table& active() {
  static const Table& t = pick();
  return t;
}

}  // namespace spikebench::kernels
