// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rblab/kernels.hpp"

namespace rblab::kern {

namespace {

bool cpu_has_avx2() {
#if defined(RBLAB_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(RBLAB_HAVE_NEON)
  return true;  // mandatory on aarch64
#else
  return false;
#endif
}

const KernelOps* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
#if defined(RBLAB_HAVE_AVX2)
  if (name == "avx2") {
    if (!cpu_has_avx2()) throw std::invalid_argument("cpu lacks avx2/fma");
    return &avx2_ops();
  }
#endif
#if defined(RBLAB_HAVE_NEON)
  if (name == "neon") {
    if (!cpu_has_neon()) throw std::invalid_argument("cpu lacks neon");
    return &neon_ops();
  }
#endif
  if (name == "auto") {
#if defined(RBLAB_HAVE_AVX2)
    if (cpu_has_avx2()) return &avx2_ops();
#endif
#if defined(RBLAB_HAVE_NEON)
    if (cpu_has_neon()) return &neon_ops();
#endif
    return &scalar_ops();
  }
  throw std::invalid_argument("unknown kernel implementation: " +
                              std::string(name));
}

std::atomic<const KernelOps*>& active_slot() {
  static std::atomic<const KernelOps*> slot{[] {
    const char* env = std::getenv("RBLAB_KERNEL");
    return resolve(env && *env ? env : "auto");
  }()};
  return slot;
}

}  // namespace

const KernelOps& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(std::string_view name) {
  active_slot().store(resolve(name), std::memory_order_relaxed);
}

std::string available() {
  std::string s = "scalar";
  if (cpu_has_avx2()) s += ",avx2";
  if (cpu_has_neon()) s += ",neon";
  return s;
}

}  // namespace rblab::kern
