// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace rblab::kern {

// Counter block for the Philox4x32-10 generator. Streams never collide as
// long as callers keep the (c1, c2, c3) triple unique per logical stream:
//   c0        element index within one draw
//   c1        stream tag, see pack_stream()
//   c2, c3    trial number, low and high 32 bits
struct Counter {
  uint32_t c0, c1, c2, c3;
};

// Stream tags. purpose occupies bits 31..28, user bits 27..8, cell bits 7..0,
// so a scenario supports up to 2^20 users and 256 interfering cells.
enum class Purpose : uint32_t {
  serving_beams = 0,
  serving_channel = 1,
  interferer_channel = 2,
  interferer_beams = 3,
};

constexpr uint32_t pack_stream(Purpose purpose, uint32_t user, uint32_t cell) {
  return (static_cast<uint32_t>(purpose) << 28) | ((user & 0xFFFFFu) << 8) |
         (cell & 0xFFu);
}

// One Philox4x32-10 block: 4x32 counter, 2x32 key, 4x32 output.
// Reference implementation, exposed for known-answer tests.
void philox4x32(const uint32_t ctr[4], const uint32_t key[2], uint32_t out[4]);

// Hot-path operations with interchangeable implementations. All variants of
// one operation produce bit-identical output; the unit tests enforce that.
struct KernelOps {
  // Run Philox on n counter blocks differing only in c0 (stride 1 from
  // ctr.c0), writing two 64-bit words per block: out[2i] = x1<<32 | x0,
  // out[2i+1] = x3<<32 | x2. The 64-bit key splits little-endian into
  // (key, key >> 32).
  void (*philox_bits)(Counter ctr, uint64_t key, std::size_t n, uint64_t* out);

  // Map raw 64-bit words to doubles in the open interval (0,1):
  // u = ((w >> 12) + 0.5) * 2^-52. Every step is exact in binary64 and the
  // result can never round to 0 or 1, so logs are safe.
  void (*u01)(const uint64_t* bits, std::size_t n, double* out);

  // p[m] = |sum_j h[j] * b[j + m*m_beams]|^2 for m = 0..m_beams-1.
  // h is one complex row vector (interleaved re,im, length 2*m_beams);
  // beams holds m_beams column vectors of the same layout, column-major.
  void (*proj_abs2)(const double* h, const double* beams, int m_beams,
                    double* p);

  // z[m] = rho0*p[m] / (rho0*(s - p[m]) + c) with s = sum over p, summed
  // left to right, and c = cross-cell interference plus noise.
  void (*sinr_from_proj)(const double* p, int m_beams, double rho0,
                         double cross_plus_noise, double* z);

  const char* name;
};

const KernelOps& scalar_ops();
#if defined(RBLAB_HAVE_AVX2)
const KernelOps& avx2_ops();
#endif
#if defined(RBLAB_HAVE_NEON)
const KernelOps& neon_ops();
#endif

// Active implementation. Picked once from CPU features, or from the
// RBLAB_KERNEL environment variable (values: auto, scalar, avx2, neon).
const KernelOps& active();

// Force an implementation by name. Throws std::invalid_argument if the name
// is unknown or the CPU cannot run it.
void select(std::string_view name);

// Comma-separated list of implementations compiled in and runnable here.
std::string available();

}  // namespace rblab::kern
