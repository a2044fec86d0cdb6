// SPDX-License-Identifier: Apache-2.0

#include <arm_neon.h>

#include <cmath>

#include "philox_core.hpp"
#include "rblab/kernels.hpp"

// Two counter blocks per 64-bit vector pair. Mirrors kernels_avx2.cpp; the
// same bit-exactness contract against the scalar implementation applies.

namespace rblab::kern {

namespace {

void philox_bits_neon(Counter ctr, uint64_t key, std::size_t n,
                      uint64_t* out) {
  const uint32_t k32[2] = {static_cast<uint32_t>(key),
                           static_cast<uint32_t>(key >> 32)};
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint32_t base = static_cast<uint32_t>(ctr.c0 + i);
    uint32x2_t c0 = {base, static_cast<uint32_t>(base + 1)};
    uint32x2_t c1 = vdup_n_u32(ctr.c1);
    uint32x2_t c2 = vdup_n_u32(ctr.c2);
    uint32x2_t c3 = vdup_n_u32(ctr.c3);
    uint32x2_t k0 = vdup_n_u32(k32[0]);
    uint32x2_t k1 = vdup_n_u32(k32[1]);
    const uint32x2_t m0 = vdup_n_u32(detail::philox_m0);
    const uint32x2_t m1 = vdup_n_u32(detail::philox_m1);
    const uint32x2_t w0 = vdup_n_u32(detail::weyl0);
    const uint32x2_t w1 = vdup_n_u32(detail::weyl1);

    for (int r = 0; r < detail::philox_rounds; r++) {
      uint64x2_t p0 = vmull_u32(m0, c0);
      uint64x2_t p1 = vmull_u32(m1, c2);
      uint32x2_t hi0 = vshrn_n_u64(p0, 32);
      uint32x2_t lo0 = vmovn_u64(p0);
      uint32x2_t hi1 = vshrn_n_u64(p1, 32);
      uint32x2_t lo1 = vmovn_u64(p1);
      c0 = veor_u32(veor_u32(hi1, c1), k0);
      c1 = lo1;
      c2 = veor_u32(veor_u32(hi0, c3), k1);
      c3 = lo0;
      k0 = vadd_u32(k0, w0);
      k1 = vadd_u32(k1, w1);
    }

    // Per block: even word = x1<<32 | x0, odd word = x3<<32 | x2.
    uint64x2_t even =
        vorrq_u64(vmovl_u32(c0), vshlq_n_u64(vmovl_u32(c1), 32));
    uint64x2_t odd =
        vorrq_u64(vmovl_u32(c2), vshlq_n_u64(vmovl_u32(c3), 32));
    out[2 * i] = vgetq_lane_u64(even, 0);
    out[2 * i + 1] = vgetq_lane_u64(odd, 0);
    out[2 * i + 2] = vgetq_lane_u64(even, 1);
    out[2 * i + 3] = vgetq_lane_u64(odd, 1);
  }
  if (i < n) {
    Counter tail = ctr;
    tail.c0 = static_cast<uint32_t>(ctr.c0 + i);
    scalar_ops().philox_bits(tail, key, n - i, out + 2 * i);
  }
}

void u01_neon(const uint64_t* bits, std::size_t n, double* out) {
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t scale = vdupq_n_f64(0x1p-52);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t w = vld1q_u64(bits + i);
    // vcvtq converts 52-bit integers exactly.
    float64x2_t d = vcvtq_f64_u64(vshrq_n_u64(w, 12));
    vst1q_f64(out + i, vmulq_f64(vaddq_f64(d, half), scale));
  }
  if (i < n) scalar_ops().u01(bits + i, n - i, out + i);
}

void proj_abs2_neon(const double* h, const double* beams, int m_beams,
                    double* p) {
  for (int m = 0; m < m_beams; m++) {
    const double* b = beams + 2 * m * m_beams;
    // Lane pairs follow kernels_scalar.cpp: [hr*br, hi*bi] and [hr*bi, hi*br].
    float64x2_t acc1a = vdupq_n_f64(0), acc1b = vdupq_n_f64(0);
    float64x2_t acc2a = vdupq_n_f64(0), acc2b = vdupq_n_f64(0);
    int j = 0;
    for (; j + 2 <= m_beams; j += 2) {
      float64x2_t h0 = vld1q_f64(h + 2 * j);
      float64x2_t h1 = vld1q_f64(h + 2 * j + 2);
      float64x2_t b0 = vld1q_f64(b + 2 * j);
      float64x2_t b1 = vld1q_f64(b + 2 * j + 2);
      acc1a = vfmaq_f64(acc1a, h0, b0);
      acc1b = vfmaq_f64(acc1b, h1, b1);
      acc2a = vfmaq_f64(acc2a, h0, vextq_f64(b0, b0, 1));
      acc2b = vfmaq_f64(acc2b, h1, vextq_f64(b1, b1, 1));
    }
    double re0 = vgetq_lane_f64(acc1a, 0), re1 = -vgetq_lane_f64(acc1a, 1);
    double re2 = vgetq_lane_f64(acc1b, 0), re3 = -vgetq_lane_f64(acc1b, 1);
    double im0 = vgetq_lane_f64(acc2a, 0), im1 = vgetq_lane_f64(acc2a, 1);
    double im2 = vgetq_lane_f64(acc2b, 0), im3 = vgetq_lane_f64(acc2b, 1);
    if (j < m_beams) {
      re0 = std::fma(h[2 * j], b[2 * j], re0);
      re1 = std::fma(-h[2 * j + 1], b[2 * j + 1], re1);
      im0 = std::fma(h[2 * j], b[2 * j + 1], im0);
      im1 = std::fma(h[2 * j + 1], b[2 * j], im1);
    }
    double re = (re0 + re1) + (re2 + re3);
    double im = (im0 + im1) + (im2 + im3);
    p[m] = re * re + im * im;
  }
}

void sinr_from_proj_neon(const double* p, int m_beams, double rho0,
                         double cross_plus_noise, double* z) {
  double s = 0;
  for (int m = 0; m < m_beams; m++) s += p[m];
  const float64x2_t sv = vdupq_n_f64(s);
  const float64x2_t rv = vdupq_n_f64(rho0);
  const float64x2_t cv = vdupq_n_f64(cross_plus_noise);
  int m = 0;
  for (; m + 2 <= m_beams; m += 2) {
    float64x2_t pv = vld1q_f64(p + m);
    float64x2_t den = vaddq_f64(vmulq_f64(rv, vsubq_f64(sv, pv)), cv);
    vst1q_f64(z + m, vdivq_f64(vmulq_f64(rv, pv), den));
  }
  for (; m < m_beams; m++) {
    z[m] = (rho0 * p[m]) / (rho0 * (s - p[m]) + cross_plus_noise);
  }
}

}  // namespace

const KernelOps& neon_ops() {
  static const KernelOps ops = {philox_bits_neon, u01_neon, proj_abs2_neon,
                                sinr_from_proj_neon, "neon"};
  return ops;
}

}  // namespace rblab::kern
