// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>

#include "philox_core.hpp"
#include "rblab/kernels.hpp"

namespace rblab::kern {

namespace {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

}  // namespace

void philox4x32(const uint32_t ctr[4], const uint32_t key[2], uint32_t out[4]) {
  uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  uint32_t k0 = key[0], k1 = key[1];
  for (int r = 0; r < detail::philox_rounds; r++) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(detail::philox_m0, c0, hi0, lo0);
    mulhilo(detail::philox_m1, c2, hi1, lo1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += detail::weyl0;
    k1 += detail::weyl1;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

namespace {

void philox_bits_scalar(Counter ctr, uint64_t key, std::size_t n,
                        uint64_t* out) {
  const uint32_t k[2] = {static_cast<uint32_t>(key),
                         static_cast<uint32_t>(key >> 32)};
  uint32_t c[4] = {ctr.c0, ctr.c1, ctr.c2, ctr.c3};
  for (std::size_t i = 0; i < n; i++) {
    uint32_t x[4];
    philox4x32(c, k, x);
    out[2 * i] = static_cast<uint64_t>(x[0]) | (static_cast<uint64_t>(x[1]) << 32);
    out[2 * i + 1] =
        static_cast<uint64_t>(x[2]) | (static_cast<uint64_t>(x[3]) << 32);
    c[0]++;
  }
}

void u01_scalar(const uint64_t* bits, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; i++) {
    out[i] = (static_cast<double>(bits[i] >> 12) + 0.5) * 0x1p-52;
  }
}

// Complex dot products against each beam column, then squared magnitude.
// Accumulation runs over entry pairs with four parallel partial sums per
// component so the vector variants can reproduce it bit for bit.
void proj_abs2_scalar(const double* h, const double* beams, int m_beams,
                      double* p) {
  for (int m = 0; m < m_beams; m++) {
    const double* b = beams + 2 * m * m_beams;
    double re0 = 0, re1 = 0, re2 = 0, re3 = 0;
    double im0 = 0, im1 = 0, im2 = 0, im3 = 0;
    int j = 0;
    for (; j + 2 <= m_beams; j += 2) {
      re0 = std::fma(h[2 * j], b[2 * j], re0);
      re1 = std::fma(-h[2 * j + 1], b[2 * j + 1], re1);
      re2 = std::fma(h[2 * j + 2], b[2 * j + 2], re2);
      re3 = std::fma(-h[2 * j + 3], b[2 * j + 3], re3);
      im0 = std::fma(h[2 * j], b[2 * j + 1], im0);
      im1 = std::fma(h[2 * j + 1], b[2 * j], im1);
      im2 = std::fma(h[2 * j + 2], b[2 * j + 3], im2);
      im3 = std::fma(h[2 * j + 3], b[2 * j + 2], im3);
    }
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

void sinr_from_proj_scalar(const double* p, int m_beams, double rho0,
                           double cross_plus_noise, double* z) {
  double s = 0;
  for (int m = 0; m < m_beams; m++) s += p[m];
  for (int m = 0; m < m_beams; m++) {
    z[m] = (rho0 * p[m]) / (rho0 * (s - p[m]) + cross_plus_noise);
  }
}

}  // namespace

const KernelOps& scalar_ops() {
  static const KernelOps ops = {philox_bits_scalar, u01_scalar,
                                proj_abs2_scalar, sinr_from_proj_scalar,
                                "scalar"};
  return ops;
}

}  // namespace rblab::kern
