// SPDX-License-Identifier: Apache-2.0

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "philox_core.hpp"
#include "rblab/kernels.hpp"

// Four counter blocks run in parallel, one per 64-bit lane. Lanes hold the
// 32-bit state zero-extended so _mm256_mul_epu32 sees clean operands.
// Output must match the scalar implementation bit for bit; the float paths
// therefore reuse the exact accumulation trees from kernels_scalar.cpp.

namespace rblab::kern {

namespace {

inline __m256i mask_lo32() { return _mm256_set1_epi64x(0xFFFFFFFFll); }

void philox_bits_avx2(Counter ctr, uint64_t key, std::size_t n,
                      uint64_t* out) {
  const uint32_t k32[2] = {static_cast<uint32_t>(key),
                           static_cast<uint32_t>(key >> 32)};
  const __m256i m0 = _mm256_set1_epi64x(detail::philox_m0);
  const __m256i m1 = _mm256_set1_epi64x(detail::philox_m1);
  const __m256i w0 = _mm256_set1_epi64x(detail::weyl0);
  const __m256i w1 = _mm256_set1_epi64x(detail::weyl1);
  const __m256i lo = mask_lo32();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    uint64_t base = ctr.c0 + i;  // c0 wraps at 32 bits like the scalar path
    __m256i c0 = _mm256_and_si256(
        _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                         _mm256_set_epi64x(3, 2, 1, 0)),
        lo);
    __m256i c1 = _mm256_set1_epi64x(ctr.c1);
    __m256i c2 = _mm256_set1_epi64x(ctr.c2);
    __m256i c3 = _mm256_set1_epi64x(ctr.c3);
    __m256i k0 = _mm256_set1_epi64x(k32[0]);
    __m256i k1 = _mm256_set1_epi64x(k32[1]);

    for (int r = 0; r < detail::philox_rounds; r++) {
      __m256i p0 = _mm256_mul_epu32(m0, c0);
      __m256i p1 = _mm256_mul_epu32(m1, c2);
      __m256i hi0 = _mm256_srli_epi64(p0, 32);
      __m256i lo0 = _mm256_and_si256(p0, lo);
      __m256i hi1 = _mm256_srli_epi64(p1, 32);
      __m256i lo1 = _mm256_and_si256(p1, lo);
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
      c3 = lo0;
      k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), lo);
      k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), lo);
    }

    // Per block: even word = x1<<32 | x0, odd word = x3<<32 | x2,
    // interleaved in block order.
    __m256i even = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
    __m256i odd = _mm256_or_si256(c2, _mm256_slli_epi64(c3, 32));
    __m256i a = _mm256_unpacklo_epi64(even, odd);
    __m256i b = _mm256_unpackhi_epi64(even, odd);
    _mm256_storeu_si256(
        reinterpret_cast<__m256i*>(out + 2 * i),
        _mm256_permute2x128_si256(a, b, 0x20));
    _mm256_storeu_si256(
        reinterpret_cast<__m256i*>(out + 2 * i + 4),
        _mm256_permute2x128_si256(a, b, 0x31));
  }

  if (i < n) {
    Counter tail = ctr;
    tail.c0 = static_cast<uint32_t>(ctr.c0 + i);
    scalar_ops().philox_bits(tail, key, n - i, out + 2 * i);
  }
}

void u01_avx2(const uint64_t* bits, std::size_t n, double* out) {
  // Exact u64 -> double for 52-bit values: convert the 32-bit halves with
  // the exponent-bias trick, then recombine. Equals the scalar cast because
  // every intermediate is exact.
  const __m256i lo_mask = mask_lo32();
  const __m256i exp52 = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
  const __m256i exp84 = _mm256_set1_epi64x(0x4530000000000000ll);  // 2^84
  const __m256d bias = _mm256_set1_pd(0x1.0000000100000p+84);  // 2^84 + 2^52
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d scale = _mm256_set1_pd(0x1p-52);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    __m256i v = _mm256_srli_epi64(w, 12);
    __m256i vlo = _mm256_and_si256(v, lo_mask);
    __m256i vhi = _mm256_srli_epi64(v, 32);
    __m256d dlo = _mm256_castsi256_pd(_mm256_or_si256(vlo, exp52));
    __m256d dhi = _mm256_castsi256_pd(_mm256_or_si256(vhi, exp84));
    __m256d d = _mm256_add_pd(_mm256_sub_pd(dhi, bias), dlo);
    __m256d u = _mm256_mul_pd(_mm256_add_pd(d, half), scale);
    _mm256_storeu_pd(out + i, u);
  }
  if (i < n) scalar_ops().u01(bits + i, n - i, out + i);
}

void proj_abs2_avx2(const double* h, const double* beams, int m_beams,
                    double* p) {
  for (int m = 0; m < m_beams; m++) {
    const double* b = beams + 2 * m * m_beams;
    // acc1 lanes: [sum hr*br, sum hi*bi, ...], acc2: [sum hr*bi, sum hi*br, ...]
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    int j = 0;
    for (; j + 2 <= m_beams; j += 2) {
      __m256d hv = _mm256_loadu_pd(h + 2 * j);
      __m256d bv = _mm256_loadu_pd(b + 2 * j);
      __m256d bs = _mm256_permute_pd(bv, 0x5);  // swap re/im in each pair
      acc1 = _mm256_fmadd_pd(hv, bv, acc1);
      acc2 = _mm256_fmadd_pd(hv, bs, acc2);
    }
    alignas(32) double a1[4], a2[4];
    _mm256_store_pd(a1, acc1);
    _mm256_store_pd(a2, acc2);
    double re0 = a1[0], re1 = -a1[1], re2 = a1[2], re3 = -a1[3];
    double im0 = a2[0], im1 = a2[1], im2 = a2[2], im3 = a2[3];
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

void sinr_from_proj_avx2(const double* p, int m_beams, double rho0,
                         double cross_plus_noise, double* z) {
  double s = 0;
  for (int m = 0; m < m_beams; m++) s += p[m];
  const __m256d sv = _mm256_set1_pd(s);
  const __m256d rv = _mm256_set1_pd(rho0);
  const __m256d cv = _mm256_set1_pd(cross_plus_noise);
  int m = 0;
  for (; m + 4 <= m_beams; m += 4) {
    __m256d pv = _mm256_loadu_pd(p + m);
    __m256d den = _mm256_add_pd(_mm256_mul_pd(rv, _mm256_sub_pd(sv, pv)), cv);
    _mm256_storeu_pd(z + m, _mm256_div_pd(_mm256_mul_pd(rv, pv), den));
  }
  for (; m < m_beams; m++) {
    z[m] = (rho0 * p[m]) / (rho0 * (s - p[m]) + cross_plus_noise);
  }
}

}  // namespace

const KernelOps& avx2_ops() {
  static const KernelOps ops = {philox_bits_avx2, u01_avx2, proj_abs2_avx2,
                                sinr_from_proj_avx2, "avx2"};
  return ops;
}

}  // namespace rblab::kern
