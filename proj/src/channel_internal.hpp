// SPDX-License-Identifier: Apache-2.0
#pragma once

// Allocation-free channel generation primitives, shared between the public
// channel API and the simulation engine's per-trial loop. Everything here is
// deterministic in (seed, trial, stream) and in the kernel backend contract:
// the backends produce bit-identical uniforms, and all arithmetic past that
// point is plain scalar double with a fixed evaluation order.

#include <cmath>
#include <cstdint>
#include <vector>

#include "rblab/kernels.hpp"

namespace rblab::chan {

// Scratch buffers reused across calls so the per-trial loop never allocates
// after warmup.
struct Workspace {
  std::vector<std::uint64_t> bits;
  std::vector<double> u;
};

inline kern::Counter start_counter(std::uint64_t trial, std::uint32_t stream) {
  return kern::Counter{0, stream, static_cast<std::uint32_t>(trial),
                       static_cast<std::uint32_t>(trial >> 32)};
}

// Fills h with m i.i.d. standard complex Gaussian entries, interleaved re/im.
// Entry j consumes uniforms 2j and 2j+1 of the stream through the polar map
// re = sqrt(-ln u1) cos(2 pi u2), im = sqrt(-ln u1) sin(2 pi u2), which gives
// re and im variance 1/2 each and |h_j|^2 = -ln u1 exactly. The uniforms are
// confined to (0,1) by the kernel mapping, so the logs never blow up.
void fill_gaussian_row(const kern::KernelOps& ops, double* h, std::size_t m,
                       std::uint64_t seed, std::uint64_t trial,
                       std::uint32_t stream, Workspace& ws);

// Fills cols (2*m*m doubles, column-major interleaved) with a Haar beam set:
// an m x m Ginibre matrix from the stream, orthonormalized column by column
// with two projection sweeps per column. Normalizing against the positive
// column norm fixes the decomposition's phase freedom, so the result is the
// unique unitary factor and Haar-distributed.
void fill_beams(const kern::KernelOps& ops, double* cols, std::size_t m,
                std::uint64_t seed, std::uint64_t trial, std::uint32_t stream,
                Workspace& ws);

// ||h||^2 for the channel row vector this stream would produce, without
// materializing it: |h_j|^2 = -ln u1_j, so the power is -ln of the product of
// the odd-phase uniforms. One log per cell instead of m; the product is
// flushed into the accumulator before it can underflow (each factor is at
// least 2^-53, so that takes pathological inputs, but the guard is cheap).
double interference_power(const kern::KernelOps& ops, std::size_t m,
                          std::uint64_t seed, std::uint64_t trial,
                          std::uint32_t stream, Workspace& ws);

// One user's SINR row from its serving vector, the shared beam columns, and
// the precomputed intercell-plus-noise term. proj is scratch of length m.
inline void sinr_row(const kern::KernelOps& ops, const double* h,
                     const double* beam_cols, std::size_t m, double rho0,
                     double cross_plus_noise, double* proj, double* z) {
  ops.proj_abs2(h, beam_cols, static_cast<int>(m), proj);
  ops.sinr_from_proj(proj, static_cast<int>(m), rho0, cross_plus_noise, z);
}

}  // namespace rblab::chan
