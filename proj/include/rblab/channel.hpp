// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rblab/scenario.hpp"

namespace rblab {

// M orthonormal complex beamforming vectors of dimension M, the columns of a
// Haar-distributed unitary. Storage is column-major with interleaved re/im,
// so column j element i lives at cols[2*(j*num_beams + i)] and the next slot.
struct BeamSet {
  std::size_t num_beams = 0;
  std::vector<double> cols;

  double re(std::size_t i, std::size_t j) const {
    return cols[2 * (j * num_beams + i)];
  }
  double im(std::size_t i, std::size_t j) const {
    return cols[2 * (j * num_beams + i) + 1];
  }
};

// One block-fading realization for a whole cell: the serving beam set, each
// user's serving channel row vector, and the resulting SINR matrix.
//
// Interfering cells never appear as explicit channel vectors here. Because
// each interferer transmits on its own unitary beam set and the channel to it
// is isotropic Gaussian, the per-cell interference power sum_i |h phi_i|^2
// collapses to ||h||^2, so only that scalar is kept (one entry per interfering
// cell, in profile order). compute_sinr() below evaluates the uncollapsed
// expression and the tests hold the two paths together to 1e-12.
struct ChannelDraw {
  std::size_t num_beams = 0;
  BeamSet beams;
  // Per user: serving channel, interleaved re/im, length 2*num_beams.
  std::vector<std::vector<double>> serving;
  // Per user: ||h^(b)||^2 for each of its interfering cells.
  std::vector<std::vector<double>> interferer_power;
  // Row-major num_users x num_beams.
  std::vector<double> sinr;
};

// Haar-random beam set for the serving cell, drawn from the (seed, trial)
// substream. An M x M complex Gaussian matrix is orthonormalized column by
// column; normalization makes the implied triangular factor's diagonal real
// and positive, which pins the decomposition down uniquely and leaves the
// factor Haar-distributed. Throws std::invalid_argument if num_beams < 1.
BeamSet draw_beams(std::size_t num_beams, std::uint64_t seed,
                   std::uint64_t trial);

// Beam set of interfering cell `cell` (numbered from 1) as seen by `user`.
// The configuration carries no cross-user cell identity, so interferer beam
// sets are drawn independently per (user, cell); under the unitary-invariance
// collapse above this choice cannot affect any distribution.
BeamSet draw_interferer_beams(std::size_t num_beams, std::uint64_t seed,
                              std::uint64_t trial, std::uint32_t user,
                              std::uint32_t cell);

// Serving-cell channel row vector for one user: num_beams i.i.d. standard
// complex Gaussian entries (re and im each N(0, 1/2), so E|h_j|^2 = 1),
// interleaved re/im. The stream depends only on (seed, trial, user), never on
// how many interferers the scenario lists.
std::vector<double> draw_serving_vector(std::size_t num_beams,
                                        std::uint64_t seed,
                                        std::uint64_t trial,
                                        std::uint32_t user);

// Channel row vector from interfering cell `cell` (numbered from 1) to
// `user`, same distribution and layout as the serving vector.
std::vector<double> draw_interferer_vector(std::size_t num_beams,
                                           std::uint64_t seed,
                                           std::uint64_t trial,
                                           std::uint32_t user,
                                           std::uint32_t cell);

// One full realization for the scenario: beams, serving vectors, per-cell
// interference powers, and the SINR matrix
//   sinr[k][m] = rho0 * |h phi_m|^2
//              / (rho0 * sum_{i != m} |h phi_i|^2 + sum_b rho_b ||h^b||^2 + 1)
// where the intercell term uses the power collapse documented on ChannelDraw.
ChannelDraw draw_channel(const Scenario& s, std::uint64_t seed,
                         std::uint64_t trial);

// SINR matrix evaluated without the power collapse: the intercell term is
// sum_b rho_b sum_i |h^b phi_i^b|^2 over each interferer's own beam set.
// Inputs are per user: serving[k] is a 2M vector, interferer_channels[k] and
// interferer_beams[k] hold one entry per interfering cell of user k. Returns
// row-major num_users x num_beams. Throws std::invalid_argument on any
// dimension mismatch.
std::vector<double> compute_sinr(
    const Scenario& s, const BeamSet& beams,
    const std::vector<std::vector<double>>& serving,
    const std::vector<std::vector<std::vector<double>>>& interferer_channels,
    const std::vector<std::vector<BeamSet>>& interferer_beams);

}  // namespace rblab
