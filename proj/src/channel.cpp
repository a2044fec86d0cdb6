// SPDX-License-Identifier: Apache-2.0

#include "rblab/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "channel_internal.hpp"
#include "rblab/kernels.hpp"

namespace rblab {

namespace chan {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// n_words is always even here: one counter block yields two 64-bit words.
void draw_uniforms(const kern::KernelOps& ops, std::size_t n_words,
                   std::uint64_t seed, std::uint64_t trial,
                   std::uint32_t stream, Workspace& ws) {
  ws.bits.resize(n_words);
  ws.u.resize(n_words);
  ops.philox_bits(start_counter(trial, stream), seed, n_words / 2,
                  ws.bits.data());
  ops.u01(ws.bits.data(), n_words, ws.u.data());
}

}  // namespace

void fill_gaussian_row(const kern::KernelOps& ops, double* h, std::size_t m,
                       std::uint64_t seed, std::uint64_t trial,
                       std::uint32_t stream, Workspace& ws) {
  draw_uniforms(ops, 2 * m, seed, trial, stream, ws);
  for (std::size_t j = 0; j < m; j++) {
    const double r = std::sqrt(-std::log(ws.u[2 * j]));
    const double t = two_pi * ws.u[2 * j + 1];
    h[2 * j] = r * std::cos(t);
    h[2 * j + 1] = r * std::sin(t);
  }
}

void fill_beams(const kern::KernelOps& ops, double* cols, std::size_t m,
                std::uint64_t seed, std::uint64_t trial, std::uint32_t stream,
                Workspace& ws) {
  draw_uniforms(ops, 2 * m * m, seed, trial, stream, ws);
  for (std::size_t e = 0; e < m * m; e++) {
    const double r = std::sqrt(-std::log(ws.u[2 * e]));
    const double t = two_pi * ws.u[2 * e + 1];
    cols[2 * e] = r * std::cos(t);
    cols[2 * e + 1] = r * std::sin(t);
  }
  for (std::size_t j = 0; j < m; j++) {
    double* vj = cols + 2 * j * m;
    // Two sweeps: one pass of modified Gram-Schmidt leaves residual
    // components of order eps * (conditioning), the second pass removes them,
    // keeping pairwise inner products near machine precision.
    for (int sweep = 0; sweep < 2; sweep++) {
      for (std::size_t i = 0; i < j; i++) {
        const double* qi = cols + 2 * i * m;
        double cre = 0.0, cim = 0.0;
        for (std::size_t e = 0; e < m; e++) {
          cre += qi[2 * e] * vj[2 * e] + qi[2 * e + 1] * vj[2 * e + 1];
          cim += qi[2 * e] * vj[2 * e + 1] - qi[2 * e + 1] * vj[2 * e];
        }
        for (std::size_t e = 0; e < m; e++) {
          vj[2 * e] -= cre * qi[2 * e] - cim * qi[2 * e + 1];
          vj[2 * e + 1] -= cre * qi[2 * e + 1] + cim * qi[2 * e];
        }
      }
    }
    double nsq = 0.0;
    for (std::size_t e = 0; e < 2 * m; e++) nsq += vj[e] * vj[e];
    const double scale = 1.0 / std::sqrt(nsq);
    for (std::size_t e = 0; e < 2 * m; e++) vj[e] *= scale;
  }
}

double interference_power(const kern::KernelOps& ops, std::size_t m,
                          std::uint64_t seed, std::uint64_t trial,
                          std::uint32_t stream, Workspace& ws) {
  draw_uniforms(ops, 2 * m, seed, trial, stream, ws);
  double acc = 0.0;
  double prod = 1.0;
  for (std::size_t j = 0; j < m; j++) {
    prod *= ws.u[2 * j];
    if (prod < 1e-280) {
      acc -= std::log(prod);
      prod = 1.0;
    }
  }
  return acc - std::log(prod);
}

}  // namespace chan

namespace {

void require_beams(std::size_t num_beams) {
  if (num_beams < 1)
    throw std::invalid_argument("num_beams must be at least 1");
}

void require_cell(std::uint32_t cell) {
  if (cell < 1)
    throw std::invalid_argument("interfering cells are numbered from 1");
}

}  // namespace

BeamSet draw_beams(std::size_t num_beams, std::uint64_t seed,
                   std::uint64_t trial) {
  require_beams(num_beams);
  BeamSet b;
  b.num_beams = num_beams;
  b.cols.resize(2 * num_beams * num_beams);
  chan::Workspace ws;
  chan::fill_beams(kern::active(), b.cols.data(), num_beams, seed, trial,
                   kern::pack_stream(kern::Purpose::serving_beams, 0, 0), ws);
  return b;
}

BeamSet draw_interferer_beams(std::size_t num_beams, std::uint64_t seed,
                              std::uint64_t trial, std::uint32_t user,
                              std::uint32_t cell) {
  require_beams(num_beams);
  require_cell(cell);
  BeamSet b;
  b.num_beams = num_beams;
  b.cols.resize(2 * num_beams * num_beams);
  chan::Workspace ws;
  chan::fill_beams(
      kern::active(), b.cols.data(), num_beams, seed, trial,
      kern::pack_stream(kern::Purpose::interferer_beams, user, cell), ws);
  return b;
}

std::vector<double> draw_serving_vector(std::size_t num_beams,
                                        std::uint64_t seed,
                                        std::uint64_t trial,
                                        std::uint32_t user) {
  require_beams(num_beams);
  std::vector<double> h(2 * num_beams);
  chan::Workspace ws;
  chan::fill_gaussian_row(
      kern::active(), h.data(), num_beams, seed, trial,
      kern::pack_stream(kern::Purpose::serving_channel, user, 0), ws);
  return h;
}

std::vector<double> draw_interferer_vector(std::size_t num_beams,
                                           std::uint64_t seed,
                                           std::uint64_t trial,
                                           std::uint32_t user,
                                           std::uint32_t cell) {
  require_beams(num_beams);
  require_cell(cell);
  std::vector<double> h(2 * num_beams);
  chan::Workspace ws;
  chan::fill_gaussian_row(
      kern::active(), h.data(), num_beams, seed, trial,
      kern::pack_stream(kern::Purpose::interferer_channel, user, cell), ws);
  return h;
}

ChannelDraw draw_channel(const Scenario& s, std::uint64_t seed,
                         std::uint64_t trial) {
  validate_or_throw(s);
  const auto& ops = kern::active();
  const std::size_t m = static_cast<std::size_t>(s.num_antennas);
  const std::size_t k0 = s.users.size();

  ChannelDraw d;
  d.num_beams = m;
  d.beams.num_beams = m;
  d.beams.cols.resize(2 * m * m);
  d.serving.resize(k0);
  d.interferer_power.resize(k0);
  d.sinr.resize(k0 * m);

  chan::Workspace ws;
  chan::fill_beams(ops, d.beams.cols.data(), m, seed, trial,
                   kern::pack_stream(kern::Purpose::serving_beams, 0, 0), ws);

  std::vector<double> proj(m);
  for (std::size_t k = 0; k < k0; k++) {
    const auto& prof = s.users[k];
    const auto user = static_cast<std::uint32_t>(k);
    d.serving[k].resize(2 * m);
    chan::fill_gaussian_row(
        ops, d.serving[k].data(), m, seed, trial,
        kern::pack_stream(kern::Purpose::serving_channel, user, 0), ws);

    const std::size_t jk = prof.rho_interferers.size();
    d.interferer_power[k].resize(jk);
    double cross = 1.0;
    for (std::size_t b = 0; b < jk; b++) {
      const double p = chan::interference_power(
          ops, m, seed, trial,
          kern::pack_stream(kern::Purpose::interferer_channel, user,
                            static_cast<std::uint32_t>(b + 1)),
          ws);
      d.interferer_power[k][b] = p;
      cross += prof.rho_interferers[b] * p;
    }
    chan::sinr_row(ops, d.serving[k].data(), d.beams.cols.data(), m,
                   prof.rho_serving, cross, proj.data(), &d.sinr[k * m]);
  }
  return d;
}

std::vector<double> compute_sinr(
    const Scenario& s, const BeamSet& beams,
    const std::vector<std::vector<double>>& serving,
    const std::vector<std::vector<std::vector<double>>>& interferer_channels,
    const std::vector<std::vector<BeamSet>>& interferer_beams) {
  validate_or_throw(s);
  const std::size_t m = static_cast<std::size_t>(s.num_antennas);
  const std::size_t k0 = s.users.size();
  if (beams.num_beams != m || beams.cols.size() != 2 * m * m)
    throw std::invalid_argument("beam set does not match num_antennas");
  if (serving.size() != k0 || interferer_channels.size() != k0 ||
      interferer_beams.size() != k0)
    throw std::invalid_argument("per-user inputs do not match the user count");

  // |<h, column j of bs>|^2, written out longhand so this path shares no
  // arithmetic with the kernel-backed production path it cross-checks.
  auto proj_sq = [m](const std::vector<double>& h, const BeamSet& bs,
                     std::size_t j) {
    double re = 0.0, im = 0.0;
    for (std::size_t e = 0; e < m; e++) {
      const double br = bs.cols[2 * (j * m + e)];
      const double bi = bs.cols[2 * (j * m + e) + 1];
      re += h[2 * e] * br - h[2 * e + 1] * bi;
      im += h[2 * e] * bi + h[2 * e + 1] * br;
    }
    return re * re + im * im;
  };

  std::vector<double> z(k0 * m);
  std::vector<double> p(m);
  for (std::size_t k = 0; k < k0; k++) {
    const auto& prof = s.users[k];
    const std::size_t jk = prof.rho_interferers.size();
    if (serving[k].size() != 2 * m)
      throw std::invalid_argument("serving vector has wrong dimension");
    if (interferer_channels[k].size() != jk || interferer_beams[k].size() != jk)
      throw std::invalid_argument(
          "interferer inputs do not match the user's interferer count");

    for (std::size_t i = 0; i < m; i++) p[i] = proj_sq(serving[k], beams, i);

    double cross = 0.0;
    for (std::size_t b = 0; b < jk; b++) {
      const auto& hb = interferer_channels[k][b];
      const auto& bb = interferer_beams[k][b];
      if (hb.size() != 2 * m || bb.num_beams != m ||
          bb.cols.size() != 2 * m * m)
        throw std::invalid_argument("interferer entry has wrong dimension");
      double cell_power = 0.0;
      for (std::size_t i = 0; i < m; i++) cell_power += proj_sq(hb, bb, i);
      cross += prof.rho_interferers[b] * cell_power;
    }

    for (std::size_t mm = 0; mm < m; mm++) {
      double intra = 0.0;
      for (std::size_t i = 0; i < m; i++)
        if (i != mm) intra += p[i];
      z[k * m + mm] = prof.rho_serving * p[mm] /
                      (prof.rho_serving * intra + cross + 1.0);
    }
  }
  return z;
}

}  // namespace rblab
