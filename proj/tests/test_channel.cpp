// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/channel.hpp"
#include "rblab/scenario.hpp"
#include "testutil.hpp"

using namespace rblab;

namespace {

Scenario single_user(int m, double rho0, std::vector<double> rho_i = {}) {
  Scenario s;
  s.num_antennas = m;
  s.users.push_back({0, rho0, std::move(rho_i)});
  return s;
}

// max_{i,j} |<phi_i, phi_j> - delta_ij|
double gram_defect(const BeamSet& b) {
  const std::size_t m = b.num_beams;
  double worst = 0.0;
  for (std::size_t i = 0; i < m; i++) {
    for (std::size_t j = 0; j < m; j++) {
      double re = 0.0, im = 0.0;
      for (std::size_t e = 0; e < m; e++) {
        re += b.re(e, i) * b.re(e, j) + b.im(e, i) * b.im(e, j);
        im += b.re(e, i) * b.im(e, j) - b.im(e, i) * b.re(e, j);
      }
      const double want = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::hypot(re - want, im));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("beam sets are orthonormal") {
  for (std::uint64_t trial = 0; trial < 5; trial++) {
    CHECK(gram_defect(draw_beams(4, 7, trial)) < 1e-10);
    CHECK(gram_defect(draw_interferer_beams(3, 7, trial, 2, 1)) < 1e-10);
  }
  // A single beam is just a normalized complex scalar.
  auto b1 = draw_beams(1, 7, 0);
  CHECK(std::abs(b1.re(0, 0) * b1.re(0, 0) + b1.im(0, 0) * b1.im(0, 0) - 1.0) <
        1e-14);
}

TEST_CASE("beam entries follow the Haar column law") {
  // For a 2x2 Haar unitary the first column is uniform on the complex unit
  // sphere, so the squared modulus of its first entry is uniform on [0,1].
  const std::size_t n = 100000;
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; t++) {
    auto b = draw_beams(2, 11, t);
    v[t] = b.re(0, 0) * b.re(0, 0) + b.im(0, 0) * b.im(0, 0);
  }
  const double d = testutil::ks_statistic(std::move(v), [](double x) {
    return std::min(std::max(x, 0.0), 1.0);
  });
  CHECK(d < testutil::ks_critical_1pct(n));
}

TEST_CASE("single-antenna sinr is exponential") {
  // M=1, no interferers: Z = rho * |h|^2 with |h|^2 standard exponential.
  auto s = single_user(1, 2.0);
  const std::size_t n = 100000;
  std::vector<double> z(n);
  for (std::size_t t = 0; t < n; t++) z[t] = draw_channel(s, 3, t).sinr[0];
  const double d = testutil::ks_statistic(
      std::move(z), [](double x) { return -std::expm1(-x / 2.0); });
  CHECK(d < testutil::ks_critical_1pct(n));
}

TEST_CASE("sinr matches the analytic distribution") {
  SUBCASE("two beams, no interferers") {
    auto s = single_user(2, 1.0);
    auto dist = make_distribution(2, 1.0, {});
    const std::size_t n = 200000;
    std::vector<double> z(n);
    // Only beam 0 of each trial, so the samples are independent.
    for (std::size_t t = 0; t < n; t++) z[t] = draw_channel(s, 5, t).sinr[0];
    const double d = testutil::ks_statistic(
        std::move(z), [&](double x) { return cdf_sinr(dist, x); });
    CHECK(d < testutil::ks_critical_1pct(n));
  }
  SUBCASE("single antenna, two heterogeneous interferers") {
    auto s = single_user(1, 2.0, {1.0, 0.25});
    auto dist = make_distribution(1, 2.0, {1.0, 0.25});
    const std::size_t n = 100000;
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; t++) z[t] = draw_channel(s, 13, t).sinr[0];
    const double d = testutil::ks_statistic(
        std::move(z), [&](double x) { return cdf_sinr(dist, x); });
    CHECK(d < testutil::ks_critical_1pct(n));
  }
}

TEST_CASE("beam indices are identically distributed") {
  // Z_{k,0} and Z_{k,1} are correlated within a trial, so compare samples
  // taken from disjoint trial ranges.
  auto s = single_user(2, 1.0, {0.7});
  const std::size_t n = 50000;
  std::vector<double> a(n), b(n);
  for (std::size_t t = 0; t < n; t++) a[t] = draw_channel(s, 17, t).sinr[0];
  for (std::size_t t = 0; t < n; t++) b[t] = draw_channel(s, 17, n + t).sinr[1];
  const double d = testutil::ks_two_sample(std::move(a), std::move(b));
  CHECK(d < testutil::ks_two_sample_critical_1pct(n, n));
}

TEST_CASE("aggregate interference equals the per-beam expansion") {
  // The production path collapses each interfering cell's beam sum to the
  // channel norm; evaluating the expansion over explicit interferer beam sets
  // must land on the same SINR to within orthonormalization error.
  Scenario s;
  s.num_antennas = 3;
  s.users.push_back({0, 1.5, {0.5, 2.0}});
  s.users.push_back({1, 0.8, {}});
  s.users.push_back({2, 2.5, {1.0, 0.25, 3.0}});
  const std::size_t m = 3;
  const std::uint64_t seed = 99;

  for (std::uint64_t trial = 0; trial < 100; trial++) {
    auto d = draw_channel(s, seed, trial);

    auto beams = draw_beams(m, seed, trial);
    std::vector<std::vector<double>> serving;
    std::vector<std::vector<std::vector<double>>> ich;
    std::vector<std::vector<BeamSet>> ibs;
    for (std::uint32_t k = 0; k < s.users.size(); k++) {
      serving.push_back(draw_serving_vector(m, seed, trial, k));
      ich.emplace_back();
      ibs.emplace_back();
      for (std::uint32_t b = 1; b <= s.users[k].rho_interferers.size(); b++) {
        ich.back().push_back(draw_interferer_vector(m, seed, trial, k, b));
        ibs.back().push_back(draw_interferer_beams(m, seed, trial, k, b));
      }
    }
    auto z = compute_sinr(s, beams, serving, ich, ibs);

    REQUIRE(z.size() == d.sinr.size());
    for (std::size_t e = 0; e < z.size(); e++) {
      CHECK(d.sinr[e] >= 0.0);
      CHECK(std::abs(z[e] - d.sinr[e]) <=
            1e-12 * std::max(std::abs(z[e]), std::abs(d.sinr[e])));
    }
  }
}

TEST_CASE("draws are deterministic and streams are isolated") {
  Scenario with_interferers;
  with_interferers.num_antennas = 2;
  with_interferers.users.push_back({0, 1.0, {0.5, 0.25}});
  with_interferers.users.push_back({1, 3.0, {}});

  Scenario without;
  without.num_antennas = 2;
  without.users.push_back({0, 1.0, {}});
  without.users.push_back({1, 3.0, {}});

  auto a = draw_channel(with_interferers, 21, 42);
  auto b = draw_channel(with_interferers, 21, 42);
  CHECK(a.sinr == b.sinr);
  CHECK(a.serving == b.serving);
  CHECK(a.beams.cols == b.beams.cols);

  auto c = draw_channel(with_interferers, 21, 43);
  CHECK(a.sinr != c.sinr);

  // Adding interferers must not shift the serving-channel or beam streams;
  // it only changes the SINR through the denominator.
  auto d = draw_channel(without, 21, 42);
  CHECK(a.serving == d.serving);
  CHECK(a.beams.cols == d.beams.cols);
  CHECK(a.sinr[0] < d.sinr[0]);
  CHECK(a.sinr[1 * 2 + 0] == d.sinr[1 * 2 + 0]);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(draw_beams(0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(draw_interferer_beams(2, 1, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(draw_interferer_vector(2, 1, 0, 0, 0),
                  std::invalid_argument);

  auto s = single_user(2, 1.0, {0.5});
  auto beams = draw_beams(2, 1, 0);
  std::vector<std::vector<double>> serving{draw_serving_vector(2, 1, 0, 0)};
  std::vector<std::vector<std::vector<double>>> ich{
      {draw_interferer_vector(2, 1, 0, 0, 1)}};
  std::vector<std::vector<BeamSet>> ibs{{draw_interferer_beams(2, 1, 0, 0, 1)}};

  auto bad_beams = draw_beams(3, 1, 0);
  CHECK_THROWS_AS(compute_sinr(s, bad_beams, serving, ich, ibs),
                  std::invalid_argument);

  auto short_serving = serving;
  short_serving[0].pop_back();
  CHECK_THROWS_AS(compute_sinr(s, beams, short_serving, ich, ibs),
                  std::invalid_argument);

  auto missing_cell = ich;
  missing_cell[0].clear();
  CHECK_THROWS_AS(compute_sinr(s, beams, serving, missing_cell, ibs),
                  std::invalid_argument);
}
