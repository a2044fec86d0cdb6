// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/scenario.hpp"

namespace rblab {

// Largest population for which the Monte Carlo concentration check will
// run. Beyond this the per-trial scheduling cost dominates the sweep, and
// the analytic columns remain available for any K0.
inline constexpr long long kConcentrationMcMaxUsers = 10000;

// One grid point of a user-count sweep following how the individual sum
// rate approaches its M log log K0 growth. SINR levels and the window
// endpoints live on the linear SINR axis; rates are bits per channel use.
struct ScalingRow {
  long long k0 = 0;
  // Exact level crossing 1 - F(w) = 1/K0 and the crossings of the two
  // distribution bounds (w_lb from the upper bound, w_ub from the lower).
  double w = 0.0;
  double w_lb = 0.0;
  double w_ub = 0.0;
  // Two-term expansion rho_0 ln K0 - rho_0 ((J+1)M - 1) ln ln K0.
  double w_two_term = 0.0;
  // High-probability window for the winner SINR among K0 statistically
  // identical users; see concentration_window.
  double lo = 0.0;
  double hi = 0.0;
  // Individual sum rate via the quadrature path (no user-count cap).
  double rate_bits = 0.0;
  // rate_bits / (M log2(e) ln ln K0); tends to 1 as K0 grows.
  double scaling_ratio = 0.0;
  // M log2(1 + w + rho_0 ln ln K0), an upper bound on rate_bits.
  double eq27_bound = 0.0;
  // Fraction of scheduled winner SINRs inside [lo, hi], measured by Monte
  // Carlo. NaN when the check was not requested or K0 exceeds the cap.
  double mc_in_window_freq = 0.0;
};

struct ScalingSweep {
  std::vector<ScalingRow> rows;
};

// Window that traps the winner SINR with probability 1 - O(1/ln K0) when
// K0 users share the distribution d:
//   lo = rho_0 ln K0 - rho_0 (J+1) M ln ln K0
//   hi = rho_0 ln K0 - rho_0 ((J+1)M - 2) ln ln K0
// so hi - lo = 2 rho_0 ln ln K0. Terms of order ln ln ln K0 are dropped,
// which is why containment tests fit the leading constant instead of
// asserting it is zero. Throws std::domain_error for K0 < 16 (the window
// needs ln ln K0 > 0).
std::pair<double, double> concentration_window(const SinrDistribution& d,
                                               long long k0);

// Fraction of (trial, beam) slots whose scheduled SINR lands inside the
// concentration window, for a homogeneous population of k0 users sharing
// profile's statistics. Deterministic in (profile, k0, trials, seed).
// Throws std::domain_error for k0 < 16, std::invalid_argument for trials
// < 1 or k0 > kConcentrationMcMaxUsers.
double concentration_frequency(const UserChannelProfile& profile,
                               int num_antennas, long long k0,
                               long long trials, std::uint64_t seed);

// Evaluates every ScalingRow column for user `user` of scenario s on the
// given grid. The grid must be strictly increasing with minimum >= 16.
// mc_trials > 0 enables the Monte Carlo window check for grid points up to
// kConcentrationMcMaxUsers. Throws ScenarioError for an invalid scenario,
// std::invalid_argument for a bad user index or grid.
ScalingSweep scaling_ratio_sweep(const Scenario& s, int user,
                                 const std::vector<long long>& k0_grid,
                                 long long mc_trials = 0,
                                 std::uint64_t seed = 0);

// Numerical probe of the Gumbel domain-of-attraction condition along
// x = 10^j, j = 0..8. criterion[j] is the analytic derivative of the
// growth function; von_mises[j] is (F-1) f'/f^2 evaluated through a
// finite difference of log f, an independent path that must approach 1.
struct GumbelAttractionReport {
  std::vector<double> x;
  std::vector<double> criterion;
  std::vector<double> von_mises;
  bool criterion_monotone = false;  // |criterion| non-increasing past x=100
  bool criterion_vanishes = false;  // |criterion| < 1e-9 at x = 1e8
  bool von_mises_near_one = false;  // |von_mises - 1| < 1e-6 from x = 1e6 on
  bool passed = false;
};

GumbelAttractionReport gumbel_attraction_check(const SinrDistribution& d);

}  // namespace rblab
