// SPDX-License-Identifier: Apache-2.0
//
// Sweep harness for the large-population behaviour of the scheduled
// system: level crossings and their expansions, the winner-SINR
// concentration window, the rate's approach to M log log K0 growth, and a
// numerical check that the SINR law lies in the Gumbel domain of
// attraction.

#include "rblab/scaling.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rblab/rate.hpp"
#include "rblab/sched.hpp"

namespace rblab {

std::pair<double, double> concentration_window(const SinrDistribution& d,
                                               long long k0) {
  if (k0 < 16) {
    throw std::domain_error(
        "concentration_window: population must be at least 16, got " +
        std::to_string(k0));
  }
  const double lnk = std::log(static_cast<double>(k0));
  const double lnlnk = std::log(lnk);
  const double jm =
      static_cast<double>(d.rho_interferers.size() + 1) * d.num_antennas;
  const double lo = d.rho_serving * lnk - d.rho_serving * jm * lnlnk;
  const double hi = d.rho_serving * lnk - d.rho_serving * (jm - 2.0) * lnlnk;
  return {lo, hi};
}

double concentration_frequency(const UserChannelProfile& profile,
                               int num_antennas, long long k0,
                               long long trials, std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument(
        "concentration_frequency: trials must be positive");
  }
  if (k0 > kConcentrationMcMaxUsers) {
    throw std::invalid_argument(
        "concentration_frequency: population " + std::to_string(k0) +
        " exceeds the Monte Carlo cap of " +
        std::to_string(kConcentrationMcMaxUsers));
  }
  const auto d = make_distribution(num_antennas, profile.rho_serving,
                                   profile.rho_interferers);
  const auto [lo, hi] = concentration_window(d, k0);

  Scenario mc;
  mc.num_antennas = num_antennas;
  mc.users.reserve(static_cast<size_t>(k0));
  for (long long k = 0; k < k0; k++) {
    mc.users.push_back({static_cast<int>(k), profile.rho_serving,
                        profile.rho_interferers});
  }

  // Trial indices are disjoint across workers, so a relaxed counter is
  // enough; the total is order-independent.
  std::atomic<long long> hits{0};
  simulate(mc, trials, seed, 0,
           [&](std::uint64_t, const ScheduleOutcome& outcome) {
             long long in = 0;
             for (double z : outcome.true_sinr)
               if (z >= lo && z <= hi) in++;
             if (in) hits.fetch_add(in, std::memory_order_relaxed);
           });
  return static_cast<double>(hits.load()) /
         (static_cast<double>(trials) * num_antennas);
}

ScalingSweep scaling_ratio_sweep(const Scenario& s, int user,
                                 const std::vector<long long>& k0_grid,
                                 long long mc_trials, std::uint64_t seed) {
  validate_or_throw(s);
  if (user < 0 || user >= static_cast<int>(s.users.size()))
    throw std::invalid_argument("scaling_ratio_sweep: no user " +
                                std::to_string(user));
  if (k0_grid.empty())
    throw std::invalid_argument("scaling_ratio_sweep: empty k0 grid");
  long long prev = 0;
  for (long long k0 : k0_grid) {
    if (k0 < 16)
      throw std::invalid_argument(
          "scaling_ratio_sweep: grid minimum is 16, got " +
          std::to_string(k0));
    if (k0 <= prev)
      throw std::invalid_argument(
          "scaling_ratio_sweep: grid must be strictly increasing");
    prev = k0;
  }

  const auto d = user_distribution(s, user);
  const double m = s.num_antennas;
  ScalingSweep sweep;
  sweep.rows.reserve(k0_grid.size());
  for (long long k0 : k0_grid) {
    ScalingRow row;
    row.k0 = k0;
    const LevelCrossing lc = solve_level(d, k0);
    row.w = lc.w;
    row.w_lb = lc.w_lb;
    row.w_ub = lc.w_ub;
    row.w_two_term = asymptotic_level(d, k0).w_two_term;
    const auto [lo, hi] = concentration_window(d, k0);
    row.lo = lo;
    row.hi = hi;
    row.rate_bits = individual_sum_rate_quadrature(s, user, k0);
    const double lnlnk = std::log(std::log(static_cast<double>(k0)));
    row.scaling_ratio = row.rate_bits / (m * std::numbers::log2e * lnlnk);
    row.eq27_bound =
        m * std::log2(1.0 + row.w + d.rho_serving * lnlnk);
    row.mc_in_window_freq = std::numeric_limits<double>::quiet_NaN();
    if (mc_trials > 0 && k0 <= kConcentrationMcMaxUsers) {
      row.mc_in_window_freq = concentration_frequency(
          s.users[user], s.num_antennas, k0, mc_trials, seed);
    }
    sweep.rows.push_back(row);
  }
  return sweep;
}

GumbelAttractionReport gumbel_attraction_check(const SinrDistribution& d) {
  GumbelAttractionReport rep;
  for (int j = 0; j <= 8; j++) {
    const double x = std::pow(10.0, j);
    rep.x.push_back(x);
    rep.criterion.push_back(gumbel_criterion(d, x));

    // (F-1) f'/f^2 = -g(x) * d/dx log f(x), and log f = log T - log g is
    // finite far beyond the point where f itself underflows. The central
    // difference keeps this an independent probe of the density's slope
    // rather than a restatement of the analytic derivative.
    const double h = std::max(1e-3, 1e-5 * x);
    const auto log_density = [&](double t) {
      return log_tail(d, t) - std::log(growth_function(d, t));
    };
    const double slope =
        (log_density(x + h) - log_density(x - h)) / (2.0 * h);
    rep.von_mises.push_back(-growth_function(d, x) * slope);
  }

  rep.criterion_monotone = true;
  for (size_t j = 2; j + 1 < rep.criterion.size(); j++) {
    if (std::fabs(rep.criterion[j + 1]) > std::fabs(rep.criterion[j]))
      rep.criterion_monotone = false;
  }
  rep.criterion_vanishes = std::fabs(rep.criterion.back()) < 1e-9;
  rep.von_mises_near_one = true;
  for (size_t j = 0; j < rep.x.size(); j++) {
    if (rep.x[j] >= 1e6 && std::fabs(rep.von_mises[j] - 1.0) > 1e-6)
      rep.von_mises_near_one = false;
  }
  rep.passed = rep.criterion_monotone && rep.criterion_vanishes &&
               rep.von_mises_near_one;
  return rep;
}

}  // namespace rblab
