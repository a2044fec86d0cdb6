// SPDX-License-Identifier: Apache-2.0

#include "rblab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rblab {

namespace {

void require_nonneg(double x) {
  if (!(x >= 0)) throw std::domain_error("x must be nonnegative");
}

// 1/rho_0 + sum_i n_i / (x + a_i): hazard rate of the SINR distribution.
double hazard(const SinrDistribution& d, double x) {
  double h = 1.0 / d.rho_serving;
  for (const auto& p : d.poles) h += p.multiplicity / (x + p.location);
  return h;
}

double log_tail_bound(double x, double rho0, double rho_extreme, int n) {
  return -x / rho0 - n * std::log1p((rho_extreme / rho0) * x);
}

// Bisection for log_t(w) = target on a strictly decreasing function.
// The bracket grows by doubling if the initial hint is too small.
template <typename F>
double solve_decreasing(F&& log_t, double target, double hi_hint) {
  double lo = 0.0, hi = hi_hint;
  while (log_t(hi) > target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e308) throw std::runtime_error("level bracket exhausted");
  }
  for (int it = 0; it < 200; it++) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double grid exhausted
    (log_t(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SinrDistribution make_distribution(int num_antennas, double rho_serving,
                                   std::vector<double> rho_interferers) {
  if (num_antennas < 1) throw ScenarioError("num_antennas must be at least 1");
  if (!(rho_serving > 0) || !std::isfinite(rho_serving))
    throw ScenarioError("rho_serving must be positive and finite");
  for (double r : rho_interferers)
    if (!(r > 0) || !std::isfinite(r))
      throw ScenarioError("rho_interferers entries must be positive and finite");

  SinrDistribution d;
  d.num_antennas = num_antennas;
  d.rho_serving = rho_serving;
  d.rho_interferers = std::move(rho_interferers);

  // Merge {1} and the ratios r_b at relative tolerance 1e-12. The serving
  // root at 1 starts the list so a coinciding interferer keeps the exact
  // location 1.
  d.poles.push_back({1.0, num_antennas - 1});
  for (double rho_b : d.rho_interferers) {
    double r = d.rho_serving / rho_b;
    bool merged = false;
    for (auto& p : d.poles) {
      if (std::abs(r - p.location) <= 1e-12 * std::max(r, p.location)) {
        p.multiplicity += num_antennas;
        merged = true;
        break;
      }
    }
    if (!merged) d.poles.push_back({r, num_antennas});
  }
  std::erase_if(d.poles, [](const auto& p) { return p.multiplicity <= 0; });
  std::sort(d.poles.begin(), d.poles.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });
  return d;
}

SinrDistribution user_distribution(const Scenario& s, int user) {
  if (user < 0 || user >= static_cast<int>(s.users.size()))
    throw ScenarioError("user index out of range");
  const auto& u = s.users[user];
  return make_distribution(s.num_antennas, u.rho_serving, u.rho_interferers);
}

double log_tail(const SinrDistribution& d, double x) {
  double lt = -x / d.rho_serving;
  for (const auto& p : d.poles)
    lt -= p.multiplicity * std::log1p(x / p.location);
  return lt;
}

double cdf_sinr(const SinrDistribution& d, double x) {
  require_nonneg(x);
  return -std::expm1(log_tail(d, x));
}

double pdf_sinr(const SinrDistribution& d, double x) {
  require_nonneg(x);
  return std::exp(log_tail(d, x)) * hazard(d, x);
}

double mgf_interference(const SinrDistribution& d, double tau) {
  double log_psi = 0.0;
  if (d.num_antennas > 1) {
    double f = 1.0 - d.rho_serving * tau;
    if (f <= 0) throw std::domain_error("tau at or beyond an MGF pole");
    log_psi -= (d.num_antennas - 1) * std::log(f);
  }
  for (double rho_b : d.rho_interferers) {
    double f = 1.0 - rho_b * tau;
    if (f <= 0) throw std::domain_error("tau at or beyond an MGF pole");
    log_psi -= d.num_antennas * std::log(f);
  }
  return std::exp(log_psi);
}

CdfBounds cdf_bounds(const SinrDistribution& d, double x) {
  require_nonneg(x);
  double rmin = d.rho_serving, rmax = d.rho_serving;
  for (double r : d.rho_interferers) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  int n = (static_cast<int>(d.rho_interferers.size()) + 1) * d.num_antennas - 1;
  return {-std::expm1(log_tail_bound(x, d.rho_serving, rmin, n)),
          -std::expm1(log_tail_bound(x, d.rho_serving, rmax, n))};
}

double growth_function(const SinrDistribution& d, double x) {
  require_nonneg(x);
  return 1.0 / hazard(d, x);
}

double gumbel_criterion(const SinrDistribution& d, double x) {
  require_nonneg(x);
  double h = hazard(d, x);
  double hprime = 0.0;
  for (const auto& p : d.poles) {
    double t = x + p.location;
    hprime += p.multiplicity / (t * t);
  }
  return hprime / (h * h);
}

LevelCrossing solve_level(const SinrDistribution& d, long long k0) {
  if (k0 < 2) throw std::invalid_argument("k0 must be at least 2");
  double lnk = std::log(static_cast<double>(k0));
  int jm = (static_cast<int>(d.rho_interferers.size()) + 1) * d.num_antennas;
  double hint = d.rho_serving * (lnk + jm * std::log1p(lnk)) + 64.0;

  double rmin = d.rho_serving, rmax = d.rho_serving;
  for (double r : d.rho_interferers) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  LevelCrossing lc;
  lc.k0 = k0;
  // The bound built from rho_min has the smaller CDF, so its crossing lies
  // to the right of w; rho_max gives the left bracket.
  lc.w_ub = solve_decreasing(
      [&](double x) { return log_tail_bound(x, d.rho_serving, rmin, jm - 1); },
      -lnk, hint);
  lc.w_lb = solve_decreasing(
      [&](double x) { return log_tail_bound(x, d.rho_serving, rmax, jm - 1); },
      -lnk, hint);
  lc.w = solve_decreasing([&](double x) { return log_tail(d, x); }, -lnk, hint);
  return lc;
}

AsymptoticLevel asymptotic_level(const SinrDistribution& d, long long k0) {
  if (k0 < 16) throw std::invalid_argument("k0 must be at least 16");
  double lnk = std::log(static_cast<double>(k0));
  double rmin = d.rho_serving, rmax = d.rho_serving;
  for (double r : d.rho_interferers) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  double n = (d.rho_interferers.size() + 1.0) * d.num_antennas - 1.0;
  double rho0 = d.rho_serving;
  return {rho0 * lnk - rho0 * n * std::log(lnk),
          rho0 * lnk - rho0 * n * std::log(rmin * lnk),
          rho0 * lnk - rho0 * n * std::log(rmax * lnk)};
}

}  // namespace rblab
