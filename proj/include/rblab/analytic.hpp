// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rblab/scenario.hpp"

namespace rblab {

// Per-beam SINR distribution of one user: M antennas, serving SNR rho_0,
// interferer SNRs rho_b. The tail is
//   T(x) = exp(-x/rho_0) * (1+x)^-(M-1) * prod_b (1 + x/r_b)^-M,
// with ratio r_b = rho_0 / rho_b, and F = 1 - T. Evaluation happens in
// log space throughout; see log_tail().
struct SinrDistribution {
  int num_antennas = 1;
  double rho_serving = 1.0;
  std::vector<double> rho_interferers;

  // Distinct roots of the tail's denominator among {1} and {r_b}, merged at
  // relative tolerance 1e-12. multiplicity counts M-1 for the root at 1 plus
  // M per interferer root that lands there; roots with zero total are
  // dropped (M=1 with no coinciding interferer).
  struct Pole {
    double location;
    int multiplicity;
  };
  std::vector<Pole> poles;
};

// Builds the distribution and its merged pole list. Throws ScenarioError on
// non-positive inputs or M < 1.
SinrDistribution make_distribution(int num_antennas, double rho_serving,
                                   std::vector<double> rho_interferers);
SinrDistribution user_distribution(const Scenario& s, int user);

// log T(x) = -x/rho_0 - sum_i n_i * log1p(x / a_i). Finite for all x >= 0
// even when T itself underflows.
double log_tail(const SinrDistribution& d, double x);

// F(x) = -expm1(log_tail(x)). Throws std::domain_error for x < 0.
double cdf_sinr(const SinrDistribution& d, double x);

// f(x) = T(x) * hazard(x) with hazard = 1/rho_0 + sum_i n_i/(x + a_i).
double pdf_sinr(const SinrDistribution& d, double x);

// MGF of the interference-plus-self term:
//   (1 - rho_0 tau)^-(M-1) * prod_b (1 - rho_b tau)^-M.
// Throws std::domain_error at or beyond a pole of a contributing factor.
double mgf_interference(const SinrDistribution& d, double tau);

// Sandwich tail bounds built from the extreme SNR among the serving cell
// and all interferers: replacing every ratio by the one from rho_min gives a
// pointwise lower bound on F, rho_max an upper bound, both with exponent
// (J+1)M - 1. Returns (lb, ub) with lb <= cdf_sinr(x) <= ub.
struct CdfBounds {
  double lb, ub;
};
CdfBounds cdf_bounds(const SinrDistribution& d, double x);

// g(x) = (1 - F)/f = 1/hazard(x). Strictly positive, tends to rho_0.
double growth_function(const SinrDistribution& d, double x);

// d/dx of growth_function; tends to 0 from above (Gumbel domain check).
double gumbel_criterion(const SinrDistribution& d, double x);

// Level crossing 1 - F(w) = 1/K0 and the matching crossings of the two
// bounds (the rho_min bound yields w_ub, the rho_max bound w_lb).
struct LevelCrossing {
  long long k0;
  double w, w_lb, w_ub;
};
LevelCrossing solve_level(const SinrDistribution& d, long long k0);

// Two-term growth of w in K0 plus the bound expansions that keep the
// constant inside the iterated logarithm:
//   w_two_term     = rho_0 ln K0 - rho_0 ((J+1)M - 1) ln ln K0
//   w_ub_expansion = rho_0 ln K0 - rho_0 ((J+1)M - 1) ln(rho_min ln K0)
//   w_lb_expansion = rho_0 ln K0 - rho_0 ((J+1)M - 1) ln(rho_max ln K0)
// Natural logarithms. Requires K0 >= 16 so that ln ln K0 > 0.
struct AsymptoticLevel {
  double w_two_term, w_ub_expansion, w_lb_expansion;
};
AsymptoticLevel asymptotic_level(const SinrDistribution& d, long long k0);

}  // namespace rblab
