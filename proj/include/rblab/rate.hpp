// SPDX-License-Identifier: Apache-2.0
//
// Closed-form and quadrature evaluation of the individual sum rate: the
// long-run throughput a user obtains when it is scheduled on the beams it
// wins, scaled by the number of competing users. The closed form expands
// the winner distribution into powers of the per-user tail, turns each
// power into a rational function of the SINR via partial fractions, and
// integrates term by term against exponential-integral kernels. The
// quadrature path integrates the winner distribution directly and serves
// as the independent cross-check.

#pragma once

#include <utility>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/scenario.hpp"

namespace rblab {

// Largest user count the closed form accepts. The outer decomposition is an
// alternating binomial sum whose terms grow like C(k0, k0/2), so beyond this
// point the evaluation cost of keeping enough guard digits outweighs the
// quadrature path, which is cheap and accurate at any user count.
inline constexpr int kClosedFormMaxUsers = 64;

// A rational integrand denominator: the poles of one tail power, with
// multiplicities already scaled by that power. Locations are the negated
// real roots, so a pole entry {a, n} stands for the factor (x + a)^n.
struct PoleSystem {
  // Index of the decomposition term this system belongs to; the tail is
  // raised to the power ell + 1.
  int ell = 0;
  std::vector<SinrDistribution::Pole> poles;
};

// One term of a partial-fraction expansion: coefficient / (x + location)^order.
struct PfTerm {
  double location = 0.0;
  int order = 0;
  double coefficient = 0.0;
};

struct PartialFraction {
  std::vector<PfTerm> terms;
};

// Weights of the winner-distribution expansion in powers of the per-user
// tail. Entry (ell, w) means the tail power ell + 1 enters with weight w.
// The weights are binomials with alternating signs; they are computed in
// exact integer arithmetic and converted to double at the end, so the
// conversion rounds once instead of accumulating factorial roundoff.
// Throws std::domain_error if k0 is not in [1, kClosedFormMaxUsers].
std::vector<std::pair<int, double>> pdf_decomposition_terms(int k0);

// Pole system of the tail raised to the power ell + 1: every multiplicity
// of the distribution's merged pole list is scaled by ell + 1.
// Throws std::domain_error if ell is negative.
PoleSystem pole_system(const SinrDistribution& d, int ell);

// Partial-fraction expansion of 1 / prod_i (x + a_i)^{n_i}. Coefficients
// come from a logarithmic-derivative recurrence evaluated pole by pole,
// which stays stable to high orders because it never forms the large
// intermediate products a naive residue formula would.
// Throws std::invalid_argument if two poles share a location.
PartialFraction partial_fractions(const PoleSystem& ps);

// Exponential integral E1(x) = int_x^inf e^{-t} / t dt for x > 0. A power
// series covers x <= 1; a modified Lentz continued fraction covers the
// rest. Relative error is at most a few ulp times condition, and below
// 1e-13 across the tested domain.
double exp_int_E1(double x);

// e^x E1(x), stable for large x where E1 alone underflows. This is the
// natural output of the continued fraction, so no large exponentials are
// ever formed.
double exp_int_E1_scaled(double x);

// I2(alpha, beta, gamma) = int_0^inf e^{-alpha x} (beta + x)^{-gamma} dx.
// Uses the first-order reduction to e^{alpha beta} E1(alpha beta) and an
// upward recurrence in gamma while the recurrence's predicted digit loss
// stays small, and switches to adaptive quadrature otherwise.
// Requires alpha > 0, beta > 0, gamma >= 1.
double integral_I2(double alpha, double beta, int gamma);

// I1(alpha, beta, gamma) = int_0^inf e^{-alpha x} / ((1 + x)(beta + x)^gamma) dx.
// When beta coincides with 1 the integrand collapses to the I2 kernel of
// order gamma + 1. Otherwise a two-pole partial fraction reduces it to I2
// values; the implementation tracks the cancellation actually incurred by
// that sum and falls back to adaptive quadrature when it loses more than
// three digits. Requires alpha > 0, beta > 0, gamma >= 1.
double integral_I1(double alpha, double beta, int gamma);

// Individual sum rate of one user in bits per channel use, by the closed
// form. The result is the user count times the user's own long-run rate,
// the throughput it would see if everyone shared its channel statistics.
// The alternating outer sum is evaluated in adaptive multiple precision,
// so the returned double is accurate to well beyond the comparison
// tolerances used anywhere in this repository.
//
// k0_override, when positive, replaces the scenario's user count in the
// formula; the scenario then only supplies the channel profile of the
// chosen user. Throws std::domain_error when the effective user count
// exceeds kClosedFormMaxUsers (use the quadrature path there), and
// ScenarioError/std::invalid_argument for invalid inputs.
double individual_sum_rate_closed(const Scenario& s, int user,
                                  long long k0_override = 0);

// Same quantity by direct numerical integration of the winner
// distribution. Works for any user count, including counts far beyond the
// closed-form cap; k0_override as above.
double individual_sum_rate_quadrature(const Scenario& s, int user,
                                      long long k0_override = 0);

}  // namespace rblab
