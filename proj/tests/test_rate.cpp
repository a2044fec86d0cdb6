// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/rate.hpp"

using namespace rblab;

namespace {

Scenario one_user(int m, double rho0, std::vector<double> rhob = {}) {
  Scenario s;
  s.num_antennas = m;
  s.users.push_back({0, rho0, std::move(rhob)});
  return s;
}

Scenario replicated(int m, double rho0, std::vector<double> rhob, int count) {
  Scenario s;
  s.num_antennas = m;
  for (int k = 0; k < count; k++) s.users.push_back({k, rho0, rhob});
  return s;
}

// Straight adaptive quadrature of e^{-alpha x} (beta+x)^{-gamma} (and the
// variant with the extra 1/(1+x)), used as the independent reference for
// the kernel evaluators. e^{-80} is far below every comparison tolerance,
// so the integral is truncated there.
double i2_reference(double alpha, double beta, int gamma) {
  auto f = [=](double x) {
    return std::exp(-alpha * x - gamma * std::log(beta + x));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, 80.0 / alpha, 15, 1e-13);
}

double i1_reference(double alpha, double beta, int gamma) {
  auto f = [=](double x) {
    return std::exp(-alpha * x - gamma * std::log(beta + x)) / (1.0 + x);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, 80.0 / alpha, 15, 1e-13);
}

}  // namespace

TEST_CASE("exponential integral matches the references") {
  // Reference values from 50-digit arithmetic.
  CHECK(exp_int_E1(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-13));
  CHECK(exp_int_E1(0.5) == doctest::Approx(0.55977359477616081).epsilon(1e-13));
  CHECK(exp_int_E1(2.0) == doctest::Approx(0.04890051070806112).epsilon(1e-13));
  CHECK(exp_int_E1_scaled(1.0) ==
        doctest::Approx(0.59634736232319407).epsilon(1e-13));

  // The scaled and plain forms are the same function on both sides of the
  // series/continued-fraction crossover.
  for (double x : {0.05, 0.5, 0.99, 1.01, 3.0, 17.0}) {
    CHECK(exp_int_E1_scaled(x) * std::exp(-x) ==
          doctest::Approx(exp_int_E1(x)).epsilon(1e-13));
  }

  // x e^x E1(x) -> 1 from below; the first correction is -1/x.
  CHECK(1e6 * exp_int_E1_scaled(1e6) ==
        doctest::Approx(1.0 - 1e-6).epsilon(1e-8));

  CHECK_THROWS_AS(exp_int_E1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_int_E1(-1.0), std::domain_error);
  CHECK_THROWS_AS(exp_int_E1_scaled(0.0), std::domain_error);
}

TEST_CASE("auxiliary integrals match the references") {
  // Reference values from 50-digit arithmetic. The first exercises a large
  // argument where the unscaled exponential integral would underflow.
  CHECK(integral_I2(1.0, 100.0, 1) ==
        doctest::Approx(0.0099019422867330184).epsilon(1e-12));
  CHECK(integral_I2(2.0, 1.0, 2) ==
        doctest::Approx(0.27734276622355483).epsilon(1e-12));
  CHECK(integral_I1(1.0, 2.0, 1) ==
        doctest::Approx(0.23501874543497149).epsilon(1e-12));
  CHECK(integral_I1(1.0, 3.0, 2) ==
        doctest::Approx(0.047941108977961476).epsilon(1e-12));
}

TEST_CASE("auxiliary integrals agree with direct quadrature") {
  // Low alpha*beta keeps the recurrence active through gamma = 40.
  for (int gamma : {2, 5, 17, 40}) {
    CHECK(integral_I2(0.5, 1.5, gamma) ==
          doctest::Approx(i2_reference(0.5, 1.5, gamma)).epsilon(1e-9));
  }
  // alpha*beta = 60 forfeits more than three digits by gamma = 12, which
  // forces the internal quadrature fallback.
  CHECK(integral_I2(2.0, 30.0, 12) ==
        doctest::Approx(i2_reference(2.0, 30.0, 12)).epsilon(1e-9));

  for (int gamma : {1, 3, 9}) {
    CHECK(integral_I1(0.7, 2.5, gamma) ==
          doctest::Approx(i1_reference(0.7, 2.5, gamma)).epsilon(1e-9));
  }
  // beta near 1 blows up the two-pole split, so this must take the
  // quadrature route and still come out right.
  CHECK(integral_I1(1.0, 1.1, 8) ==
        doctest::Approx(i1_reference(1.0, 1.1, 8)).epsilon(1e-9));
  // beta within the merge window collapses to the higher-order I2 kernel.
  CHECK(integral_I1(2.0, 1.0 + 1e-12, 3) ==
        doctest::Approx(integral_I2(2.0, 1.0, 4)).epsilon(1e-12));
}

TEST_CASE("kernel domain violations throw") {
  CHECK_THROWS_AS(integral_I2(0.0, 1.0, 1), std::domain_error);
  CHECK_THROWS_AS(integral_I2(1.0, 0.0, 1), std::domain_error);
  CHECK_THROWS_AS(integral_I2(1.0, 1.0, 0), std::domain_error);
  CHECK_THROWS_AS(integral_I1(-2.0, 1.0, 1), std::domain_error);
  CHECK_THROWS_AS(integral_I1(1.0, -1.0, 1), std::domain_error);
  CHECK_THROWS_AS(integral_I1(1.0, 1.0, -3), std::domain_error);
}

TEST_CASE("decomposition weights are exact binomials") {
  const auto w1 = pdf_decomposition_terms(1);
  REQUIRE(w1.size() == 1);
  CHECK(w1[0].first == 0);
  CHECK(w1[0].second == 1.0);

  const auto w2 = pdf_decomposition_terms(2);
  REQUIRE(w2.size() == 2);
  CHECK(w2[0].second == 2.0);
  CHECK(w2[1].second == -1.0);

  // K0 = 5: C(5, ell+1) with alternating signs.
  const auto w5 = pdf_decomposition_terms(5);
  const std::vector<double> want5 = {5.0, -10.0, 10.0, -5.0, 1.0};
  REQUIRE(w5.size() == 5);
  for (int ell = 0; ell < 5; ell++) {
    CHECK(w5[ell].first == ell);
    CHECK(w5[ell].second == want5[ell]);
  }

  // The widest weight the cap admits. C(64, 32) is not representable in a
  // double, so the expected value is the same once-rounded conversion.
  const auto w64 = pdf_decomposition_terms(64);
  CHECK(w64[31].second == -static_cast<double>(1832624140942590534ULL));

  CHECK_THROWS_AS(pdf_decomposition_terms(0), std::domain_error);
  CHECK_THROWS_AS(pdf_decomposition_terms(kClosedFormMaxUsers + 1),
                  std::domain_error);
}

TEST_CASE("weighted tail powers rebuild the winner distribution") {
  const auto d = make_distribution(2, 1.0, {0.5, 0.25});
  const int k0 = 8;
  const auto w = pdf_decomposition_terms(k0);
  for (int i = 0; i < 20; i++) {
    const double x = 0.1 * std::pow(1.5, i);
    const double direct = std::pow(cdf_sinr(d, x), k0);
    double sum = 0.0;
    for (const auto& [ell, weight] : w)
      sum += weight * -std::expm1((ell + 1) * log_tail(d, x));
    CHECK(sum == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("partial fractions reproduce textbook expansions") {
  // 1/((x+1)(x+2)) = 1/(x+1) - 1/(x+2)
  PartialFraction pf = partial_fractions({0, {{1.0, 1}, {2.0, 1}}});
  REQUIRE(pf.terms.size() == 2);
  CHECK(pf.terms[0].location == 1.0);
  CHECK(pf.terms[0].order == 1);
  CHECK(pf.terms[0].coefficient == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pf.terms[1].location == 2.0);
  CHECK(pf.terms[1].order == 1);
  CHECK(pf.terms[1].coefficient == doctest::Approx(-1.0).epsilon(1e-15));

  // 1/((x+1)^2 (x+2)) = 1/(x+1)^2 - 1/(x+1) + 1/(x+2)
  pf = partial_fractions({0, {{1.0, 2}, {2.0, 1}}});
  REQUIRE(pf.terms.size() == 3);
  CHECK(pf.terms[0].order == 2);
  CHECK(pf.terms[0].coefficient == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pf.terms[1].order == 1);
  CHECK(pf.terms[1].coefficient == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pf.terms[2].location == 2.0);
  CHECK(pf.terms[2].coefficient == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(partial_fractions({0, {{1.0, 1}, {1.0, 2}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(partial_fractions({0, {{1.0, 0}}}), std::invalid_argument);
}

TEST_CASE("partial fractions reconstruct the rational function") {
  // Ratios 1, 2, 4 with M = 2 at decomposition index 1: a realistic system
  // with doubled multiplicities.
  const auto d = make_distribution(2, 1.0, {0.5, 0.25});
  const auto ps = pole_system(d, 1);
  const auto pf = partial_fractions(ps);
  for (int i = 0; i < 20; i++) {
    const double x = 0.1 + 1.57 * i;
    double direct = 1.0;
    for (const auto& p : ps.poles)
      direct /= std::pow(x + p.location, p.multiplicity);
    double sum = 0.0;
    for (const auto& t : pf.terms)
      sum += t.coefficient / std::pow(x + t.location, t.order);
    CHECK(sum == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("pole systems scale multiplicities") {
  const auto d = make_distribution(3, 1.0, {0.5});
  const auto p0 = pole_system(d, 0);
  REQUIRE(p0.poles.size() == d.poles.size());
  for (size_t i = 0; i < d.poles.size(); i++) {
    CHECK(p0.poles[i].location == d.poles[i].location);
    CHECK(p0.poles[i].multiplicity == d.poles[i].multiplicity);
  }
  const auto p3 = pole_system(d, 3);
  for (size_t i = 0; i < d.poles.size(); i++)
    CHECK(p3.poles[i].multiplicity == 4 * d.poles[i].multiplicity);
  CHECK_THROWS_AS(pole_system(d, -1), std::domain_error);
}

TEST_CASE("closed form matches the frozen references") {
  // Single user, single antenna, no interference: e E1(1) / ln 2.
  CHECK(individual_sum_rate_closed(one_user(1, 1.0), 0) ==
        doctest::Approx(0.86034738227088595).epsilon(1e-11));
  // Two antennas, one interferer at half power, eight users; reference
  // from 50-digit quadrature of the winner distribution.
  CHECK(individual_sum_rate_closed(replicated(2, 1.0, {0.5}, 8), 0) ==
        doctest::Approx(2.0818804105927533).epsilon(1e-11));
}

TEST_CASE("closed form and quadrature agree") {
  struct Config {
    int m;
    double rho0;
    std::vector<double> rhob;
    long long k0;
  };
  const std::vector<Config> configs = {
      {2, 1.0, {0.5, 0.25}, 32},
      {4, 0.161593, {1.681273, 0.336934, 8.326331}, 8},
      // Single antenna with interferers: no pole at 1 at all.
      {1, 2.0, {1.0, 0.5}, 16},
      // An interferer ratio separated from the serving pole by 3e-10:
      // close enough to be numerically vicious, too far to merge.
      {2, 1.0, {1.0000000003}, 16},
  };
  for (const auto& cfg : configs) {
    const auto s = one_user(cfg.m, cfg.rho0, cfg.rhob);
    const double closed = individual_sum_rate_closed(s, 0, cfg.k0);
    const double quad = individual_sum_rate_quadrature(s, 0, cfg.k0);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
  }
}

TEST_CASE("the user-count override matches an explicit roster") {
  const auto wide = replicated(2, 1.0, {0.5}, 8);
  const auto narrow = one_user(2, 1.0, {0.5});
  CHECK(individual_sum_rate_closed(wide, 0) ==
        individual_sum_rate_closed(narrow, 0, 8));
  CHECK(individual_sum_rate_quadrature(wide, 0) ==
        individual_sum_rate_quadrature(narrow, 0, 8));
}

TEST_CASE("rate grows with the user count") {
  const auto s = one_user(2, 1.0, {0.5});
  const double k8 = individual_sum_rate_closed(s, 0, 8);
  const double k64 = individual_sum_rate_closed(s, 0, 64);
  CHECK(k64 > k8);
  // A million users stays finite and continues the growth; only the
  // quadrature path reaches that regime.
  const double k1e6 = individual_sum_rate_quadrature(s, 0, 1000000);
  CHECK(std::isfinite(k1e6));
  CHECK(k1e6 > k64);
}

TEST_CASE("homogeneous users share one individual sum rate") {
  const auto s = replicated(2, 0.8, {0.4, 1.6}, 4);
  const double first = individual_sum_rate_closed(s, 0);
  for (int k = 1; k < 4; k++) {
    CHECK(individual_sum_rate_closed(s, k) == first);
    CHECK(individual_sum_rate_quadrature(s, k) ==
          individual_sum_rate_quadrature(s, 0));
  }
}

TEST_CASE("rate input validation") {
  const auto s = one_user(2, 1.0, {0.5});
  CHECK_THROWS_AS(individual_sum_rate_closed(s, 1), std::invalid_argument);
  CHECK_THROWS_AS(individual_sum_rate_closed(s, -1), std::invalid_argument);
  CHECK_THROWS_AS(individual_sum_rate_closed(s, 0, -4), std::invalid_argument);
  CHECK_THROWS_AS(individual_sum_rate_closed(s, 0, kClosedFormMaxUsers + 1),
                  std::domain_error);
  CHECK_THROWS_AS(
      individual_sum_rate_closed(replicated(1, 1.0, {}, 65), 0),
      std::domain_error);
  CHECK_THROWS_AS(individual_sum_rate_quadrature(s, 2), std::invalid_argument);
  CHECK_THROWS_AS(individual_sum_rate_quadrature(s, 0, -1),
                  std::invalid_argument);
  Scenario bad;
  bad.num_antennas = 0;
  bad.users.push_back({0, 1.0, {}});
  CHECK_THROWS_AS(individual_sum_rate_closed(bad, 0), ScenarioError);
}
