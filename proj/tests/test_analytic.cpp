// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "rblab/analytic.hpp"

using namespace rblab;

namespace {

SinrDistribution cfg(int m, double rho0, std::vector<double> rhob = {}) {
  return make_distribution(m, rho0, std::move(rhob));
}

// Deterministic pseudo-grid of evaluation points in (0, span).
std::vector<double> grid(double span, int n) {
  std::vector<double> xs;
  for (int i = 1; i <= n; i++) xs.push_back(span * i / (n + 1.0));
  return xs;
}

}  // namespace

TEST_CASE("pole merging") {
  auto d = cfg(2, 1.0, {0.5, 2.0, 1.0});
  // ratios: 2, 0.5, 1; the last merges with the serving root at 1.
  REQUIRE(d.poles.size() == 3);
  CHECK(d.poles[0].location == 0.5);
  CHECK(d.poles[0].multiplicity == 2);
  CHECK(d.poles[1].location == 1.0);
  CHECK(d.poles[1].multiplicity == 3);  // M-1 serving plus M interferer
  CHECK(d.poles[2].location == 2.0);
  CHECK(d.poles[2].multiplicity == 2);

  CHECK(cfg(1, 1.0).poles.empty());
  auto near = cfg(4, 3.0, {3.0 * (1.0 + 1e-13)});
  REQUIRE(near.poles.size() == 1);
  CHECK(near.poles[0].multiplicity == 7);
}

TEST_CASE("cdf fixed points") {
  CHECK(cdf_sinr(cfg(1, 1.0), 0.0) == 0.0);
  CHECK(cdf_sinr(cfg(1, 1.0), 1.0) ==
        doctest::Approx(-std::expm1(-1.0)).epsilon(1e-15));
  // M=2, one interferer at half power: 1 - e^-1 * 2^2 / (2 * 3^2).
  CHECK(cdf_sinr(cfg(2, 1.0, {0.5}), 1.0) ==
        doctest::Approx(0.91824901307301282).epsilon(5e-15));
  CHECK_THROWS_AS(cdf_sinr(cfg(1, 1.0), -0.5), std::domain_error);
}

TEST_CASE("cdf is a proper distribution function") {
  for (const auto& d : {cfg(1, 2.0), cfg(2, 1.0, {0.5}), cfg(4, 0.3, {1.0, 5.0, 0.2})}) {
    CHECK(cdf_sinr(d, 0.0) == 0.0);
    double prev = 0.0;
    for (double x : grid(200.0, 64)) {
      double f = cdf_sinr(d, x);
      CHECK(f >= prev);
      CHECK(f <= 1.0);
      prev = f;
    }
    CHECK(cdf_sinr(d, 1e6) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pdf against the exponential case and finite differences") {
  auto expo = cfg(1, 1.0);
  CHECK(pdf_sinr(expo, 0.0) == 1.0);
  CHECK(pdf_sinr(expo, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  for (const auto& d : {cfg(2, 1.0, {0.5}), cfg(3, 2.5, {4.0, 0.7})}) {
    double x = 0.7, h = 1e-6;
    double fd = (cdf_sinr(d, x + h) - cdf_sinr(d, x - h)) / (2 * h);
    CHECK(pdf_sinr(d, x) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(pdf_sinr(d, 1e8) < 1e-30);
  }
}

TEST_CASE("pdf integrates to one") {
  using boost::math::quadrature::gauss_kronrod;
  for (const auto& d : {cfg(1, 3.0), cfg(2, 1.0, {0.5}), cfg(4, 0.5, {2.0, 0.1, 0.5})}) {
    double xc = 1.0;
    while (log_tail(d, xc) > -30.0) xc *= 2;
    double total = gauss_kronrod<double, 61>::integrate(
        [&](double x) { return pdf_sinr(d, x); }, 0.0, xc, 12, 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("interference MGF") {
  auto d = cfg(1, 1.0, {2.0});
  CHECK(mgf_interference(d, 0.0) == 1.0);
  CHECK(mgf_interference(d, -1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(mgf_interference(d, 0.5), std::domain_error);
  CHECK_THROWS_AS(mgf_interference(cfg(2, 4.0), 0.25), std::domain_error);
  // M=1, J=0 has no interference at all; the MGF is 1 everywhere.
  CHECK(mgf_interference(cfg(1, 5.0), 100.0) == 1.0);
}

TEST_CASE("tail equals exp(-x/rho0) times the MGF at -x/rho0") {
  for (const auto& d : {cfg(2, 1.0, {0.5}), cfg(3, 0.7, {1.3, 0.2, 5.0}), cfg(4, 10.0, {10.0})}) {
    for (double x : grid(50.0, 40)) {
      double lhs = 1.0 - cdf_sinr(d, x);
      double rhs = std::exp(-x / d.rho_serving) *
                   mgf_interference(d, -x / d.rho_serving);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("cdf bounds sandwich the cdf") {
  auto het = cfg(2, 1.0, {0.5, 2.0});
  CHECK(cdf_bounds(het, 0.0).lb == 0.0);
  CHECK(cdf_bounds(het, 0.0).ub == 0.0);
  // span chosen so the tail stays far above the resolution of double near 1,
  // otherwise all three values round to exactly 1 and strictness is vacuous
  for (double x : grid(12.0, 100)) {
    auto b = cdf_bounds(het, x);
    double f = cdf_sinr(het, x);
    CHECK(b.lb < f);
    CHECK(f < b.ub);
  }
  // All SNRs equal: both bounds collapse onto the exact cdf.
  auto hom = cfg(2, 1.5, {1.5, 1.5});
  for (double x : grid(20.0, 20)) {
    auto b = cdf_bounds(hom, x);
    CHECK(b.lb == cdf_sinr(hom, x));
    CHECK(b.ub == cdf_sinr(hom, x));
  }
}

TEST_CASE("growth function") {
  auto expo = cfg(1, 3.0);
  for (double x : grid(30.0, 10)) CHECK(growth_function(expo, x) == 3.0);

  CHECK(growth_function(cfg(2, 1.0, {1.0}), 0.0) == 0.25);

  for (const auto& d : {cfg(2, 1.0, {0.5}), cfg(4, 2.0, {0.3, 3.0, 2.0})}) {
    // (1-F)/f from the primitives matches 1/hazard. The direct quotient is
    // the numerically fragile form, so stay where 1-F is well resolved.
    for (double x : grid(2.0, 8)) {
      double direct = (1.0 - cdf_sinr(d, x)) / pdf_sinr(d, x);
      CHECK(growth_function(d, x) == doctest::Approx(direct).epsilon(1e-10));
    }
    CHECK(growth_function(d, 1e12) ==
          doctest::Approx(d.rho_serving).epsilon(1e-9));
  }
}

TEST_CASE("growth derivative decays") {
  CHECK(gumbel_criterion(cfg(1, 2.0), 0.0) == 0.0);
  CHECK(gumbel_criterion(cfg(1, 2.0), 17.0) == 0.0);

  for (const auto& d : {cfg(2, 1.0, {0.5}), cfg(3, 4.0, {0.5, 1.0})}) {
    double x = 5.0, h = 1e-5;
    double fd = (growth_function(d, x + h) - growth_function(d, x - h)) / (2 * h);
    CHECK(gumbel_criterion(d, x) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(gumbel_criterion(d, 1e6) > 0.0);
    CHECK(gumbel_criterion(d, 1e6) < 1e-9);
  }
}

TEST_CASE("level crossing") {
  auto expo = cfg(1, 1.0);
  auto lc = solve_level(expo, 100);
  CHECK(lc.w == doctest::Approx(std::log(100.0)).epsilon(1e-12));
  CHECK(lc.w_lb == doctest::Approx(lc.w).epsilon(1e-12));
  CHECK(lc.w_ub == doctest::Approx(lc.w).epsilon(1e-12));

  auto scaled = solve_level(cfg(1, 2.0), 22026);  // about e^10
  CHECK(scaled.w == doctest::Approx(2.0 * std::log(22026.0)).epsilon(1e-12));

  auto d = cfg(2, 1.0, {0.5});
  double prev = 0.0;
  for (long long k0 : {4LL, 16LL, 100LL, 10000LL, 1000000000LL}) {
    auto r = solve_level(d, k0);
    CHECK(r.w_lb <= r.w);
    CHECK(r.w <= r.w_ub);
    CHECK(r.w > prev);
    prev = r.w;
    // residual on the tail scale
    double resid = std::exp(log_tail(d, r.w)) - 1.0 / static_cast<double>(k0);
    CHECK(std::abs(resid) <= 1e-12);
  }
  CHECK_THROWS_AS(solve_level(d, 1), std::invalid_argument);
}

TEST_CASE("asymptotic level expansions") {
  auto expo = cfg(1, 1.0);
  auto a = asymptotic_level(expo, 1000000);
  CHECK(a.w_two_term == doctest::Approx(std::log(1e6)).epsilon(1e-15));

  auto d = cfg(2, 1.0, {1.0});
  CHECK(asymptotic_level(d, 1000000).w_two_term ==
        doctest::Approx(5.9381348145362417).epsilon(1e-14));
  // homogeneous SNRs collapse both expansions
  auto h = asymptotic_level(d, 100000);
  CHECK(h.w_ub_expansion == h.w_lb_expansion);
  CHECK_THROWS_AS(asymptotic_level(d, 15), std::invalid_argument);

  // two-term curve tracks the exact crossing to O(ln ln ln K0)
  auto het = cfg(2, 1.0, {0.5});
  for (long long k0 : {1000LL, 1000000LL, 1000000000LL}) {
    double w = solve_level(het, k0).w;
    double wt = asymptotic_level(het, k0).w_two_term;
    double lllk = std::log(std::log(std::log(static_cast<double>(k0))));
    CHECK(std::abs(w - wt) <= 10.0 * std::max(lllk, 1.0));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(make_distribution(0, 1.0, {}), ScenarioError);
  CHECK_THROWS_AS(make_distribution(2, -1.0, {}), ScenarioError);
  CHECK_THROWS_AS(make_distribution(2, 1.0, {0.0}), ScenarioError);
}
