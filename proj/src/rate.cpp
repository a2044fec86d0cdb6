// SPDX-License-Identifier: Apache-2.0

#include "rblab/rate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rate_bigfloat.hpp"

namespace rblab {
namespace {

using boost::math::quadrature::gauss_kronrod;

// Power series for E1, valid for 0 < x <= 1:
//   E1(x) = -euler_gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!).
// The largest term is x itself, so the alternating sum cancels at most one
// digit on this domain.
double e1_series(double x) {
  double factor = 1.0;  // x^k / k!
  double sum = 0.0;
  for (int k = 1; k <= 80; ++k) {
    factor *= x / k;
    const double add = ((k & 1) ? factor : -factor) / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum - std::numbers::egamma - std::log(x);
}

// Modified Lentz evaluation of the continued fraction for e^x E1(x),
// convergent for x > 1. Working on the scaled function means no large
// exponential is ever formed, so the result stays meaningful far past the
// point where E1 itself underflows.
double e1_cf_scaled(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

// Integrates a smooth integrand that decays on the characteristic width
// given by scale: Gauss-Kronrod panels of geometrically growing width until
// a panel no longer contributes. The growth keeps the panel count
// logarithmic in the decay length, so slowly decaying tails cost little.
template <typename F>
double integrate_decaying(const F& f, double scale) {
  double total = 0.0;
  double a = 0.0;
  double w = 4.0 * scale;
  for (int seg = 0; seg < 80; ++seg) {
    const double b = a + w;
    double err;
    const double part =
        gauss_kronrod<double, 61>::integrate(f, a, b, 9, 1e-12, &err);
    total += part;
    if (seg >= 2 && std::abs(part) < 1e-17 * std::abs(total)) break;
    a = b;
    w *= 2.0;
  }
  return total;
}

// Predicted decimal digits lost by the upward recurrence in gamma. The
// subtraction in each step cancels roughly log10(1 + alpha beta / j)
// digits at order j + 1, and the losses compound; the sum is an upper
// bound, never an underestimate, so trusting it is safe.
double i2_recurrence_loss_digits(double ab, int gamma) {
  double loss = 0.0;
  for (int j = 1; j < gamma; ++j) loss += std::log10(1.0 + ab / j);
  return loss;
}

double i2_quadrature(double alpha, double beta, int gamma) {
  auto f = [=](double x) {
    return std::exp(-alpha * x - gamma * std::log(beta + x));
  };
  const double scale = 1.0 / std::max(alpha + gamma / beta, 1.0);
  return integrate_decaying(f, scale);
}

double i1_quadrature(double alpha, double beta, int gamma) {
  auto f = [=](double x) {
    return std::exp(-alpha * x - gamma * std::log(beta + x)) / (1.0 + x);
  };
  const double scale = 1.0 / std::max(alpha + gamma / beta + 1.0, 1.0);
  return integrate_decaying(f, scale);
}

void require_kernel_domain(const char* who, double alpha, double beta,
                           int gamma) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error(std::string(who) +
                            ": alpha and beta must be positive");
  if (gamma < 1)
    throw std::domain_error(std::string(who) + ": gamma must be at least 1");
}

}  // namespace

double exp_int_E1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_int_E1: x must be positive");
  if (x <= 1.0) return e1_series(x);
  return e1_cf_scaled(x) * std::exp(-x);
}

double exp_int_E1_scaled(double x) {
  if (!(x > 0.0))
    throw std::domain_error("exp_int_E1_scaled: x must be positive");
  if (x <= 1.0) return e1_series(x) * std::exp(x);
  return e1_cf_scaled(x);
}

double integral_I2(double alpha, double beta, int gamma) {
  require_kernel_domain("integral_I2", alpha, beta, gamma);
  const double ab = alpha * beta;
  // Order one reduces to the exponential integral exactly.
  if (gamma == 1) return exp_int_E1_scaled(ab);
  if (i2_recurrence_loss_digits(ab, gamma) <= 3.0) {
    double cur = exp_int_E1_scaled(ab);
    double bpow = 1.0;  // beta^{1-g} as g advances
    for (int g = 2; g <= gamma; ++g) {
      bpow /= beta;
      cur = (bpow - alpha * cur) / (g - 1);
    }
    return cur;
  }
  return i2_quadrature(alpha, beta, gamma);
}

double integral_I1(double alpha, double beta, int gamma) {
  require_kernel_domain("integral_I1", alpha, beta, gamma);
  // A pole pair this close is indistinguishable from a merged pole at
  // double precision, and the collapsed form is exact in the limit.
  if (std::abs(beta - 1.0) <= 1e-9) return integral_I2(alpha, 1.0, gamma + 1);

  // Splitting off the pole at 1 multiplies terms by (1 - beta)^{-(m+1)}, so
  // a beta near 1 is guaranteed to cancel about gamma digits before the sum
  // even starts. Skip straight to quadrature when that alone eats the
  // budget.
  const double blowup = gamma * std::log10(1.0 / std::abs(1.0 - beta));
  if (blowup > 3.0) return i1_quadrature(alpha, beta, gamma);

  // 1/((1+x)(beta+x)^g) = (beta-1)^{-g}/(1+x)
  //                       + sum_{m=0}^{g-1} (-1)^m (1-beta)^{-(m+1)} (beta+x)^{-(g-m)}
  const double base = beta - 1.0;
  double sgn = (base < 0.0 && (gamma & 1)) ? -1.0 : 1.0;
  const double lead =
      sgn * std::pow(std::abs(base), -static_cast<double>(gamma));
  double sum = lead * integral_I2(alpha, 1.0, 1);
  double peak = std::abs(sum);
  double factor = 1.0;
  for (int m = 0; m < gamma; ++m) {
    factor /= (1.0 - beta);
    const double term =
        ((m & 1) ? -factor : factor) * integral_I2(alpha, beta, gamma - m);
    sum += term;
    peak = std::max(peak, std::abs(term));
  }
  // The predicted blowup is a lower bound on the cancellation; the terms
  // can still conspire against us, so measure what actually happened and
  // fall back if more than three digits vanished.
  if (sum == 0.0 || peak / std::abs(sum) > 1e3)
    return i1_quadrature(alpha, beta, gamma);
  return sum;
}

std::vector<std::pair<int, double>> pdf_decomposition_terms(int k0) {
  if (k0 < 1)
    throw std::domain_error("pdf_decomposition_terms: k0 must be at least 1");
  if (k0 > kClosedFormMaxUsers)
    throw std::domain_error(
        "pdf_decomposition_terms: " + std::to_string(k0) +
        " users exceeds the closed-form cap of " +
        std::to_string(kClosedFormMaxUsers) +
        "; use individual_sum_rate_quadrature instead");
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<size_t>(k0));
  // w_ell = k0 C(k0-1, ell) (-1)^ell / (ell+1) collapses to
  // (-1)^ell C(k0, ell+1), an exact integer. Build the binomial
  // multiplicatively; every intermediate division is exact and the widest
  // value, C(64, 32), still fits in 128 bits with room to spare.
  unsigned __int128 binom = 1;
  for (int ell = 0; ell < k0; ++ell) {
    const int j = ell + 1;
    binom = binom * static_cast<unsigned>(k0 - j + 1) / static_cast<unsigned>(j);
    const double w = static_cast<double>(static_cast<unsigned long long>(binom));
    out.emplace_back(ell, (ell & 1) ? -w : w);
  }
  return out;
}

PoleSystem pole_system(const SinrDistribution& d, int ell) {
  if (ell < 0) throw std::domain_error("pole_system: ell must be nonnegative");
  PoleSystem ps;
  ps.ell = ell;
  ps.poles.reserve(d.poles.size());
  for (const auto& p : d.poles)
    ps.poles.push_back({p.location, p.multiplicity * (ell + 1)});
  return ps;
}

PartialFraction partial_fractions(const PoleSystem& ps) {
  const auto& poles = ps.poles;
  for (size_t i = 0; i < poles.size(); ++i) {
    if (poles[i].multiplicity < 1)
      throw std::invalid_argument(
          "partial_fractions: multiplicities must be at least 1");
    for (size_t j = i + 1; j < poles.size(); ++j) {
      const double sep = std::abs(poles[i].location - poles[j].location);
      const double mag =
          std::max(std::abs(poles[i].location), std::abs(poles[j].location));
      if (sep <= 1e-12 * mag)
        throw std::invalid_argument(
            "partial_fractions: poles " + std::to_string(poles[i].location) +
            " and " + std::to_string(poles[j].location) +
            " coincide; merge them first");
    }
  }

  PartialFraction out;
  for (size_t p = 0; p < poles.size(); ++p) {
    const double a = poles[p].location;
    const int n = poles[p].multiplicity;

    // Taylor coefficients c_m of g(t) = prod_{i != p} (d_i + t)^{-n_i}
    // around t = 0, with d_i = a_i - a. Exponentiating the logarithmic
    // series never multiplies two huge residue factors together, which is
    // what keeps high orders stable.
    double c0 = 1.0;
    for (size_t i = 0; i < poles.size(); ++i) {
      if (i == p) continue;
      const double d = poles[i].location - a;
      double dp = 1.0;
      for (int t = 0; t < poles[i].multiplicity; ++t) dp *= d;
      c0 /= dp;
    }
    std::vector<double> c(static_cast<size_t>(n), 0.0);
    std::vector<double> s(static_cast<size_t>(n), 0.0);
    c[0] = c0;
    std::vector<double> run(poles.size(), 1.0);
    for (int j = 1; j < n; ++j) {
      double sj = 0.0;
      for (size_t i = 0; i < poles.size(); ++i) {
        if (i == p) continue;
        run[i] *= poles[i].location - a;
        const double sign = (j & 1) ? 1.0 : -1.0;
        sj -= static_cast<double>(poles[i].multiplicity) * sign / run[i];
      }
      s[static_cast<size_t>(j)] = sj;
    }
    for (int m = 1; m < n; ++m) {
      double acc = 0.0;
      for (int j = 1; j <= m; ++j)
        acc += s[static_cast<size_t>(j)] * c[static_cast<size_t>(m - j)];
      c[static_cast<size_t>(m)] = acc / m;
    }
    // g's coefficient of t^m multiplies (x + a)^{-(n - m)}.
    for (int m = 0; m < n; ++m)
      out.terms.push_back({a, n - m, c[static_cast<size_t>(m)]});
  }
  return out;
}

double individual_sum_rate_quadrature(const Scenario& s, int user,
                                      long long k0_override) {
  validate_or_throw(s);
  if (user < 0 || static_cast<size_t>(user) >= s.users.size())
    throw std::invalid_argument("individual_sum_rate_quadrature: no user " +
                                std::to_string(user));
  if (k0_override < 0)
    throw std::invalid_argument(
        "individual_sum_rate_quadrature: k0_override must be positive");
  const long long k0 =
      k0_override > 0 ? k0_override : static_cast<long long>(s.users.size());
  const SinrDistribution d = user_distribution(s, user);

  // Truncate where the winner's tail k0 * T(x) drops below 1e-14; past that
  // point the integrand contributes nothing at double precision. log_tail
  // is strictly decreasing, so bisection pins the crossing.
  const double lt_target =
      std::log(1e-14) - std::log(static_cast<double>(k0));
  double hi =
      d.rho_serving * (std::log(static_cast<double>(k0)) + 40.0) + 64.0;
  while (log_tail(d, hi) > lt_target) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_tail(d, mid) > lt_target)
      lo = mid;
    else
      hi = mid;
  }
  const double x_cut = hi;

  auto f = [&](double x) {
    const double t = std::exp(log_tail(d, x));
    // 1 - F^k0 evaluated as -expm1(k0 log(1 - t)) so that neither a tail
    // near 1 nor a winner CDF near 1 loses precision.
    return -std::expm1(static_cast<double>(k0) * std::log1p(-t)) / (1.0 + x);
  };
  double err;
  const double nats =
      gauss_kronrod<double, 61>::integrate(f, 0.0, x_cut, 15, 1e-10, &err);
  return static_cast<double>(d.num_antennas) * nats * std::numbers::log2e;
}

double individual_sum_rate_closed(const Scenario& s, int user,
                                  long long k0_override) {
  validate_or_throw(s);
  if (user < 0 || static_cast<size_t>(user) >= s.users.size())
    throw std::invalid_argument("individual_sum_rate_closed: no user " +
                                std::to_string(user));
  if (k0_override < 0)
    throw std::invalid_argument(
        "individual_sum_rate_closed: k0_override must be positive");
  const long long k0 =
      k0_override > 0 ? k0_override : static_cast<long long>(s.users.size());
  if (k0 > kClosedFormMaxUsers)
    throw std::domain_error(
        "individual_sum_rate_closed: " + std::to_string(k0) +
        " users exceeds the closed-form cap of " +
        std::to_string(kClosedFormMaxUsers) +
        "; use individual_sum_rate_quadrature instead");
  return detail::closed_rate_mpfr(user_distribution(s, user), k0);
}

}  // namespace rblab
