// SPDX-License-Identifier: Apache-2.0
//
// Closed-form rate sum in adaptive multiple precision.
//
// The outer decomposition is an alternating binomial sum, the
// partial-fraction coefficients of nearby poles cancel against each other,
// and the upward I2 recurrence subtracts nearly equal quantities. Each of
// those losses is either bounded analytically (the recurrence) or measured
// as it happens (everything else), and the working precision is raised
// until the surviving digits cover the target. That converts a numerically
// treacherous formula into a deterministic one: the same inputs always
// take the same escalation path.

#include "rate_bigfloat.hpp"

#include <mpfr.h>

#include <algorithm>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rblab::detail {
namespace {

using big = boost::multiprecision::mpfr_float;

// Scoped override of the thread's construction precision (decimal digits).
struct PrecisionGuard {
  unsigned saved;
  explicit PrecisionGuard(unsigned digits10) : saved(big::default_precision()) {
    big::default_precision(digits10);
  }
  ~PrecisionGuard() { big::default_precision(saved); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;
};

// Copy of x re-rounded to the current default precision. Rounding up pads
// exactly, so this also serves to promote an exact value before feeding it
// to functions that evaluate at their operand's precision. Rounding down
// squeezes returned values back to the caller's working precision, which
// keeps one raised guard from inflating every computation downstream.
big to_ambient(big x) {
  const auto bits = static_cast<mpfr_prec_t>(
      std::ceil(big::default_precision() * 3.3219280948873623) + 8);
  mpfr_prec_round(x.backend().data(), bits, MPFR_RNDN);
  return x;
}

big euler_constant() {
  big g(0);
  mpfr_const_euler(g.backend().data(), MPFR_RNDN);
  return g;
}

// e^x E1(x) accurate to roughly the ambient precision, for exact-valued
// positive x. The alternating series loses about 0.87 x digits between its
// peak term and the final value, so it runs under a guard raised by that
// much. The continued fraction needs no guard but its iteration count
// shrinks with x; the crossover at 60 keeps both branches in their cheap
// regime.
big e1_scaled_mp(const big& x) {
  const unsigned p = big::default_precision();
  const double xd = static_cast<double>(x);
  if (xd <= 60.0) {
    PrecisionGuard guard(p + static_cast<unsigned>(0.87 * xd) + 25);
    const big bx = to_ambient(x);
    const big eps = 1 / pow(big(10), p + 15);
    big factor(1);  // x^k / k!
    big sum(0);
    for (long k = 1; k <= 200000; ++k) {
      factor *= bx / k;
      big add = factor / k;
      if ((k & 1) == 0) add = -add;
      sum += add;
      if (k > 2 && abs(add) < eps * abs(sum)) break;
    }
    big r = exp(bx) * (sum - euler_constant() - log(bx));
    return r;
  }
  PrecisionGuard guard(p + 25);
  const big bx = to_ambient(x);
  const big tiny = 1 / pow(big(10), 2 * p + 200);
  const big eps = 1 / pow(big(10), p + 10);
  big b = bx + 1;
  big c = 1 / tiny;
  big d = 1 / b;
  big h = d;
  for (long i = 1; i <= 2000000; ++i) {
    const big a = big(-i) * i;
    b += 2;
    d = a * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    const big del = d * c;
    h *= del;
    if (abs(del - 1) < eps) break;
  }
  return h;
}

// I2(alpha, beta, g) for g = 1..g_max by the upward recurrence, at ambient
// precision. The caller has already folded the recurrence's predicted digit
// loss into that precision, so the chain runs plainly here.
std::vector<big> i2_chain(const big& alpha, const big& beta, long g_max) {
  std::vector<big> v(static_cast<size_t>(g_max) + 1);
  v[1] = to_ambient(e1_scaled_mp(alpha * beta));
  big bpow(1);  // beta^{1-g} as g advances
  for (long g = 2; g <= g_max; ++g) {
    bpow /= beta;
    v[static_cast<size_t>(g)] =
        (bpow - alpha * v[static_cast<size_t>(g - 1)]) / (g - 1);
  }
  return v;
}

struct ScaledPole {
  double location;
  long multiplicity;
};

// Decimal digits the I2 chain for this (alpha beta, g_max) pair is
// predicted to lose, plus the conditioning of the exponential integral in
// its argument. Never an underestimate.
double chain_loss_digits(double ab, long g_max) {
  double loss = std::log10(1.0 + ab);
  for (long j = 1; j < g_max; ++j) loss += std::log10(1.0 + ab / j);
  return loss;
}

// Per-pole Taylor coefficients c_m of the remaining product
// prod_{i != p} (d_i + t)^{-n_i} around t = 0, d_i = a_i - a_p, via the
// logarithmic-derivative recurrence. c_m multiplies (x + a_p)^{-(n_p - m)}.
std::vector<std::vector<big>> pf_coefficients(
    const std::vector<ScaledPole>& poles) {
  std::vector<std::vector<big>> all;
  all.reserve(poles.size());
  for (size_t p = 0; p < poles.size(); ++p) {
    const big a(poles[p].location);
    const long n = poles[p].multiplicity;
    big c0(1);
    for (size_t i = 0; i < poles.size(); ++i) {
      if (i == p) continue;
      const big d = big(poles[i].location) - a;
      c0 /= pow(d, static_cast<unsigned>(poles[i].multiplicity));
    }
    std::vector<big> c(static_cast<size_t>(n));
    std::vector<big> s(static_cast<size_t>(n));
    c[0] = c0;
    std::vector<big> run(poles.size(), big(1));
    for (long j = 1; j < n; ++j) {
      big sj(0);
      for (size_t i = 0; i < poles.size(); ++i) {
        if (i == p) continue;
        run[i] *= big(poles[i].location) - a;
        if (j & 1)
          sj -= poles[i].multiplicity / run[i];
        else
          sj += poles[i].multiplicity / run[i];
      }
      s[static_cast<size_t>(j)] = sj;
    }
    for (long m = 1; m < n; ++m) {
      big acc(0);
      for (long j = 1; j <= m; ++j)
        acc += s[static_cast<size_t>(j)] * c[static_cast<size_t>(m - j)];
      c[static_cast<size_t>(m)] = acc / m;
    }
    all.push_back(std::move(c));
  }
  return all;
}

// Digits the expansion lost, measured by reconstructing the product at
// x = 1 and comparing against the directly multiplied value, which has no
// cancellation of its own.
double probe_loss_digits(const std::vector<ScaledPole>& poles,
                         const std::vector<std::vector<big>>& coeff) {
  big direct(1);
  for (const auto& sp : poles)
    direct /= pow(big(sp.location) + 1,
                  static_cast<unsigned>(sp.multiplicity));
  big recon(0);
  for (size_t p = 0; p < poles.size(); ++p) {
    const long n = poles[p].multiplicity;
    const big base = big(poles[p].location) + 1;
    for (long m = 0; m < n; ++m)
      recon += coeff[p][static_cast<size_t>(m)] /
               pow(base, static_cast<unsigned>(n - m));
  }
  const big diff = abs(recon - direct);
  if (diff == 0) return 0.0;
  const big rel = diff / abs(direct);
  const double lost =
      static_cast<double>(big::default_precision()) +
      static_cast<double>(log10(rel));
  return std::max(0.0, lost);
}

// One decomposition term w * pref^{ell+1} * S_ell evaluated at working
// precision p digits. Reports the digits measured lost to cancellation so
// the caller can decide whether p sufficed.
big term_value(const SinrDistribution& d, long long w, int ell, unsigned p,
               double* measured_loss) {
  PrecisionGuard guard(p);
  const long scale = ell + 1;
  const big alpha = big(scale) / big(d.rho_serving);

  std::vector<ScaledPole> poles;
  poles.reserve(d.poles.size());
  for (const auto& q : d.poles)
    poles.push_back({q.location, static_cast<long>(q.multiplicity) * scale});

  // T(0) = 1 forces the constant prod_i a_i^{n_i} in front of every tail
  // power; the pole at 1 contributes nothing but is harmless to include.
  big pref(1);
  for (const auto& q : poles)
    pref *= pow(big(q.location), static_cast<unsigned>(q.multiplicity));

  double lost = 0.0;
  big S(0);
  if (poles.empty()) {
    // Pure single-antenna, interference-free tail: S reduces to the
    // first-order kernel with no partial fractions at all.
    S = e1_scaled_mp(alpha);
  } else {
    const auto coeff = pf_coefficients(poles);
    lost += probe_loss_digits(poles, coeff);
    const big e1_at_one = to_ambient(e1_scaled_mp(alpha));
    big peak(0);
    double inner_loss = 0.0;
    for (size_t pi = 0; pi < poles.size(); ++pi) {
      const double a = poles[pi].location;
      const long n = poles[pi].multiplicity;
      if (a == 1.0) {
        // The serving pole is stored at exactly 1 and coincides with the
        // kernel's own pole; the two merge into the I2 kernel one order
        // higher. A pole merely close to 1 must take the general branch,
        // because its coefficients were expanded about its true location
        // and substituting 1 would break the reconstruction.
        const auto chain = i2_chain(alpha, big(1), n + 1);
        for (long m = 0; m < n; ++m) {
          const big t = coeff[pi][static_cast<size_t>(m)] *
                        chain[static_cast<size_t>(n - m + 1)];
          S += t;
          const big at = abs(t);
          if (at > peak) peak = at;
        }
      } else {
        const auto chain = i2_chain(alpha, big(a), n);
        const big inv_am1 = 1 / (big(a) - 1);
        const big inv_one_minus = 1 / (big(1) - big(a));
        // I1(alpha, a, j) for j = 1..n via the two-pole split. Its own
        // alternating sum can cancel, so its worst ratio is measured too.
        std::vector<big> i1(static_cast<size_t>(n) + 1);
        big lead(1);  // (a - 1)^{-j}
        for (long j = 1; j <= n; ++j) {
          lead *= inv_am1;
          big sum = lead * e1_at_one;
          big pk = abs(sum);
          big fac(1);  // (-1)^m (1 - a)^{-(m+1)}, sign folded in below
          for (long m = 0; m < j; ++m) {
            fac *= inv_one_minus;
            big t2 = fac * chain[static_cast<size_t>(j - m)];
            if (m & 1) t2 = -t2;
            sum += t2;
            const big a2 = abs(t2);
            if (a2 > pk) pk = a2;
          }
          i1[static_cast<size_t>(j)] = sum;
          if (sum == 0) {
            inner_loss = 1e9;
          } else {
            const big ratio = pk / abs(sum);
            const double dl = static_cast<double>(log10(ratio));
            if (dl > inner_loss) inner_loss = dl;
          }
        }
        for (long m = 0; m < n; ++m) {
          const big t = coeff[pi][static_cast<size_t>(m)] *
                        i1[static_cast<size_t>(n - m)];
          S += t;
          const big at = abs(t);
          if (at > peak) peak = at;
        }
      }
    }
    lost += std::max(0.0, inner_loss);
    if (S == 0) {
      lost = 1e9;
    } else {
      const big ratio = peak / abs(S);
      const double dl = static_cast<double>(log10(ratio));
      if (dl > 0) lost += dl;
    }
  }
  *measured_loss = lost;
  return big(w) * pref * S;
}

// Predicted digits of partial-fraction cancellation: each coefficient at a
// pole carries the product of inverse separations to every other pole, and
// terms at a pole off 1 are further inflated by the two-pole split of the
// kernel. An overestimate only costs time, never accuracy, and it spares
// the escalation loop several doomed cheap attempts.
double pf_loss_estimate(const SinrDistribution& d, long scale) {
  double worst = 0.0;
  for (size_t p = 0; p < d.poles.size(); ++p) {
    double digits = 0.0;
    for (size_t i = 0; i < d.poles.size(); ++i) {
      if (i == p) continue;
      const double sep = std::abs(d.poles[i].location - d.poles[p].location);
      if (sep < 1.0)
        digits += static_cast<double>(d.poles[i].multiplicity) * scale *
                  std::log10(1.0 / sep);
    }
    if (d.poles[p].location != 1.0) {
      const double gap = std::abs(1.0 - d.poles[p].location);
      if (gap < 1.0)
        digits += static_cast<double>(d.poles[p].multiplicity) * scale *
                  std::log10(1.0 / gap);
    }
    worst = std::max(worst, digits);
  }
  return worst;
}

// Decomposition term with measured-loss escalation: raise the working
// precision until the digits surviving all cancellation cover `needed`.
big term_for_ell(const SinrDistribution& d, long long w, int ell,
                 unsigned needed) {
  const long scale = ell + 1;
  const double alpha = scale / d.rho_serving;
  double i2loss = 0.0;
  for (const auto& q : d.poles) {
    const long n = static_cast<long>(q.multiplicity) * scale;
    const bool at_one = q.location == 1.0;
    const double ab = alpha * (at_one ? 1.0 : q.location);
    i2loss = std::max(i2loss, chain_loss_digits(ab, at_one ? n + 1 : n));
  }

  unsigned p = needed + static_cast<unsigned>(i2loss) +
               static_cast<unsigned>(pf_loss_estimate(d, scale)) + 40;
  for (int attempt = 0; attempt < 8; ++attempt) {
    double lost = 0.0;
    big t = term_value(d, w, ell, p, &lost);
    lost += i2loss;
    if (static_cast<double>(p) - lost >= static_cast<double>(needed) + 2.0)
      return t;
    const double bumped = std::max(
        {2.5 * p, static_cast<double>(needed) + lost + 30.0, p + 20.0});
    if (bumped > 200000.0)
      throw std::runtime_error(
          "closed-form rate: precision escalation exceeded its budget");
    p = static_cast<unsigned>(bumped);
  }
  throw std::runtime_error("closed-form rate: term failed to stabilise");
}

}  // namespace

double closed_rate_mpfr(const SinrDistribution& d, long long k0) {
  // Exact binomial weights C(k0, ell+1); the widest, C(64, 32), still fits
  // a 64-bit integer and the intermediate products fit 128 bits.
  std::vector<long long> w(static_cast<size_t>(k0));
  unsigned __int128 binom = 1;
  for (long long j = 1; j <= k0; ++j) {
    binom = binom * static_cast<unsigned long long>(k0 - j + 1) /
            static_cast<unsigned long long>(j);
    w[static_cast<size_t>(j - 1)] =
        static_cast<long long>(static_cast<unsigned long long>(binom));
  }

  const unsigned target = 19;
  double outer_est = 0.2 * static_cast<double>(k0) + 5.0;
  for (int phase = 0; phase < 5; ++phase) {
    const unsigned needed = target + static_cast<unsigned>(outer_est) + 9;
    PrecisionGuard guard(needed + 12);
    big total(0);
    big peak(0);
    for (int ell = 0; ell < k0; ++ell) {
      const long long signed_w =
          (ell & 1) ? -w[static_cast<size_t>(ell)] : w[static_cast<size_t>(ell)];
      const big t = to_ambient(term_for_ell(d, signed_w, ell, needed));
      total += t;
      const big at = abs(t);
      if (at > peak) peak = at;
    }
    double outer_loss = 1e9;
    if (total != 0) {
      const big ratio = peak / abs(total);
      outer_loss = std::max(0.0, static_cast<double>(log10(ratio)));
    }
    if (static_cast<double>(needed) - outer_loss >=
        static_cast<double>(target)) {
      const big bits = big(d.num_antennas) * total / log(big(2));
      return static_cast<double>(bits);
    }
    outer_est = outer_loss + 8.0;
  }
  throw std::runtime_error(
      "closed-form rate: outer sum failed to stabilise");
}

}  // namespace rblab::detail
