// SPDX-License-Identifier: Apache-2.0

#include "rblab/sched.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "channel_internal.hpp"
#include "rblab/kernels.hpp"

namespace rblab {

namespace {

// Trials are accumulated in fixed blocks of this size and the per-block sums
// are folded in block order, so the final report does not depend on how the
// blocks were distributed over workers.
constexpr std::uint64_t kBlockTrials = 4096;

struct KahanAcc {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

struct BlockAccum {
  std::vector<long long> count;               // K*M winner tallies
  std::vector<double> y_sum, y_sumsq;         // K*M winner rate moments
  std::vector<double> u_sum, u_sumsq;         // K per-trial user totals
  double s_sum = 0.0, s_sumsq = 0.0;          // per-trial sum rate
  long long collisions = 0;

  BlockAccum(std::size_t k0, std::size_t m)
      : count(k0 * m, 0),
        y_sum(k0 * m, 0.0),
        y_sumsq(k0 * m, 0.0),
        u_sum(k0, 0.0),
        u_sumsq(k0, 0.0) {}
};

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("RBLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("RBLAB_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

struct Engine {
  const Scenario& s;
  std::vector<SinrDistribution> dists;
  std::size_t m, k0;
  std::uint64_t seed;
  long long trials;
  const TrialObserver* observer;
  const kern::KernelOps& ops;
  std::vector<BlockAccum> blocks;
  std::atomic<std::uint64_t> next_block{0};

  Engine(const Scenario& sc, long long n, std::uint64_t sd,
         const TrialObserver* obs)
      : s(sc),
        m(static_cast<std::size_t>(sc.num_antennas)),
        k0(sc.users.size()),
        seed(sd),
        trials(n),
        observer(obs),
        ops(kern::active()) {
    dists.reserve(k0);
    for (std::size_t k = 0; k < k0; k++)
      dists.push_back(user_distribution(sc, static_cast<int>(k)));
    const auto nblocks =
        (static_cast<std::uint64_t>(n) + kBlockTrials - 1) / kBlockTrials;
    blocks.assign(nblocks, BlockAccum(k0, m));
  }

  void worker() {
    chan::Workspace ws;
    std::vector<double> beams(2 * m * m), h(2 * m), proj(m), z(m);
    std::vector<double> best_lt(m), best_z(m), rate(m);
    std::vector<int> best_k(m);

    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= blocks.size()) return;
      BlockAccum& acc = blocks[b];
      const std::uint64_t lo = b * kBlockTrials;
      const std::uint64_t hi =
          std::min<std::uint64_t>(lo + kBlockTrials,
                                  static_cast<std::uint64_t>(trials));
      for (std::uint64_t t = lo; t < hi; t++) run_trial(t, acc, ws, beams, h,
                                                        proj, z, best_lt,
                                                        best_z, rate, best_k);
    }
  }

  void run_trial(std::uint64_t t, BlockAccum& acc, chan::Workspace& ws,
                 std::vector<double>& beams, std::vector<double>& h,
                 std::vector<double>& proj, std::vector<double>& z,
                 std::vector<double>& best_lt, std::vector<double>& best_z,
                 std::vector<double>& rate, std::vector<int>& best_k) {
    chan::fill_beams(ops, beams.data(), m, seed, t,
                     kern::pack_stream(kern::Purpose::serving_beams, 0, 0),
                     ws);
    for (std::size_t mm = 0; mm < m; mm++) {
      best_lt[mm] = std::numeric_limits<double>::infinity();
      best_k[mm] = 0;
      best_z[mm] = 0.0;
    }
    for (std::size_t k = 0; k < k0; k++) {
      const auto& prof = s.users[k];
      const auto user = static_cast<std::uint32_t>(k);
      chan::fill_gaussian_row(
          ops, h.data(), m, seed, t,
          kern::pack_stream(kern::Purpose::serving_channel, user, 0), ws);
      double cross = 1.0;
      for (std::size_t b = 0; b < prof.rho_interferers.size(); b++) {
        cross += prof.rho_interferers[b] *
                 chan::interference_power(
                     ops, m, seed, t,
                     kern::pack_stream(kern::Purpose::interferer_channel,
                                       user, static_cast<std::uint32_t>(b + 1)),
                     ws);
      }
      chan::sinr_row(ops, h.data(), beams.data(), m, prof.rho_serving, cross,
                     proj.data(), z.data());
      // The CDF is monotone in the log tail, so comparing log tails picks the
      // same winner while staying strictly monotone deep into the tail where
      // the CDF itself rounds to 1.
      for (std::size_t mm = 0; mm < m; mm++) {
        const double lt = log_tail(dists[k], z[mm]);
        if (lt < best_lt[mm]) {
          best_lt[mm] = lt;
          best_k[mm] = static_cast<int>(k);
          best_z[mm] = z[mm];
        }
      }
    }

    double trial_rate = 0.0;
    for (std::size_t mm = 0; mm < m; mm++) {
      const double r = std::log1p(best_z[mm]) * std::numbers::log2e;
      rate[mm] = r;
      trial_rate += r;
      const std::size_t cell = static_cast<std::size_t>(best_k[mm]) * m + mm;
      acc.count[cell]++;
      acc.y_sum[cell] += r;
      acc.y_sumsq[cell] += r * r;
    }
    acc.s_sum += trial_rate;
    acc.s_sumsq += trial_rate * trial_rate;

    // Per-user totals: group this trial's winnings by user so the square of
    // a multi-beam win includes its cross terms.
    bool collided = false;
    for (std::size_t mm = 0; mm < m; mm++) {
      const int k = best_k[mm];
      bool seen = false;
      for (std::size_t prev = 0; prev < mm; prev++) {
        if (best_k[prev] == k) {
          seen = true;
          collided = true;
          break;
        }
      }
      if (seen) continue;
      double u = rate[mm];
      for (std::size_t later = mm + 1; later < m; later++)
        if (best_k[later] == k) u += rate[later];
      acc.u_sum[static_cast<std::size_t>(k)] += u;
      acc.u_sumsq[static_cast<std::size_t>(k)] += u * u;
    }
    if (collided) acc.collisions++;

    if (observer && *observer) {
      ScheduleOutcome o;
      o.selected_user.assign(best_k.begin(), best_k.end());
      o.true_sinr.assign(best_z.begin(), best_z.end());
      o.virtual_sinr.resize(m);
      for (std::size_t mm = 0; mm < m; mm++)
        o.virtual_sinr[mm] = -std::expm1(best_lt[mm]);
      o.trial_rate = trial_rate;
      (*observer)(t, o);
    }
  }
};

double stderr_of_mean(double sum, double sumsq, long long n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  double var = (sumsq - nn * mean * mean) / (nn - 1.0);
  if (var < 0.0) var = 0.0;  // tiny negative from cancellation
  return std::sqrt(var / nn);
}

}  // namespace

double cdf_transform(const SinrDistribution& d, double z) {
  return cdf_sinr(d, z);
}

ScheduleOutcome schedule(const ChannelDraw& draw,
                         const std::vector<SinrDistribution>& distributions) {
  const std::size_t m = draw.num_beams;
  const std::size_t k0 = distributions.size();
  if (k0 == 0 || draw.sinr.size() != k0 * m)
    throw std::invalid_argument(
        "sinr matrix does not match the distribution list");

  ScheduleOutcome o;
  o.selected_user.resize(m);
  o.virtual_sinr.resize(m);
  o.true_sinr.resize(m);
  for (std::size_t mm = 0; mm < m; mm++) {
    double best = std::numeric_limits<double>::infinity();
    int bk = 0;
    for (std::size_t k = 0; k < k0; k++) {
      const double lt = log_tail(distributions[k], draw.sinr[k * m + mm]);
      if (lt < best) {
        best = lt;
        bk = static_cast<int>(k);
      }
    }
    o.selected_user[mm] = bk;
    o.true_sinr[mm] = draw.sinr[static_cast<std::size_t>(bk) * m + mm];
    o.virtual_sinr[mm] = -std::expm1(best);
  }
  double s = 0.0;
  for (std::size_t mm = 0; mm < m; mm++)
    s += std::log1p(o.true_sinr[mm]) * std::numbers::log2e;
  o.trial_rate = s;
  return o;
}

SimulationReport simulate(const Scenario& s, long long trials,
                          std::uint64_t seed, int workers,
                          const TrialObserver& observer) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  validate_or_throw(s);

  Engine eng(s, trials, seed, observer ? &observer : nullptr);
  const int want = resolve_workers(workers);
  const auto nthreads = std::min<std::size_t>(
      static_cast<std::size_t>(want), eng.blocks.size());
  if (nthreads <= 1) {
    eng.worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; i++)
      pool.emplace_back([&eng] { eng.worker(); });
    for (auto& th : pool) th.join();
  }

  const std::size_t k0 = eng.k0, m = eng.m;
  SimulationReport rep;
  rep.trials = trials;
  rep.selection_counts.assign(k0 * m, 0);
  rep.per_beam_mean_rate.assign(k0 * m, 0.0);
  rep.per_beam_rate_stderr.assign(k0 * m, 0.0);
  rep.per_user_rate.assign(k0, 0.0);
  rep.per_user_rate_stderr.assign(k0, 0.0);
  rep.per_user_individual_sum_rate.assign(k0, 0.0);

  // Fold the blocks in index order; the order never depends on the worker
  // schedule, so neither do the sums.
  std::vector<KahanAcc> y_sum(k0 * m), y_sumsq(k0 * m);
  std::vector<KahanAcc> u_sum(k0), u_sumsq(k0);
  KahanAcc s_sum, s_sumsq;
  long long collisions = 0;
  for (const auto& b : eng.blocks) {
    for (std::size_t e = 0; e < k0 * m; e++) {
      rep.selection_counts[e] += b.count[e];
      y_sum[e].add(b.y_sum[e]);
      y_sumsq[e].add(b.y_sumsq[e]);
    }
    for (std::size_t k = 0; k < k0; k++) {
      u_sum[k].add(b.u_sum[k]);
      u_sumsq[k].add(b.u_sumsq[k]);
    }
    s_sum.add(b.s_sum);
    s_sumsq.add(b.s_sumsq);
    collisions += b.collisions;
  }

  const double nn = static_cast<double>(trials);
  rep.mean_sum_rate = s_sum.sum / nn;
  rep.sum_rate_stderr = stderr_of_mean(s_sum.sum, s_sumsq.sum, trials);
  for (std::size_t e = 0; e < k0 * m; e++) {
    rep.per_beam_mean_rate[e] = y_sum[e].sum / nn;
    rep.per_beam_rate_stderr[e] =
        stderr_of_mean(y_sum[e].sum, y_sumsq[e].sum, trials);
  }
  for (std::size_t k = 0; k < k0; k++) {
    rep.per_user_rate[k] = u_sum[k].sum / nn;
    rep.per_user_rate_stderr[k] =
        stderr_of_mean(u_sum[k].sum, u_sumsq[k].sum, trials);
    rep.per_user_individual_sum_rate[k] =
        static_cast<double>(k0) * rep.per_user_rate[k];
  }
  rep.multi_beam_collision_rate = static_cast<double>(collisions) / nn;
  return rep;
}

}  // namespace rblab
