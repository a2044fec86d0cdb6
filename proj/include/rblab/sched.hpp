// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/channel.hpp"
#include "rblab/scenario.hpp"

namespace rblab {

// Result of scheduling one channel realization: per beam, the selected user,
// its virtual SINR (the user's own CDF evaluated at its true SINR) and the
// true SINR itself. trial_rate is sum_m log2(1 + true_sinr[m]) in bits per
// channel use. One user may win several beams.
struct ScheduleOutcome {
  std::vector<int> selected_user;
  std::vector<double> virtual_sinr;
  std::vector<double> true_sinr;
  double trial_rate = 0.0;
};

// Aggregates over a simulation run. Per-beam quantities are row-major
// num_users x num_beams. per_beam_mean_rate[k*M+m] is the mean over all
// trials of log2(1 + Z_{k,m}) * 1[user k won beam m], so summing it over
// beams gives per_user_rate[k]. Standard errors come from the sample
// variance across trials, user-level ones from the per-trial user totals so
// that a user winning several beams in one trial is accounted exactly.
struct SimulationReport {
  long long trials = 0;
  double mean_sum_rate = 0.0;
  double sum_rate_stderr = 0.0;
  std::vector<double> per_user_rate;
  std::vector<double> per_user_rate_stderr;
  // num_users times per_user_rate: the cell's rate if everyone shared user
  // k's statistics.
  std::vector<double> per_user_individual_sum_rate;
  std::vector<long long> selection_counts;
  std::vector<double> per_beam_mean_rate;
  std::vector<double> per_beam_rate_stderr;
  // Fraction of trials in which some user won two or more beams.
  double multi_beam_collision_rate = 0.0;
};

// The user's own CDF at z. Over random draws of Z the output is uniform on
// [0,1], which is what makes the argmax fair under heterogeneous statistics.
// Throws std::domain_error for z < 0.
double cdf_transform(const SinrDistribution& d, double z);

// Per-beam argmax of the virtual SINR. The comparison runs on the log tail
// scale, where the CDF is strictly monotone without rounding plateaus, so
// deep-tail draws cannot produce artificial ties; genuine ties go to the
// lowest user index. distributions[k] must be user k's own distribution.
ScheduleOutcome schedule(const ChannelDraw& draw,
                         const std::vector<SinrDistribution>& distributions);

// Called once per trial with the outcome. With several workers, calls come
// concurrently from worker threads in no particular order; each trial index
// appears exactly once, so writing to disjoint per-trial slots is safe
// without locking.
using TrialObserver =
    std::function<void(std::uint64_t trial, const ScheduleOutcome&)>;

// Monte Carlo engine: draws `trials` independent realizations, schedules
// each, and aggregates. Deterministic in (s, trials, seed): trials are
// processed in fixed blocks whose partial sums are folded in block order, so
// the report is bit-identical for any worker count. workers = 0 means use
// the RBLAB_WORKERS environment variable, or the hardware thread count if
// unset. Throws std::invalid_argument for trials < 1 and ScenarioError for
// an invalid scenario.
SimulationReport simulate(const Scenario& s, long long trials,
                          std::uint64_t seed, int workers = 0,
                          const TrialObserver& observer = {});

}  // namespace rblab
