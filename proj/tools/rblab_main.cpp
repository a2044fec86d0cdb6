// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Four subcommands share one scenario config:
//   rate      analytic individual sum rates (closed form and/or quadrature)
//   simulate  Monte Carlo scheduling run, per-beam CSV
//   scaling   level crossings, windows and rate growth over a K0 grid
//   validate  distribution, fairness and cross-method checks, pass/fail
// Tables go to stdout with a '# key=value' provenance header; timing and
// diagnostics go to stderr so reruns stay byte-identical.
// Exit codes: 0 success, 1 a validation check failed, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rblab/analytic.hpp"
#include "rblab/channel.hpp"
#include "rblab/manifest.hpp"
#include "rblab/rate.hpp"
#include "rblab/scaling.hpp"
#include "rblab/scenario.hpp"
#include "rblab/sched.hpp"

namespace {

using namespace rblab;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct LoadedConfig {
  Scenario scenario;
  std::string path;
  std::uint64_t hash = 0;
};

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open config file: " + path);
  std::string bytes{std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>()};
  return {parse_scenario(bytes), path, fnv1a64(bytes)};
}

// Grid spec: either 'min:max:count' (log-spaced, endpoints included) or a
// comma-separated list of populations.
std::vector<long long> parse_k0_grid(const std::string& spec) {
  std::vector<long long> grid;
  if (spec.find(':') != std::string::npos) {
    long long lo = 0, hi = 0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "%lld:%lld:%d", &lo, &hi, &n) != 3 ||
        lo < 1 || hi < lo || n < 1) {
      throw std::invalid_argument("bad k0 grid '" + spec +
                                  "': want min:max:count");
    }
    if (n == 1) {
      if (hi != lo)
        throw std::invalid_argument("k0 grid count 1 needs min == max");
      grid.push_back(lo);
    } else {
      const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
      for (int i = 0; i < n; i++) {
        const double v =
            lo * std::pow(ratio, static_cast<double>(i) / (n - 1));
        const long long k = std::llround(v);
        // Rounding can collapse neighbouring points on a dense grid.
        if (grid.empty() || k > grid.back()) grid.push_back(k);
      }
    }
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      const long long v = std::stoll(tok, &pos);
      if (pos != tok.size())
        throw std::invalid_argument("bad k0 grid entry '" + tok + "'");
      grid.push_back(v);
    }
    if (grid.empty())
      throw std::invalid_argument("k0 grid '" + spec + "' is empty");
  }
  return grid;
}

// One-sample Kolmogorov-Smirnov machinery for `validate`. The critical
// value is the 1% asymptotic constant with the usual finite-sample
// correction sqrt(n) -> sqrt(n) + 0.12 + 0.11/sqrt(n).
double ks_critical_1pct(double n) {
  const double rn = std::sqrt(n);
  return 1.62762 / (rn + 0.12 + 0.11 / rn);
}

template <class Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); i++) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

int run_rate(const LoadedConfig& cfg, int user, bool all,
             const std::string& method) {
  const Scenario& s = cfg.scenario;
  const int num_users = static_cast<int>(s.users.size());
  std::vector<int> targets;
  if (all) {
    for (int k = 0; k < num_users; k++) targets.push_back(k);
  } else {
    targets.push_back(user);
  }

  RunManifest mf("rate");
  mf.add("config", cfg.path);
  mf.add_hash("config_hash", cfg.hash);
  mf.add("users", static_cast<long long>(num_users));
  mf.add("user", all ? std::string("all") : std::to_string(user));
  mf.add("method", method);
  mf.write(std::cout);

  if (method == "closed") {
    std::cout << "user,rate_closed\n";
  } else if (method == "quadrature") {
    std::cout << "user,rate_quadrature\n";
  } else {
    std::cout << "user,rate_closed,rate_quadrature,rel_discrepancy\n";
  }

  int code = 0;
  for (int k : targets) {
    double closed = 0.0, quad = 0.0;
    if (method != "quadrature") {
      try {
        closed = individual_sum_rate_closed(s, k);
      } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: rerun with --method quadrature\n";
        return 2;
      }
    }
    if (method != "closed") quad = individual_sum_rate_quadrature(s, k);

    if (method == "closed") {
      std::cout << k << ',' << fmt(closed) << "\n";
    } else if (method == "quadrature") {
      std::cout << k << ',' << fmt(quad) << "\n";
    } else {
      const double rel =
          std::fabs(closed - quad) / std::max(std::fabs(quad), 1e-300);
      if (rel > 1e-5) code = 1;
      std::cout << k << ',' << fmt(closed) << ',' << fmt(quad) << ','
                << fmt(rel) << "\n";
    }
  }
  return code;
}

int run_simulate(const LoadedConfig& cfg, long long trials,
                 std::uint64_t seed) {
  RunManifest mf("simulate");
  mf.add("config", cfg.path);
  mf.add_hash("config_hash", cfg.hash);
  mf.add("trials", trials);
  mf.add_u64("seed", seed);
  mf.write(std::cout);

  const SimulationReport rep = simulate(cfg.scenario, trials, seed);
  const int num_users = static_cast<int>(cfg.scenario.users.size());
  const int m = cfg.scenario.num_antennas;

  std::cout
      << "user,beam,selection_count,mean_rate,stderr,"
         "individual_sum_rate_empirical\n";
  for (int k = 0; k < num_users; k++) {
    for (int beam = 0; beam < m; beam++) {
      const std::size_t idx = static_cast<std::size_t>(k) * m + beam;
      std::cout << k << ',' << beam << ',' << rep.selection_counts[idx]
                << ',' << fmt(rep.per_beam_mean_rate[idx]) << ','
                << fmt(rep.per_beam_rate_stderr[idx]) << ','
                << fmt(rep.per_user_individual_sum_rate[k]) << "\n";
    }
  }
  // Summary: mean sum rate and its standard error in the rate columns, the
  // multi-beam collision rate in the final column.
  std::cout << "summary,,," << fmt(rep.mean_sum_rate) << ','
            << fmt(rep.sum_rate_stderr) << ','
            << fmt(rep.multi_beam_collision_rate) << "\n";
  return 0;
}

int run_scaling(const LoadedConfig& cfg, int user, const std::string& grid_spec,
                long long with_mc, std::uint64_t seed) {
  const auto grid = parse_k0_grid(grid_spec);

  RunManifest mf("scaling");
  mf.add("config", cfg.path);
  mf.add_hash("config_hash", cfg.hash);
  mf.add("user", static_cast<long long>(user));
  mf.add("k0_grid", grid_spec);
  mf.add("with_mc", with_mc);
  mf.add_u64("seed", seed);
  mf.write(std::cout);

  const ScalingSweep sweep =
      scaling_ratio_sweep(cfg.scenario, user, grid, with_mc, seed);

  std::cout << "K0,w,w_two_term,w_lb,w_ub,lo,hi,rate_bits,scaling_ratio,"
               "eq27_bound";
  if (with_mc > 0) std::cout << ",mc_in_window_freq";
  std::cout << "\n";
  for (const ScalingRow& r : sweep.rows) {
    std::cout << r.k0 << ',' << fmt(r.w) << ',' << fmt(r.w_two_term) << ','
              << fmt(r.w_lb) << ',' << fmt(r.w_ub) << ',' << fmt(r.lo) << ','
              << fmt(r.hi) << ',' << fmt(r.rate_bits) << ','
              << fmt(r.scaling_ratio) << ',' << fmt(r.eq27_bound);
    if (with_mc > 0) std::cout << ',' << fmt(r.mc_in_window_freq);
    std::cout << "\n";
  }
  return 0;
}

int run_validate(const LoadedConfig& cfg, long long trials,
                 std::uint64_t seed, bool corrupt) {
  const Scenario& s = cfg.scenario;
  const int num_users = static_cast<int>(s.users.size());
  const int m = s.num_antennas;
  const std::size_t n = static_cast<std::size_t>(trials);

  RunManifest mf("validate");
  mf.add("config", cfg.path);
  mf.add_hash("config_hash", cfg.hash);
  mf.add("trials", trials);
  mf.add_u64("seed", seed);
  mf.add("corrupt_rho", corrupt ? 1LL : 0LL);
  mf.write(std::cout);

  // Analytic references. The negative-control flag corrupts user 0's
  // serving SNR on this side only; the simulated side keeps the true
  // config, so the distribution checks must detect the mismatch.
  std::vector<SinrDistribution> ref;
  ref.reserve(num_users);
  for (int k = 0; k < num_users; k++) {
    UserChannelProfile p = s.users[k];
    if (corrupt && k == 0) p.rho_serving *= 1.5;
    ref.push_back(make_distribution(m, p.rho_serving, p.rho_interferers));
  }

  bool all_pass = true;
  auto note = [&all_pass](const std::string& line, bool pass) {
    std::cout << line << (pass ? " PASS" : " FAIL") << "\n";
    if (!pass) all_pass = false;
  };
  char line[160];
  const double crit = ks_critical_1pct(static_cast<double>(n));

  // Per-user SINR samples on beam 0, one per independent channel draw.
  std::vector<std::vector<double>> z(num_users);
  for (auto& v : z) v.reserve(n);
  for (long long t = 0; t < trials; t++) {
    const ChannelDraw draw =
        draw_channel(s, seed, static_cast<std::uint64_t>(t));
    for (int k = 0; k < num_users; k++)
      z[k].push_back(draw.sinr[static_cast<std::size_t>(k) * m]);
  }
  for (int k = 0; k < num_users; k++) {
    std::sort(z[k].begin(), z[k].end());
    const double d_cdf = ks_statistic(
        z[k], [&](double x) { return cdf_sinr(ref[k], x); });
    std::snprintf(line, sizeof line, "sinr_cdf user=%d ks=%.6f crit=%.6f", k,
                  d_cdf, crit);
    note(line, d_cdf < crit);

    // The scheduler's virtual SINR must be uniform on [0,1]; the transform
    // is monotone, so the sorted order carries over. This exercises the
    // scheduler's own transform, a separate code path from cdf_sinr; when
    // the two agree bitwise the printed statistics coincide.
    std::vector<double> u(z[k].size());
    for (std::size_t i = 0; i < u.size(); i++)
      u[i] = cdf_transform(ref[k], z[k][i]);
    const double d_u = ks_statistic(u, [](double x) { return x; });
    std::snprintf(line, sizeof line,
                  "virtual_uniform user=%d ks=%.6f crit=%.6f", k, d_u, crit);
    note(line, d_u < crit);
  }

  // Winner checks ride on one scheduled simulation: the maximum of the
  // per-user uniforms has CDF u^K whatever the SNR profiles are.
  std::vector<double> winner(n);
  const SimulationReport rep = simulate(
      s, trials, seed, 0,
      [&winner](std::uint64_t t, const ScheduleOutcome& outcome) {
        winner[t] = outcome.virtual_sinr[0];
      });
  std::sort(winner.begin(), winner.end());
  const double d_w = ks_statistic(winner, [num_users](double x) {
    return std::pow(x, num_users);
  });
  std::snprintf(line, sizeof line, "winner_virtual_cdf ks=%.6f crit=%.6f",
                d_w, crit);
  note(line, d_w < crit);

  // Fairness: each (user, beam) selection count is Binomial(N, 1/K).
  const double p = 1.0 / num_users;
  const double expected = static_cast<double>(trials) * p;
  const double sigma =
      std::sqrt(static_cast<double>(trials) * p * (1.0 - p));
  for (int k = 0; k < num_users; k++) {
    for (int beam = 0; beam < m; beam++) {
      const long long count =
          rep.selection_counts[static_cast<std::size_t>(k) * m + beam];
      const bool pass = std::fabs(count - expected) <= 3.0 * sigma;
      std::snprintf(line, sizeof line,
                    "fairness user=%d beam=%d count=%lld expected=%.1f "
                    "sigma=%.1f",
                    k, beam, count, expected, sigma);
      note(line, pass);
    }
  }

  // Cross-method rate agreement at the configured population.
  if (num_users <= kClosedFormMaxUsers) {
    for (int k = 0; k < num_users; k++) {
      const double closed = individual_sum_rate_closed(s, k);
      const double quad = individual_sum_rate_quadrature(s, k);
      const double rel =
          std::fabs(closed - quad) / std::max(std::fabs(quad), 1e-300);
      std::snprintf(line, sizeof line,
                    "rate_match user=%d closed=%.12g quadrature=%.12g "
                    "rel=%.3g",
                    k, closed, quad, rel);
      note(line, rel <= 1e-5);
    }
  } else {
    std::cout << "rate_match skipped: population exceeds the closed-form "
                 "cap\n";
  }

  std::cout << (all_pass ? "validate: PASS\n" : "validate: FAIL\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Random-beamforming downlink laboratory: analytic rates, Monte Carlo "
      "simulation and scaling sweeps from one scenario config."};
  app.footer(
      "Environment: RBLAB_WORKERS caps simulation worker threads; "
      "RBLAB_KERNEL=scalar|avx2|neon pins the compute backend.");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;

  auto* rate = app.add_subcommand(
      "rate", "Analytic individual sum rate per user");
  int rate_user = 0;
  bool rate_all = false;
  std::string method = "closed";
  rate->add_option("config", config_path, "scenario config JSON")->required();
  auto* rate_user_opt = rate->add_option("--user", rate_user, "user index");
  rate->add_flag("--all", rate_all, "report every user");
  rate->add_option("--method", method, "closed, quadrature or both")
      ->check(CLI::IsMember({"closed", "quadrature", "both"}));

  auto* sim = app.add_subcommand(
      "simulate", "Monte Carlo scheduling run, per-beam CSV");
  long long sim_trials = 100000;
  sim->add_option("config", config_path, "scenario config JSON")->required();
  sim->add_option("--trials", sim_trials, "number of channel realizations")
      ->check(CLI::Range(1LL, 1000000000000LL));
  sim->add_option("--seed", seed, "RNG seed");

  auto* scal = app.add_subcommand(
      "scaling", "Level crossings and rate growth over a population grid");
  int scal_user = 0;
  std::string grid_spec = "1000:1000000000:7";
  long long with_mc = 0;
  scal->add_option("config", config_path, "scenario config JSON")->required();
  scal->add_option("--user", scal_user, "user index");
  scal->add_option("--k0-grid", grid_spec,
                   "min:max:count log-spaced, or comma list");
  scal->add_option("--with-mc", with_mc,
                   "Monte Carlo trials for the window-frequency column");
  scal->add_option("--seed", seed, "RNG seed");

  auto* val = app.add_subcommand(
      "validate", "Distribution, fairness and cross-method checks");
  long long val_trials = 20000;
  bool corrupt = false;
  val->add_option("config", config_path, "scenario config JSON")->required();
  val->add_option("--trials", val_trials, "trials per check, minimum 10000")
      ->check(CLI::Range(10000LL, 1000000000000LL));
  val->add_option("--seed", seed, "RNG seed");
  val->add_flag("--corrupt-rho", corrupt,
                "negative control: skew user 0's analytic SNR so the "
                "distribution checks must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  std::string command;
  try {
    if (rate->parsed()) {
      command = "rate";
      if (rate_all == (rate_user_opt->count() > 0)) {
        std::cerr << "error: pass exactly one of --user or --all\n";
        return 2;
      }
      code = run_rate(load_config(config_path), rate_user, rate_all, method);
    } else if (sim->parsed()) {
      command = "simulate";
      code = run_simulate(load_config(config_path), sim_trials, seed);
    } else if (scal->parsed()) {
      command = "scaling";
      code = run_scaling(load_config(config_path), scal_user, grid_spec,
                         with_mc, seed);
    } else if (val->parsed()) {
      command = "validate";
      code = run_validate(load_config(config_path), val_trials, seed, corrupt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;
  std::fprintf(stderr, "%s: completed in %.2f s\n", command.c_str(),
               elapsed.count());
  return code;
}
