// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rblab {

// Effective per-cell SNRs for one user, linear scale. rho_serving is the
// serving cell's rho_0; rho_interferers holds one entry per interfering
// cell, order preserved. Interferer counts may differ between users.
struct UserChannelProfile {
  int user_id = 0;
  double rho_serving = 1.0;
  std::vector<double> rho_interferers;
};

// Link-budget ingredients before normalization. Gains and powers are linear;
// the config file also accepts dB variants and converts at parse time.
struct RawChannelProfile {
  double gain_serving = 1.0;
  std::vector<double> gains_interferers;
  double power_serving = 1.0;
  std::vector<double> powers_interferers;
  double noise_power = 1.0;
};

struct Scenario {
  int num_antennas = 1;
  std::vector<UserChannelProfile> users;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rho = G * p / (M * sigma^2) for the serving cell and each interferer.
// Throws ScenarioError naming the offending field if any input is not
// strictly positive (or the interferer lists disagree in length).
UserChannelProfile normalize(const RawChannelProfile& raw, int num_antennas,
                             int user_id = 0);

// All invariant violations, empty when the scenario is well formed.
std::vector<std::string> validate(const Scenario& s);

// Convenience wrapper: throws ScenarioError with every violation joined by
// "; " when validate() is nonempty.
void validate_or_throw(const Scenario& s);

// JSON ingestion. Schema (unknown keys are rejected at every level):
//   {
//     "num_antennas": <int>,
//     "users": [
//       {"rho_serving": <num>, "rho_interferers": [<num>, ...]},
//       {"raw": {"gain_serving": .., "gains_interferers": [..],
//                "power_serving": .., "powers_interferers": [..],
//                "noise_power": ..}},
//       ...
//     ]
//   }
// Every raw field also has a "_db" variant (gain_serving_db, ...); a field
// may be given in exactly one of the two forms. "rho_interferers" may be
// omitted for an interference-free user. An optional "user_id" must match
// the array position. The result is validated before being returned.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace rblab
