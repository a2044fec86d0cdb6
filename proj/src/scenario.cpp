// SPDX-License-Identifier: Apache-2.0

#include "rblab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rblab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

void require_positive(double v, const std::string& field) {
  if (!(v > 0) || !std::isfinite(v)) fail(field + " must be positive and finite");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail("unknown key \"" + item.key() + "\" in " + where);
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Fetch a scalar that may be spelled "<name>" (linear) or "<name>_db".
double scalar_field(const json& obj, const std::string& name,
                    const std::string& where) {
  bool lin = obj.contains(name), db = obj.contains(name + "_db");
  if (lin && db) fail(where + ": give " + name + " either linear or in dB, not both");
  if (!lin && !db) fail(where + ": missing " + name);
  const json& v = lin ? obj.at(name) : obj.at(name + "_db");
  if (!v.is_number()) fail(where + ": " + name + " must be a number");
  return lin ? v.get<double>() : db_to_linear(v.get<double>());
}

std::vector<double> list_field(const json& obj, const std::string& name,
                               const std::string& where) {
  bool lin = obj.contains(name), db = obj.contains(name + "_db");
  if (lin && db) fail(where + ": give " + name + " either linear or in dB, not both");
  if (!lin && !db) fail(where + ": missing " + name);
  const json& v = lin ? obj.at(name) : obj.at(name + "_db");
  if (!v.is_array()) fail(where + ": " + name + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(where + ": " + name + " entries must be numbers");
    out.push_back(lin ? e.get<double>() : db_to_linear(e.get<double>()));
  }
  return out;
}

UserChannelProfile parse_user(const json& u, int M, int idx) {
  const std::string where = "users[" + std::to_string(idx) + "]";
  if (!u.is_object()) fail(where + " must be an object");
  if (u.contains("user_id")) {
    if (!u.at("user_id").is_number_integer() || u.at("user_id").get<int>() != idx)
      fail(where + ": user_id must equal the array position " + std::to_string(idx));
  }
  if (u.contains("raw")) {
    reject_unknown_keys(u, {"raw", "user_id"}, where);
    const json& r = u.at("raw");
    if (!r.is_object()) fail(where + ".raw must be an object");
    reject_unknown_keys(r,
                        {"gain_serving", "gain_serving_db", "gains_interferers",
                         "gains_interferers_db", "power_serving",
                         "power_serving_db", "powers_interferers",
                         "powers_interferers_db", "noise_power",
                         "noise_power_db"},
                        where + ".raw");
    RawChannelProfile raw;
    raw.gain_serving = scalar_field(r, "gain_serving", where);
    raw.power_serving = scalar_field(r, "power_serving", where);
    raw.noise_power = scalar_field(r, "noise_power", where);
    raw.gains_interferers = list_field(r, "gains_interferers", where);
    raw.powers_interferers = list_field(r, "powers_interferers", where);
    return normalize(raw, M, idx);
  }
  reject_unknown_keys(u, {"rho_serving", "rho_interferers", "user_id"}, where);
  UserChannelProfile p;
  p.user_id = idx;
  if (!u.contains("rho_serving") || !u.at("rho_serving").is_number())
    fail(where + ": missing numeric rho_serving");
  p.rho_serving = u.at("rho_serving").get<double>();
  if (u.contains("rho_interferers")) {
    const json& arr = u.at("rho_interferers");
    if (!arr.is_array()) fail(where + ": rho_interferers must be an array");
    for (const auto& e : arr) {
      if (!e.is_number()) fail(where + ": rho_interferers entries must be numbers");
      p.rho_interferers.push_back(e.get<double>());
    }
  }
  return p;
}

}  // namespace

UserChannelProfile normalize(const RawChannelProfile& raw, int num_antennas,
                             int user_id) {
  if (num_antennas < 1) fail("num_antennas must be at least 1");
  if (raw.gains_interferers.size() != raw.powers_interferers.size())
    fail("gains_interferers and powers_interferers must have equal length");
  require_positive(raw.gain_serving, "gain_serving");
  require_positive(raw.power_serving, "power_serving");
  require_positive(raw.noise_power, "noise_power");
  UserChannelProfile p;
  p.user_id = user_id;
  double denom = num_antennas * raw.noise_power;
  p.rho_serving = raw.gain_serving * raw.power_serving / denom;
  for (std::size_t b = 0; b < raw.gains_interferers.size(); b++) {
    require_positive(raw.gains_interferers[b],
                     "gains_interferers[" + std::to_string(b) + "]");
    require_positive(raw.powers_interferers[b],
                     "powers_interferers[" + std::to_string(b) + "]");
    p.rho_interferers.push_back(raw.gains_interferers[b] *
                                raw.powers_interferers[b] / denom);
  }
  return p;
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  if (s.num_antennas < 1) errors.push_back("num_antennas must be at least 1");
  if (s.users.empty()) errors.push_back("no users");
  // The RNG stream tag reserves 20 bits for the user and 8 for the cell;
  // anything larger would silently alias substreams.
  if (s.users.size() > (1u << 20))
    errors.push_back("at most 1048576 users are supported");
  std::set<int> seen;
  for (std::size_t k = 0; k < s.users.size(); k++) {
    const auto& u = s.users[k];
    const std::string who = "user " + std::to_string(u.user_id);
    if (!seen.insert(u.user_id).second)
      errors.push_back("duplicate user_id " + std::to_string(u.user_id));
    if (u.rho_interferers.size() > 255)
      errors.push_back(who + ": at most 255 interfering cells are supported");
    if (!(u.rho_serving > 0) || !std::isfinite(u.rho_serving))
      errors.push_back(who + ": rho_serving must be positive and finite");
    for (std::size_t b = 0; b < u.rho_interferers.size(); b++) {
      double r = u.rho_interferers[b];
      if (!(r > 0) || !std::isfinite(r))
        errors.push_back(who + ": rho_interferers[" + std::to_string(b) +
                         "] must be positive and finite");
    }
  }
  if (!s.users.empty()) {
    // together with the duplicate check this enforces ids = 0..K0-1
    if (*seen.begin() != 0 ||
        *seen.rbegin() != static_cast<int>(s.users.size()) - 1)
      errors.push_back("user_id values must be contiguous from 0");
  }
  return errors;
}

void validate_or_throw(const Scenario& s) {
  auto errors = validate(s);
  if (errors.empty()) return;
  std::string joined;
  for (const auto& e : errors) {
    if (!joined.empty()) joined += "; ";
    joined += e;
  }
  fail(joined);
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config root must be an object");
  reject_unknown_keys(j, {"num_antennas", "users"}, "config root");
  Scenario s;
  if (!j.contains("num_antennas") || !j.at("num_antennas").is_number_integer())
    fail("missing integer num_antennas");
  s.num_antennas = j.at("num_antennas").get<int>();
  if (!j.contains("users") || !j.at("users").is_array())
    fail("missing users array");
  int idx = 0;
  for (const auto& u : j.at("users")) {
    s.users.push_back(parse_user(u, s.num_antennas, idx));
    idx++;
  }
  validate_or_throw(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace rblab
