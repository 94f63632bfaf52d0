// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relaytx/config.hpp"

#include <set>

#include <json.hpp>

namespace relaytx {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object())
    throw ConfigError("config: expected an object at '" + path + "'");
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      throw ConfigError("config: unknown key '" +
                        (path.empty() ? item.key() : path + "." + item.key()) + "'");
  for (const std::string& key : required)
    if (!obj.contains(key))
      throw ConfigError("config: missing key '" +
                        (path.empty() ? key : path + "." + key) + "'");
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("config: '" + path + "' must be a number");
  return v.get<double>();
}

long integer_at(const json& v, const std::string& path) {
  if (!v.is_number_integer())
    throw ConfigError("config: '" + path + "' must be an integer");
  return v.get<long>();
}

// Scalar or per-hop array of correlation bases.
std::vector<double> correlation_list(const json& v, const std::string& path,
                                     size_t n_hops) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(n_hops, v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(number_at(e, path));
    if (out.size() != n_hops)
      throw ConfigError("config: '" + path + "' needs one entry per hop");
  } else {
    throw ConfigError("config: '" + path + "' must be a number or array");
  }
  for (double r : out)
    if (!(r >= 0.0 && r < 1.0))
      throw ConfigError("config: '" + path + "' entries must be in [0, 1)");
  return out;
}

}  // namespace

DesignKind parse_design_kind(const std::string& s) {
  if (s == "robust") return DesignKind::Robust;
  if (s == "baseline") return DesignKind::Baseline;
  throw ConfigError("config: unknown design kind '" + s + "'");
}

ObjectiveKind parse_objective_kind(const std::string& s) {
  if (s == "max-mse") return ObjectiveKind::MaxMse;
  if (s == "sum-mse") return ObjectiveKind::SumMse;
  if (s == "mutual-info") return ObjectiveKind::MutualInfo;
  throw ConfigError("config: unknown objective '" + s + "'");
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }

  require_keys(doc, "",
               {"schema_version", "chain", "error_model", "designs", "snr_db",
                "trials", "symbols_per_trial", "seed", "out"},
               {"schema_version", "chain", "error_model", "designs", "snr_db",
                "trials", "symbols_per_trial", "seed"});

  RunConfig cfg;
  cfg.schema_version = static_cast<int>(integer_at(doc["schema_version"], "schema_version"));
  if (cfg.schema_version != 1)
    throw ConfigError("config: unsupported 'schema_version' (expected 1)");

  const json& chain = doc["chain"];
  require_keys(chain, "chain", {"streams", "node_antennas"}, {"streams", "node_antennas"});
  const long streams = integer_at(chain["streams"], "chain.streams");
  if (streams < 1) throw ConfigError("config: 'chain.streams' must be positive");
  cfg.streams = static_cast<arma::uword>(streams);
  if (!chain["node_antennas"].is_array() || chain["node_antennas"].size() < 2)
    throw ConfigError("config: 'chain.node_antennas' must list at least two nodes");
  for (const auto& e : chain["node_antennas"]) {
    const long a = integer_at(e, "chain.node_antennas");
    if (a < 1) throw ConfigError("config: 'chain.node_antennas' entries must be positive");
    cfg.node_antennas.push_back(static_cast<arma::uword>(a));
  }
  const size_t n_hops = cfg.node_antennas.size() - 1;

  const json& err = doc["error_model"];
  require_keys(err, "error_model", {"alpha", "beta", "sigma_e_sq"},
               {"alpha", "beta", "sigma_e_sq"});
  cfg.corr_alpha = correlation_list(err["alpha"], "error_model.alpha", n_hops);
  cfg.corr_beta = correlation_list(err["beta"], "error_model.beta", n_hops);
  cfg.sigma_e_sq = number_at(err["sigma_e_sq"], "error_model.sigma_e_sq");
  if (!(cfg.sigma_e_sq >= 0.0 && cfg.sigma_e_sq < 1.0))
    throw ConfigError("config: 'error_model.sigma_e_sq' must be in [0, 1)");

  if (!doc["designs"].is_array() || doc["designs"].empty())
    throw ConfigError("config: 'designs' must be a nonempty array");
  for (const auto& d : doc["designs"]) {
    require_keys(d, "designs[]", {"kind", "objective"}, {"kind", "objective"});
    if (!d["kind"].is_string() || !d["objective"].is_string())
      throw ConfigError("config: 'designs[].kind' and 'designs[].objective' must be strings");
    DesignSpec spec;
    spec.kind = parse_design_kind(d["kind"].get<std::string>());
    spec.objective.kind = parse_objective_kind(d["objective"].get<std::string>());
    cfg.designs.push_back(spec);
  }

  if (!doc["snr_db"].is_array() || doc["snr_db"].empty())
    throw ConfigError("config: 'snr_db' must be a nonempty array");
  for (const auto& e : doc["snr_db"]) cfg.snr_db.push_back(number_at(e, "snr_db"));

  cfg.trials = integer_at(doc["trials"], "trials");
  if (cfg.trials < 1) throw ConfigError("config: 'trials' must be >= 1");
  cfg.symbols_per_trial = integer_at(doc["symbols_per_trial"], "symbols_per_trial");
  if (cfg.symbols_per_trial < 2 || cfg.symbols_per_trial % 2 != 0)
    throw ConfigError("config: 'symbols_per_trial' must be even and >= 2");
  if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
    throw ConfigError("config: 'seed' must be an integer");
  cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("config: 'out' must be a string");
    cfg.out = doc["out"].get<std::string>();
  }

  for (arma::uword a : cfg.node_antennas)
    if (a < cfg.streams)
      throw ConfigError("config: every node needs at least 'chain.streams' antennas");
  return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["chain"]["streams"] = cfg.streams;
  doc["chain"]["node_antennas"] = cfg.node_antennas;
  doc["error_model"]["alpha"] = cfg.corr_alpha;
  doc["error_model"]["beta"] = cfg.corr_beta;
  doc["error_model"]["sigma_e_sq"] = cfg.sigma_e_sq;
  doc["designs"] = json::array();
  for (const DesignSpec& d : cfg.designs)
    doc["designs"].push_back(
        {{"kind", to_string(d.kind)}, {"objective", to_string(d.objective.kind)}});
  doc["snr_db"] = cfg.snr_db;
  doc["trials"] = cfg.trials;
  doc["symbols_per_trial"] = cfg.symbols_per_trial;
  doc["seed"] = cfg.seed;
  if (!cfg.out.empty()) doc["out"] = cfg.out;
  return doc.dump(2) + "\n";
}

ChainTemplate RunConfig::chain_template() const {
  ChainTemplate tpl;
  tpl.n_streams = streams;
  tpl.node_antennas = node_antennas;
  tpl.corr_alpha = corr_alpha;
  tpl.corr_beta = corr_beta;
  tpl.sigma_e_sq = sigma_e_sq;
  return tpl;
}

SimConfig RunConfig::sim_config() const {
  SimConfig sim;
  sim.chain = chain_template();
  sim.snr_grid_db = snr_db;
  sim.trials = trials;
  sim.symbols_per_trial = symbols_per_trial;
  sim.seed = seed;
  sim.designs = designs;
  return sim;
}

}  // namespace relaytx
