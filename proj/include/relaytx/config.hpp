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

#ifndef RELAYTX_CONFIG_HPP
#define RELAYTX_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaytx/sim.hpp"

namespace relaytx {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration (JSON document, schema_version 1). Unknown keys
/// are rejected; parse -> serialize -> parse is the identity.
struct RunConfig {
  int schema_version = 1;
  arma::uword streams = 0;
  std::vector<arma::uword> node_antennas;
  std::vector<double> corr_alpha;  // per hop
  std::vector<double> corr_beta;   // per hop
  double sigma_e_sq = 0.0;
  std::vector<DesignSpec> designs;
  std::vector<double> snr_db;
  long trials = 1;
  long symbols_per_trial = 2;
  std::uint64_t seed = 0;
  std::string out;  // empty selects stdout

  bool operator==(const RunConfig&) const = default;

  ChainTemplate chain_template() const;
  SimConfig sim_config() const;
};

/// Throws ConfigError with a message naming the offending key.
RunConfig parse_run_config(const std::string& json_text);

std::string serialize_run_config(const RunConfig& config);

DesignKind parse_design_kind(const std::string& s);     // throws ConfigError
ObjectiveKind parse_objective_kind(const std::string& s);  // throws ConfigError

}  // namespace relaytx

#endif  // RELAYTX_CONFIG_HPP
