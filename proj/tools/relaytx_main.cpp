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
//
// relaytx: robust linear transceiver design for multi-hop AF MIMO relay
// chains with imperfect CSI. Subcommands: design | sweep | verify.
// Exit codes: 0 success, 1 usage/config error, 2 run or verification failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaytx/channel.hpp"
#include "relaytx/config.hpp"
#include "relaytx/design.hpp"
#include "relaytx/sim.hpp"
#include "relaytx/verify.hpp"

namespace {

using relaytx::ConfigError;
using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write to '" + out_path + "'");
  out << text;
}

int cmd_design(const relaytx::RunConfig& cfg, const std::string& out_path) {
  const relaytx::ChainTemplate tpl = cfg.chain_template();
  const std::vector<relaytx::HopErrorModel> models = relaytx::hop_error_models(tpl);

  // One deterministic channel instance per run; the seed fixes it.
  relaytx::Rng rng = relaytx::Rng(cfg.seed).derive(0xD5);
  std::vector<arma::cx_mat> hbar;
  for (const relaytx::HopErrorModel& m : models)
    hbar.push_back(relaytx::HopSampler(m).sample_estimated_channel(rng));

  ordered_json doc;
  doc["schema_version"] = 1;
  doc["seed"] = cfg.seed;
  doc["streams"] = cfg.streams;
  doc["perfect_csi_equivalent"] = (cfg.sigma_e_sq == 0.0);
  doc["reports"] = ordered_json::array();

  for (const relaytx::DesignSpec& spec : cfg.designs) {
    for (double snr_db : cfg.snr_db) {
      const double power = std::pow(10.0, snr_db / 10.0);
      const relaytx::ChainModel chain = relaytx::chain_from_template(
          tpl, hbar, power, spec.kind == relaytx::DesignKind::Robust);
      const relaytx::StructuredSolution sol =
          relaytx::design_transceiver(chain, spec.objective);
      const std::vector<double> powers =
          relaytx::hop_transmit_powers(chain, sol.precoders);

      ordered_json rep;
      rep["design"] = relaytx::to_string(spec.kind);
      rep["objective"] = relaytx::to_string(spec.objective.kind);
      rep["snr_db"] = snr_db;
      rep["objective_value"] = sol.objective_value;
      rep["gamma"] = std::vector<double>(sol.theta_spectrum.begin(),
                                         sol.theta_spectrum.end());
      rep["allocation_converged"] = sol.allocation_converged;
      rep["hops"] = ordered_json::array();
      for (size_t k = 0; k < chain.n_hops(); ++k) {
        ordered_json hop;
        hop["gains"] =
            std::vector<double>(sol.hop_gains[k].begin(), sol.hop_gains[k].end());
        const arma::vec fsq = arma::square(sol.lambda_f[k]);
        hop["allocation_f_sq"] = std::vector<double>(fsq.begin(), fsq.end());
        hop["xi"] = sol.xi[k];
        hop["transmit_power"] = powers[k];
        hop["power_budget"] = chain.hops[k].power_budget;
        rep["hops"].push_back(hop);
      }
      doc["reports"].push_back(rep);
    }
  }
  emit(doc.dump(2) + "\n", out_path);
  return 0;
}

int cmd_sweep(const relaytx::RunConfig& cfg, const std::string& out_path, int jobs) {
  relaytx::SimConfig sim = cfg.sim_config();
  sim.jobs = jobs;
  const relaytx::SimResult result = relaytx::run_sweep(sim);
  emit(relaytx::sweep_csv(result), out_path);
  for (const relaytx::SweepPoint& pt : result.points)
    if (pt.ok) return 0;
  std::cerr << "sweep: every point failed\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust multi-hop AF MIMO relay transceiver designer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  bool has_seed_override = false;
  int jobs = 1;

  CLI::App* design = app.add_subcommand("design", "design one channel instance");
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo BER sweep, CSV output");
  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant corpus");
  for (CLI::App* sub : {design, sweep}) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_override, "output path (default: config 'out' or stdout)");
    sub->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { has_seed_override = true; });
  }
  sweep->add_option("--jobs", jobs, "worker threads for independent trials");
  design->add_option("--jobs", jobs, "accepted for interface parity; design runs single-threaded");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (verify->parsed()) {
      const bool ok = relaytx::verify::run_all(std::cout);
      return ok ? 0 : 2;
    }
    relaytx::RunConfig cfg = relaytx::parse_run_config(slurp(config_path));
    if (has_seed_override) cfg.seed = static_cast<std::uint64_t>(seed_override);
    const std::string out_path = out_override.empty() ? cfg.out : out_override;
    if (design->parsed()) return cmd_design(cfg, out_path);
    return cmd_sweep(cfg, out_path, jobs);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const relaytx::StructureUnsupported& e) {
    std::cerr << "design failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
