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

#ifndef RELAYTX_SIM_HPP
#define RELAYTX_SIM_HPP

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "relaytx/channel.hpp"
#include "relaytx/mse_core.hpp"
#include "relaytx/rng.hpp"

namespace relaytx {

/// Gray-mapped unit-energy QPSK: bit pair (b0, b1) maps to
/// ((1-2 b0) + j (1-2 b1)) / sqrt(2), so 00 -> (1+j)/sqrt(2).
/// Throws std::invalid_argument on an odd bit count.
std::vector<arma::cx_double> qpsk_modulate(const std::vector<std::uint8_t>& bits);

/// Sign slicing of real and imaginary parts; inverse of qpsk_modulate in the
/// noiseless case.
std::vector<std::uint8_t> qpsk_demodulate(const std::vector<arma::cx_double>& symbols);

/// Antenna layout, correlation bases and error level shared by every trial
/// of a sweep. node_antennas has one entry per node (source, relays,
/// destination); hop k runs from node k to node k+1. corr_alpha drives the
/// transmit-side exponential correlation, corr_beta the receive side.
struct ChainTemplate {
  arma::uword n_streams = 0;
  std::vector<arma::uword> node_antennas;
  std::vector<double> corr_alpha;  // per hop
  std::vector<double> corr_beta;   // per hop
  double sigma_e_sq = 0.0;

  arma::uword n_hops() const {
    return node_antennas.empty() ? 0 : node_antennas.size() - 1;
  }
  void validate() const;
};

/// Per-hop error models implied by the template (unit-diagonal correlations).
std::vector<HopErrorModel> hop_error_models(const ChainTemplate& tpl);

/// Chain for one realization of the estimated channels. Robust chains carry
/// the effective error statistics (sigma_e_sq folded into the receive
/// correlation); baseline chains carry zeros and so design for the estimate
/// as if it were exact. noise_var is fixed to 1, power_budget carries the
/// per-hop SNR.
ChainModel chain_from_template(const ChainTemplate& tpl,
                               const std::vector<arma::cx_mat>& hbar,
                               double power_budget, bool robust);

enum class DesignKind { Robust, Baseline };
const char* to_string(DesignKind kind);

struct DesignSpec {
  DesignKind kind = DesignKind::Robust;
  Objective objective;
  bool operator==(const DesignSpec& o) const {
    return kind == o.kind && objective.kind == o.objective.kind;
  }
};

/// Monte Carlo sweep configuration. symbols_per_trial counts per-stream bits
/// (two per QPSK symbol), so one point accumulates
/// symbols_per_trial * n_streams * trials bits; it must be even.
struct SimConfig {
  ChainTemplate chain;
  std::vector<double> snr_grid_db;
  long trials = 1;
  long symbols_per_trial = 2;
  std::uint64_t seed = 0;
  std::vector<DesignSpec> designs;
  int jobs = 1;
  bool allocation_multi_start = true;
};

struct TrialOutcome {
  long long errors = 0;
  long long bits = 0;
};

/// One block-fading trial: the true channels stay fixed while
/// symbols_per_trial/2 channel uses of N QPSK symbols each flow through the
/// chain with fresh noise, are equalized, sliced and compared.
TrialOutcome run_trial(const ChainModel& chain,
                       const std::vector<arma::cx_mat>& true_channels,
                       const PrecoderSet& precoders, const arma::cx_mat& equalizer,
                       long symbols_per_trial, Rng& rng);

struct WilsonInterval {
  double center = 0.0;
  double halfwidth = 0.0;
};

/// 95% Wilson score interval for a BER estimate; valid at low error counts.
WilsonInterval wilson95(long long errors, long long bits);

struct SweepPoint {
  DesignSpec design;
  double snr_db = 0.0;
  long long bits = 0;
  long long errors = 0;
  double ber = 0.0;
  double wilson_center = 0.0;
  double wilson_halfwidth = 0.0;
  bool ok = true;
  std::string status = "ok";
};

struct SimResult {
  std::vector<SweepPoint> points;  // design-major, SNR-minor
  size_t n_designs = 0;
  size_t n_snrs = 0;

  const SweepPoint& at(size_t design_index, size_t snr_index) const {
    return points.at(design_index * n_snrs + snr_index);
  }
};

/// Runs the full sweep. Channel realizations and noise derive from
/// (seed, snr index, trial index) only, so every design at a point sees the
/// same realizations, results are independent of the worker schedule, and a
/// repeated run is bit-identical. A design whose structure precondition
/// fails is recorded as a failed point and the sweep continues.
SimResult run_sweep(const SimConfig& config);

/// CSV rendering with the fixed header
/// design,objective,snr_db,ber,bits,errors,ci95,status.
std::string sweep_csv(const SimResult& result);

}  // namespace relaytx

#endif  // RELAYTX_SIM_HPP
