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

#include "relaytx/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "relaytx/design.hpp"

namespace relaytx {

namespace {

// Stream-derivation tags; channel realizations and transmit randomness are
// keyed separately so a design never perturbs the channels it is tested on.
constexpr std::uint64_t kChannelTag = 0x43;
constexpr std::uint64_t kTransmitTag = 0x54;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

std::vector<arma::cx_double> qpsk_modulate(const std::vector<std::uint8_t>& bits) {
  if (bits.size() % 2 != 0)
    throw std::invalid_argument("qpsk_modulate: bit count must be even");
  std::vector<arma::cx_double> symbols(bits.size() / 2);
  for (size_t i = 0; i < symbols.size(); ++i) {
    const double re = bits[2 * i] ? -kInvSqrt2 : kInvSqrt2;
    const double im = bits[2 * i + 1] ? -kInvSqrt2 : kInvSqrt2;
    symbols[i] = {re, im};
  }
  return symbols;
}

std::vector<std::uint8_t> qpsk_demodulate(const std::vector<arma::cx_double>& symbols) {
  std::vector<std::uint8_t> bits(2 * symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    bits[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
    bits[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
  }
  return bits;
}

void ChainTemplate::validate() const {
  if (n_streams == 0) throw std::invalid_argument("ChainTemplate: n_streams must be positive");
  if (node_antennas.size() < 2)
    throw std::invalid_argument("ChainTemplate: need at least two nodes");
  for (arma::uword a : node_antennas)
    if (a < n_streams)
      throw std::invalid_argument("ChainTemplate: every node needs at least n_streams antennas");
  const size_t k = n_hops();
  if (corr_alpha.size() != k || corr_beta.size() != k)
    throw std::invalid_argument("ChainTemplate: need one correlation base per hop");
  for (size_t i = 0; i < k; ++i)
    if (!(corr_alpha[i] >= 0.0 && corr_alpha[i] < 1.0 && corr_beta[i] >= 0.0 &&
          corr_beta[i] < 1.0))
      throw std::invalid_argument("ChainTemplate: correlation bases must be in [0, 1)");
  if (!(sigma_e_sq >= 0.0 && sigma_e_sq < 1.0))
    throw std::invalid_argument("ChainTemplate: sigma_e_sq must be in [0, 1)");
}

std::vector<HopErrorModel> hop_error_models(const ChainTemplate& tpl) {
  tpl.validate();
  std::vector<HopErrorModel> models(tpl.n_hops());
  for (size_t k = 0; k < models.size(); ++k) {
    const arma::uword m = tpl.node_antennas[k + 1];
    const arma::uword n = tpl.node_antennas[k];
    models[k].sigma = arma::cx_mat(
        exponential_correlation({tpl.corr_beta[k], m}), arma::zeros(m, m));
    models[k].psi = arma::cx_mat(
        exponential_correlation({tpl.corr_alpha[k], n}), arma::zeros(n, n));
    models[k].sigma_e_sq = tpl.sigma_e_sq;
  }
  return models;
}

ChainModel chain_from_template(const ChainTemplate& tpl,
                               const std::vector<arma::cx_mat>& hbar,
                               double power_budget, bool robust) {
  tpl.validate();
  if (hbar.size() != tpl.n_hops())
    throw std::invalid_argument("chain_from_template: one estimate per hop expected");
  const std::vector<HopErrorModel> models = hop_error_models(tpl);
  ChainModel chain;
  chain.n_streams = tpl.n_streams;
  chain.hops.resize(tpl.n_hops());
  for (size_t k = 0; k < chain.hops.size(); ++k) {
    HopModel& hop = chain.hops[k];
    hop.m_rx = tpl.node_antennas[k + 1];
    hop.n_tx = tpl.node_antennas[k];
    hop.hbar = hbar[k];
    if (robust) {
      hop.err_sigma = tpl.sigma_e_sq * models[k].sigma;
      hop.err_psi = models[k].psi;
    } else {
      hop.err_sigma = arma::zeros<arma::cx_mat>(hop.m_rx, hop.m_rx);
      hop.err_psi = arma::zeros<arma::cx_mat>(hop.n_tx, hop.n_tx);
    }
    hop.noise_var = 1.0;
    hop.power_budget = power_budget;
  }
  chain.validate();
  return chain;
}

const char* to_string(DesignKind kind) {
  return kind == DesignKind::Robust ? "robust" : "baseline";
}

TrialOutcome run_trial(const ChainModel& chain,
                       const std::vector<arma::cx_mat>& true_channels,
                       const PrecoderSet& precoders, const arma::cx_mat& equalizer,
                       long symbols_per_trial, Rng& rng) {
  if (symbols_per_trial <= 0 || symbols_per_trial % 2 != 0)
    throw std::invalid_argument("run_trial: symbols_per_trial must be positive and even");
  if (true_channels.size() != chain.n_hops())
    throw std::invalid_argument("run_trial: one true channel per hop expected");
  const arma::uword n = chain.n_streams;
  const arma::uword uses = static_cast<arma::uword>(symbols_per_trial / 2);

  // Data bits, stream-major within each channel use.
  arma::Mat<std::uint8_t> b_re(n, uses), b_im(n, uses);
  arma::cx_mat s(n, uses);
  for (arma::uword u = 0; u < uses; ++u) {
    for (arma::uword i = 0; i < n; ++i) {
      b_re(i, u) = static_cast<std::uint8_t>(rng.bit());
      b_im(i, u) = static_cast<std::uint8_t>(rng.bit());
      s(i, u) = {b_re(i, u) ? -kInvSqrt2 : kInvSqrt2,
                 b_im(i, u) ? -kInvSqrt2 : kInvSqrt2};
    }
  }

  arma::cx_mat x = s;
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    x = true_channels[k] * (precoders[k] * x);
    x += std::sqrt(chain.hops[k].noise_var) *
         rng.cgaussian_matrix(chain.hops[k].m_rx, uses);
  }
  const arma::cx_mat shat = equalizer * x;

  long long errors = 0;
  for (arma::uword u = 0; u < uses; ++u)
    for (arma::uword i = 0; i < n; ++i) {
      errors += (shat(i, u).real() < 0.0 ? 1 : 0) != b_re(i, u);
      errors += (shat(i, u).imag() < 0.0 ? 1 : 0) != b_im(i, u);
    }
  return {errors, static_cast<long long>(2 * n * uses)};
}

WilsonInterval wilson95(long long errors, long long bits) {
  if (bits <= 0) return {0.0, 0.0};
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(bits);
  const double p = static_cast<double>(errors) / nn;
  const double denom = 1.0 + z * z / nn;
  WilsonInterval w;
  w.center = (p + z * z / (2.0 * nn)) / denom;
  w.halfwidth =
      z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return w;
}

SimResult run_sweep(const SimConfig& config) {
  config.chain.validate();
  if (config.designs.empty())
    throw std::invalid_argument("run_sweep: at least one design required");
  if (config.snr_grid_db.empty())
    throw std::invalid_argument("run_sweep: empty SNR grid");
  if (config.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (config.symbols_per_trial < 2 || config.symbols_per_trial % 2 != 0)
    throw std::invalid_argument("run_sweep: symbols_per_trial must be even and >= 2");

  const size_t n_designs = config.designs.size();
  const size_t n_snrs = config.snr_grid_db.size();
  const std::vector<HopErrorModel> models = hop_error_models(config.chain);
  std::vector<HopSampler> samplers;
  samplers.reserve(models.size());
  for (const HopErrorModel& m : models) samplers.emplace_back(m);

  // The structure precondition depends only on the correlation matrices, so
  // an unsupported robust design fails identically at every point.
  bool robust_supported = true;
  {
    ChainModel probe = chain_from_template(
        config.chain,
        [&] {
          std::vector<arma::cx_mat> ones(models.size());
          for (size_t k = 0; k < models.size(); ++k)
            ones[k] = arma::ones<arma::cx_mat>(models[k].rows(), models[k].cols());
          return ones;
        }(),
        1.0, true);
    robust_supported = structure_supported(probe);
  }

  SimResult result;
  result.n_designs = n_designs;
  result.n_snrs = n_snrs;
  result.points.resize(n_designs * n_snrs);
  for (size_t d = 0; d < n_designs; ++d)
    for (size_t s = 0; s < n_snrs; ++s) {
      SweepPoint& pt = result.points[d * n_snrs + s];
      pt.design = config.designs[d];
      pt.snr_db = config.snr_grid_db[s];
    }

  const Rng root(config.seed);
  for (size_t s = 0; s < n_snrs; ++s) {
    const double power = std::pow(10.0, config.snr_grid_db[s] / 10.0);

    std::vector<std::atomic<bool>> failed(n_designs);
    for (auto& f : failed) f.store(false);
    std::vector<std::string> fail_reason(n_designs);
    std::mutex fail_mutex;
    for (size_t d = 0; d < n_designs; ++d)
      if (config.designs[d].kind == DesignKind::Robust && !robust_supported) {
        failed[d].store(true);
        fail_reason[d] = "structure-unsupported";
      }

    const int jobs = std::max(1, config.jobs);
    std::vector<std::vector<long long>> err_acc(jobs, std::vector<long long>(n_designs, 0));
    std::vector<std::vector<long long>> bit_acc(jobs, std::vector<long long>(n_designs, 0));

    auto worker = [&](int job, long t_begin, long t_end) {
      for (long t = t_begin; t < t_end; ++t) {
        Rng rng_ch = root.derive(kChannelTag, s, static_cast<std::uint64_t>(t));
        std::vector<arma::cx_mat> hbar(models.size()), htrue(models.size());
        for (size_t k = 0; k < models.size(); ++k) {
          hbar[k] = samplers[k].sample_estimated_channel(rng_ch);
          htrue[k] = hbar[k] + samplers[k].sample_error(rng_ch);
        }
        for (size_t d = 0; d < n_designs; ++d) {
          if (failed[d].load(std::memory_order_relaxed)) continue;
          try {
            const ChainModel chain = chain_from_template(
                config.chain, hbar, power,
                config.designs[d].kind == DesignKind::Robust);
            DesignOptions opts;
            opts.allocation_multi_start = config.allocation_multi_start;
            const StructuredSolution sol =
                design_transceiver(chain, config.designs[d].objective, opts);
            Rng rng_tx = root.derive(kTransmitTag, s, static_cast<std::uint64_t>(t));
            const TrialOutcome out =
                run_trial(chain, htrue, sol.precoders, sol.equalizer,
                          config.symbols_per_trial, rng_tx);
            err_acc[job][d] += out.errors;
            bit_acc[job][d] += out.bits;
          } catch (const std::exception& e) {
            failed[d].store(true);
            std::lock_guard<std::mutex> lock(fail_mutex);
            if (fail_reason[d].empty()) fail_reason[d] = e.what();
          }
        }
      }
    };

    if (jobs == 1) {
      worker(0, 0, config.trials);
    } else {
      std::vector<std::thread> pool;
      const long chunk = (config.trials + jobs - 1) / jobs;
      for (int j = 0; j < jobs; ++j) {
        const long b = j * chunk;
        const long e = std::min<long>(config.trials, b + chunk);
        if (b >= e) break;
        pool.emplace_back(worker, j, b, e);
      }
      for (auto& th : pool) th.join();
    }

    for (size_t d = 0; d < n_designs; ++d) {
      SweepPoint& pt = result.points[d * n_snrs + s];
      if (failed[d].load()) {
        pt.ok = false;
        pt.status = fail_reason[d].empty() ? "failed" : fail_reason[d];
        pt.ber = arma::datum::nan;
        pt.wilson_center = arma::datum::nan;
        pt.wilson_halfwidth = arma::datum::nan;
        continue;
      }
      for (int j = 0; j < jobs; ++j) {
        pt.errors += err_acc[j][d];
        pt.bits += bit_acc[j][d];
      }
      pt.ber = pt.bits > 0 ? static_cast<double>(pt.errors) / static_cast<double>(pt.bits)
                           : 0.0;
      const WilsonInterval w = wilson95(pt.errors, pt.bits);
      pt.wilson_center = w.center;
      pt.wilson_halfwidth = w.halfwidth;
    }
  }
  return result;
}

std::string sweep_csv(const SimResult& result) {
  std::string csv = "design,objective,snr_db,ber,bits,errors,ci95,status\n";
  char line[256];
  for (const SweepPoint& pt : result.points) {
    std::string status = pt.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    std::snprintf(line, sizeof(line), "%s,%s,%.10g,%.8e,%lld,%lld,%.8e,%s\n",
                  to_string(pt.design.kind), to_string(pt.design.objective.kind),
                  pt.snr_db, pt.ber, pt.bits, pt.errors, pt.wilson_halfwidth,
                  status.c_str());
    csv += line;
  }
  return csv;
}

}  // namespace relaytx
