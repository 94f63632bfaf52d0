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

#include "relaytx/mse_core.hpp"

#include <cmath>
#include <stdexcept>

#include "relaytx/linalg.hpp"

namespace relaytx {

void ChainModel::validate() const {
  if (hops.empty()) throw std::invalid_argument("ChainModel: needs at least one hop");
  if (n_streams == 0) throw std::invalid_argument("ChainModel: n_streams must be positive");
  for (size_t k = 0; k < hops.size(); ++k) {
    const HopModel& h = hops[k];
    if (h.m_rx < n_streams || h.n_tx < n_streams)
      throw std::invalid_argument("ChainModel: every hop needs at least n_streams antennas");
    if (h.hbar.n_rows != h.m_rx || h.hbar.n_cols != h.n_tx)
      throw std::invalid_argument("ChainModel: hbar dimensions disagree with antenna counts");
    if (h.err_sigma.n_rows != h.m_rx || !h.err_sigma.is_square())
      throw std::invalid_argument("ChainModel: err_sigma must be m_rx x m_rx");
    if (h.err_psi.n_rows != h.n_tx || !h.err_psi.is_square())
      throw std::invalid_argument("ChainModel: err_psi must be n_tx x n_tx");
    if (!(h.noise_var > 0.0))
      throw std::invalid_argument("ChainModel: noise_var must be positive");
    if (!(h.power_budget > 0.0))
      throw std::invalid_argument("ChainModel: power_budget must be positive");
  }
}

void validate_precoders(const ChainModel& chain, const PrecoderSet& p) {
  if (p.size() != chain.n_hops())
    throw std::invalid_argument("precoders: expected one matrix per hop");
  for (size_t k = 0; k < p.size(); ++k) {
    const arma::uword in_dim = (k == 0) ? chain.n_streams : chain.hops[k - 1].m_rx;
    if (p[k].n_rows != chain.hops[k].n_tx || p[k].n_cols != in_dim)
      throw std::invalid_argument("precoders: shape mismatch at hop " + std::to_string(k));
  }
}

std::vector<arma::cx_mat> rx_covariances(const ChainModel& chain,
                                         const PrecoderSet& precoders) {
  chain.validate();
  validate_precoders(chain, precoders);
  const arma::uword n = chain.n_streams;
  std::vector<arma::cx_mat> r;
  r.reserve(chain.n_hops() + 1);
  r.push_back(arma::eye<arma::cx_mat>(n, n));
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    const HopModel& hop = chain.hops[k];
    const arma::cx_mat tx = precoders[k] * r.back() * precoders[k].t();  // P R P^H
    const double leak = arma::trace(tx * hop.err_psi).real();
    arma::cx_mat rk = hop.hbar * tx * hop.hbar.t() + leak * hop.err_sigma +
                      hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
    r.push_back(hermitize(rk));
  }
  return r;
}

arma::cx_mat chained_channel(const ChainModel& chain, const PrecoderSet& precoders) {
  arma::cx_mat l = arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams);
  for (size_t k = 0; k < chain.n_hops(); ++k)
    l = chain.hops[k].hbar * precoders[k] * l;
  return l;
}

std::vector<double> hop_transmit_powers(const ChainModel& chain,
                                        const PrecoderSet& precoders) {
  const std::vector<arma::cx_mat> r = rx_covariances(chain, precoders);
  std::vector<double> powers(chain.n_hops());
  for (size_t k = 0; k < chain.n_hops(); ++k)
    powers[k] = arma::trace(precoders[k] * r[k] * precoders[k].t()).real();
  return powers;
}

MseReport mse_matrix(const ChainModel& chain, const PrecoderSet& precoders,
                     const arma::cx_mat& g) {
  const std::vector<arma::cx_mat> r = rx_covariances(chain, precoders);
  const arma::uword n = chain.n_streams;
  const arma::uword m_dst = chain.hops.back().m_rx;
  if (g.n_rows != n || g.n_cols != m_dst)
    throw std::invalid_argument("mse_matrix: equalizer must be n_streams x m_rx(K)");
  const arma::cx_mat l = chained_channel(chain, precoders);
  arma::cx_mat phi = g * r.back() * g.t() + arma::eye<arma::cx_mat>(n, n) -
                     l.t() * g.t() - g * l;
  phi = hermitize(phi);

  MseReport report;
  report.phi = phi;
  report.diag = arma::real(phi.diag());
  arma::vec eigs;
  arma::eig_sym(eigs, phi);
  report.eigs = arma::reverse(eigs);
  return report;
}

arma::cx_mat lmmse_equalizer(const ChainModel& chain, const PrecoderSet& precoders) {
  const std::vector<arma::cx_mat> r = rx_covariances(chain, precoders);
  const arma::cx_mat l = chained_channel(chain, precoders);
  // G = L^H R^{-1}; R is positive definite because every hop adds noise.
  arma::cx_mat x = arma::solve(r.back(), l, arma::solve_opts::likely_sympd);
  return x.t();
}

MseReport mse_matrix_lmmse(const ChainModel& chain, const PrecoderSet& precoders) {
  return mse_matrix(chain, precoders, lmmse_equalizer(chain, precoders));
}

double objective_value(const Objective& obj, const MseReport& report) {
  switch (obj.kind) {
    case ObjectiveKind::MaxMse:
      return report.diag.max();
    case ObjectiveKind::SumMse:
      return arma::accu(report.diag);
    case ObjectiveKind::MutualInfo: {
      if (report.eigs.min() <= 0.0)
        throw std::runtime_error(
            "objective_value: MSE matrix must be positive definite for the "
            "mutual-information criterion");
      return arma::accu(arma::log(report.eigs));
    }
  }
  throw std::logic_error("objective_value: unknown kind");
}

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::MaxMse: return "max-mse";
    case ObjectiveKind::SumMse: return "sum-mse";
    case ObjectiveKind::MutualInfo: return "mutual-info";
  }
  return "unknown";
}

}  // namespace relaytx
