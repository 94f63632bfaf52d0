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

#ifndef RELAYTX_MSE_CORE_HPP
#define RELAYTX_MSE_CORE_HPP

#include <armadillo>
#include <vector>

namespace relaytx {

/// One hop of the relay chain as seen by the designer: the channel estimate,
/// the effective error correlations and the hop's noise and power budget.
/// err_sigma already carries the error variance (sigma_e_sq folded into the
/// receive correlation), so a zero err_sigma means perfect CSI.
struct HopModel {
  arma::uword m_rx = 0;       // receive antennas of this hop
  arma::uword n_tx = 0;       // transmit antennas of this hop
  arma::cx_mat hbar;          // m_rx x n_tx channel estimate
  arma::cx_mat err_sigma;     // m_rx x m_rx effective receive correlation
  arma::cx_mat err_psi;       // n_tx x n_tx transmit correlation
  double noise_var = 1.0;     // receiver noise variance
  double power_budget = 1.0;  // transmit power budget at the hop input
};

/// The ordered K-hop system carrying n_streams data streams with identity
/// symbol covariance.
struct ChainModel {
  std::vector<HopModel> hops;
  arma::uword n_streams = 0;

  arma::uword n_hops() const { return hops.size(); }
  void validate() const;  // throws std::invalid_argument
};

/// Source precoder followed by the per-relay forwarding matrices.
/// p[0] is n_tx(0) x n_streams; p[k] is n_tx(k) x m_rx(k-1) for k >= 1.
using PrecoderSet = std::vector<arma::cx_mat>;

void validate_precoders(const ChainModel& chain, const PrecoderSet& p);

enum class ObjectiveKind { MaxMse, SumMse, MutualInfo };
enum class SchurClass { Convex, Concave };

/// Design criterion. MaxMse is the Schur-convex route (diagonal-equalizing
/// rotation at the source); SumMse and MutualInfo take the Schur-concave
/// route (no rotation). All objective values are oriented so lower is better.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::SumMse;

  SchurClass schur_class() const {
    return kind == ObjectiveKind::MaxMse ? SchurClass::Convex
                                         : SchurClass::Concave;
  }
  static Objective max_mse() { return {ObjectiveKind::MaxMse}; }
  static Objective sum_mse() { return {ObjectiveKind::SumMse}; }
  static Objective mutual_info() { return {ObjectiveKind::MutualInfo}; }
};

const char* to_string(ObjectiveKind kind);

/// Detection-error second-order statistics for one equalizer choice.
struct MseReport {
  arma::cx_mat phi;  // Hermitian N x N error covariance
  arma::vec diag;    // per-stream MSEs, real(diag(phi))
  arma::vec eigs;    // eigenvalues of phi, descending
};

/// Received-signal covariances along the chain, indices 0..K: entry 0 is the
/// identity symbol covariance, entry k the covariance at the k-th receiver.
/// Each step adds the forwarded signal term, the estimation-error term
/// tr(P R P^H psi) * sigma and the receiver noise.
std::vector<arma::cx_mat> rx_covariances(const ChainModel& chain,
                                         const PrecoderSet& precoders);

/// Product of estimated per-hop transfer matrices, last hop leftmost.
arma::cx_mat chained_channel(const ChainModel& chain, const PrecoderSet& precoders);

/// Per-hop transmit powers tr(P_k R_{k-1} P_k^H), for budget checks.
std::vector<double> hop_transmit_powers(const ChainModel& chain,
                                        const PrecoderSet& precoders);

/// Error covariance of g applied to the destination signal, averaged over
/// data, estimation errors and noise.
MseReport mse_matrix(const ChainModel& chain, const PrecoderSet& precoders,
                     const arma::cx_mat& g);

/// Minimum-MSE linear equalizer for the chain.
arma::cx_mat lmmse_equalizer(const ChainModel& chain, const PrecoderSet& precoders);

/// mse_matrix evaluated at the LMMSE equalizer.
MseReport mse_matrix_lmmse(const ChainModel& chain, const PrecoderSet& precoders);

/// Scalar design criterion value; lower is better for every kind.
/// MaxMse: worst per-stream MSE. SumMse: total MSE. MutualInfo: log det of
/// the MSE matrix (the negative of the Gaussian mutual information).
double objective_value(const Objective& obj, const MseReport& report);

}  // namespace relaytx

#endif  // RELAYTX_MSE_CORE_HPP
