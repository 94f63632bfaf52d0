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

#ifndef RELAYTX_DESIGN_HPP
#define RELAYTX_DESIGN_HPP

#include <armadillo>
#include <stdexcept>
#include <vector>

#include "relaytx/mse_core.hpp"
#include "relaytx/power_alloc.hpp"

namespace relaytx {

/// Raised when the closed-form transceiver structure does not apply: it
/// requires, per hop, either the receive error correlation or the transmit
/// error correlation to be proportional to the identity. Callers may fall
/// back to the numeric optimizer at desk scale.
class StructureUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the power/correlation combination makes the forwarding-gain
/// normalization infeasible (nonpositive denominator).
class InfeasibleScaling : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SVD of one hop's whitened effective channel: error-and-noise whitening on
/// the receive side, robust transmit shaping on the transmit side.
struct EffectiveHop {
  arma::cx_mat rx_basis;  // m_rx x m_rx unitary
  arma::cx_mat tx_basis;  // n_tx x n_tx unitary
  arma::vec gains;        // singular values, descending
};

/// Per-hop pieces of the chain change of variables, for diagnostics and
/// cross-checks: the receive-side error+noise covariance induced by each
/// forwarding matrix, the whitened receive covariance, and the normalized
/// per-hop transfer whose squared singular values lie in [0, 1].
struct ChainTransform {
  std::vector<arma::cx_mat> noise_cov;    // tr(F F^H psi) sigma + noise_var I
  std::vector<arma::cx_mat> whitened_rx;  // whitened signal+noise covariance
  std::vector<arma::cx_mat> transfer;     // normalized hop transfer A_k
};

/// Fully synthesized transceiver.
struct StructuredSolution {
  std::vector<arma::vec> lambda_f;   // per-hop singular-value allocations
  std::vector<arma::vec> hop_gains;  // per-hop effective gains (first N)
  std::vector<double> xi;            // per-hop scaling factors
  arma::cx_mat u_omega;              // source-side rotation
  std::vector<arma::cx_mat> fwd;     // transformed forwarding matrices F_k
  PrecoderSet precoders;             // physical precoders P_k
  arma::cx_mat equalizer;            // LMMSE equalizer at the destination
  arma::vec theta_spectrum;          // composite per-stream gains gamma
  double objective_value = 0.0;      // reduced objective, lower is better
  bool allocation_converged = false;
  int allocation_iterations = 0;
};

/// Average receive error-correlation level tr(err_sigma)/m_rx.
double alpha_k(const HopModel& hop);

/// True when every hop satisfies the closed-form structure precondition.
bool structure_supported(const ChainModel& chain);

/// Whitened effective channel SVD of one hop. Throws StructureUnsupported
/// when neither err_sigma nor err_psi is proportional to the identity
/// (relative Frobenius deviation below 1e-9).
EffectiveHop effective_hop_svd(const HopModel& hop);

/// Unitary with all |entries|^2 = 1/n, so conjugation by it equalizes the
/// diagonal of any Hermitian matrix spectrum. Real Hadamard when n is a
/// power of two, Fourier otherwise.
arma::cx_mat q_f_matrix(arma::uword n);

/// Source rotation by Schur class: the diagonal-equalizing unitary for the
/// Schur-convex criterion, the identity for the Schur-concave ones.
arma::cx_mat u_omega(const Objective& obj, arma::uword n);

/// Forwarding-gain normalization for one hop given its allocation. Equals
/// the fixed point of the error-leakage recursion; throws InfeasibleScaling
/// when the denominator is nonpositive.
double xi_k(const HopModel& hop, const EffectiveHop& eff, const arma::vec& lambda_f);

/// Composite per-stream gains from per-hop amplitude and gain vectors:
/// gamma_i = prod u_ki / prod (u_ki + 1) with u_ki = f_ki^2 h_ki^2.
arma::vec gamma_from_gains(const std::vector<arma::vec>& f,
                           const std::vector<arma::vec>& h);

/// Builds the transformed forwarding matrices from the allocation, recovers
/// the physical precoders, and attaches the LMMSE equalizer and composite
/// gain spectrum.
StructuredSolution assemble_solution(const ChainModel& chain, const Objective& obj,
                                     const std::vector<arma::vec>& lambda_f);

/// Change-of-variable diagnostics for a set of forwarding matrices.
ChainTransform transform_state(const ChainModel& chain,
                               const std::vector<arma::cx_mat>& fwd);

struct DesignOptions {
  double allocation_tol = 1e-9;
  int allocation_max_iters = 500;
  bool allocation_multi_start = true;
};

/// End-to-end synthesis: per-hop whitened SVDs, iterative water-filling over
/// the resulting scalar problem, then assembly.
StructuredSolution design_transceiver(const ChainModel& chain, const Objective& obj,
                                      const DesignOptions& options = {});

}  // namespace relaytx

#endif  // RELAYTX_DESIGN_HPP
