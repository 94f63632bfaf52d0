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

#ifndef RELAYTX_CHANNEL_HPP
#define RELAYTX_CHANNEL_HPP

#include <armadillo>

#include "relaytx/rng.hpp"

namespace relaytx {

/// Exponentially decaying antenna correlation: entry (i,j) = rho^|i-j|.
struct CorrelationSpec {
  double rho = 0.0;  // decay base, in [0, 1)
  arma::uword dim = 1;
};

/// Unit-diagonal Hermitian PSD matrix with entries rho^|i-j|.
/// Throws std::invalid_argument when rho is outside [0, 1).
arma::mat exponential_correlation(const CorrelationSpec& spec);

/// One hop's estimation-error statistics under the Kronecker model.
///
/// sigma and psi are the receive-side (row) and transmit-side (column)
/// correlation matrices with unit diagonal; sigma_e_sq is the per-element
/// error variance. An error draw is sigma_e * sigma^{1/2} W psi^{1/2} with W
/// i.i.d. CN(0,1), so its element covariance is sigma_e_sq * (sigma (x) psi^T).
/// The estimate draw carries the complementary variance 1 - sigma_e_sq, which
/// makes the composite channel (estimate + error) unit-variance per element.
struct HopErrorModel {
  arma::cx_mat sigma;  // m x m, receive/row correlation
  arma::cx_mat psi;    // n x n, transmit/column correlation
  double sigma_e_sq = 0.0;

  arma::uword rows() const { return sigma.n_rows; }
  arma::uword cols() const { return psi.n_rows; }
  void validate() const;  // throws std::invalid_argument
};

/// Precomputed correlation square roots for repeated sampling from the same
/// model (the square roots cost an eigendecomposition each).
class HopSampler {
 public:
  explicit HopSampler(const HopErrorModel& model);

  arma::cx_mat sample_error(Rng& rng) const;
  arma::cx_mat sample_estimated_channel(Rng& rng) const;

 private:
  arma::cx_mat sqrt_sigma_, sqrt_psi_;
  double sigma_e_sq_;
};

/// Channel-estimation error draw: sigma_e * sigma^{1/2} W psi^{1/2}.
arma::cx_mat sample_error(const HopErrorModel& model, Rng& rng);

/// Estimated-channel draw, scaled so that the composite true channel has
/// unit element variance: sqrt(1 - sigma_e_sq) * sigma^{1/2} W psi^{1/2}.
arma::cx_mat sample_estimated_channel(const HopErrorModel& model, Rng& rng);

/// True channel realization: hbar plus a fresh error draw.
arma::cx_mat draw_true_channel(const arma::cx_mat& hbar,
                               const HopErrorModel& model, Rng& rng);

}  // namespace relaytx

#endif  // RELAYTX_CHANNEL_HPP
