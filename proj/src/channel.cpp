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

#include "relaytx/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "relaytx/linalg.hpp"

namespace relaytx {

namespace {

// Cheap square root for the common cases (identity, diagonal) before falling
// back to the eigendecomposition route.
arma::cx_mat correlation_sqrt(const arma::cx_mat& c) {
  const arma::uword d = c.n_rows;
  const arma::cx_mat diag_part = arma::diagmat(c.diag());
  if (arma::norm(c - diag_part, "fro") == 0.0) {
    arma::vec dr = arma::clamp(arma::real(c.diag()), 0.0, arma::datum::inf);
    return arma::cx_mat(arma::diagmat(arma::sqrt(dr)), arma::zeros(d, d));
  }
  return hermitian_sqrt(c);
}

}  // namespace

arma::mat exponential_correlation(const CorrelationSpec& spec) {
  if (!(spec.rho >= 0.0 && spec.rho < 1.0))
    throw std::invalid_argument("exponential_correlation: rho must be in [0, 1)");
  if (spec.dim == 0)
    throw std::invalid_argument("exponential_correlation: dim must be positive");
  arma::mat m(spec.dim, spec.dim);
  for (arma::uword i = 0; i < spec.dim; ++i)
    for (arma::uword j = 0; j < spec.dim; ++j)
      m(i, j) = std::pow(spec.rho, std::abs(static_cast<double>(i) -
                                            static_cast<double>(j)));
  return m;
}

void HopErrorModel::validate() const {
  if (!sigma.is_square() || !psi.is_square())
    throw std::invalid_argument("HopErrorModel: correlation matrices must be square");
  if (!(sigma_e_sq >= 0.0 && sigma_e_sq < 1.0))
    throw std::invalid_argument("HopErrorModel: sigma_e_sq must be in [0, 1)");
}

HopSampler::HopSampler(const HopErrorModel& model)
    : sqrt_sigma_(correlation_sqrt(model.sigma)),
      sqrt_psi_(correlation_sqrt(model.psi)),
      sigma_e_sq_(model.sigma_e_sq) {
  model.validate();
}

arma::cx_mat HopSampler::sample_error(Rng& rng) const {
  const arma::cx_mat w = rng.cgaussian_matrix(sqrt_sigma_.n_rows, sqrt_psi_.n_rows);
  return std::sqrt(sigma_e_sq_) * (sqrt_sigma_ * w * sqrt_psi_);
}

arma::cx_mat HopSampler::sample_estimated_channel(Rng& rng) const {
  const arma::cx_mat w = rng.cgaussian_matrix(sqrt_sigma_.n_rows, sqrt_psi_.n_rows);
  return std::sqrt(1.0 - sigma_e_sq_) * (sqrt_sigma_ * w * sqrt_psi_);
}

arma::cx_mat sample_error(const HopErrorModel& model, Rng& rng) {
  return HopSampler(model).sample_error(rng);
}

arma::cx_mat sample_estimated_channel(const HopErrorModel& model, Rng& rng) {
  return HopSampler(model).sample_estimated_channel(rng);
}

arma::cx_mat draw_true_channel(const arma::cx_mat& hbar,
                               const HopErrorModel& model, Rng& rng) {
  if (hbar.n_rows != model.rows() || hbar.n_cols != model.cols())
    throw std::invalid_argument("draw_true_channel: dimension mismatch");
  return hbar + sample_error(model, rng);
}

}  // namespace relaytx
