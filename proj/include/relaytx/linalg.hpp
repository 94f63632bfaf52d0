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

#ifndef RELAYTX_LINALG_HPP
#define RELAYTX_LINALG_HPP

#include <armadillo>

namespace relaytx {

/// (A + A^H)/2. Applied after every covariance assembly to keep
/// floating-point drift out of the Hermitian structure.
arma::cx_mat hermitize(const arma::cx_mat& a);

/// Hermitian square root via eigendecomposition. Eigenvalues below zero
/// (numerical noise up to -1e-10) are clipped to zero.
arma::cx_mat hermitian_sqrt(const arma::cx_mat& a);

/// Inverse Hermitian square root; requires a positive definite argument.
arma::cx_mat hermitian_inv_sqrt(const arma::cx_mat& a);

bool is_hermitian_psd(const arma::cx_mat& a, double tol = 1e-10);

bool is_unitary(const arma::cx_mat& u, double tol = 1e-10);

/// Deterministic SVD phase convention: for each paired singular vector the
/// first element of the right vector with magnitude above tol is rotated to
/// the real nonnegative axis; the matching left vector takes the conjugate
/// rotation so U*S*V^H is unchanged.
void fix_svd_phases(arma::cx_mat& u, arma::cx_mat& v, double tol = 1e-12);

/// True when m is proportional to the identity: ||m - (tr(m)/d) I||_F is
/// below tol relative to ||m||_F. The zero matrix counts as proportional
/// (factor 0). On success factor receives tr(m)/d.
bool proportional_to_identity(const arma::cx_mat& m, double* factor = nullptr,
                              double tol = 1e-9);

}  // namespace relaytx

#endif  // RELAYTX_LINALG_HPP
