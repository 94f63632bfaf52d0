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

#include "relaytx/linalg.hpp"

#include <complex>
#include <stdexcept>

namespace relaytx {

arma::cx_mat hermitize(const arma::cx_mat& a) { return 0.5 * (a + a.t()); }

arma::cx_mat hermitian_sqrt(const arma::cx_mat& a) {
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, hermitize(a)))
    throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
  arma::vec root = arma::sqrt(arma::clamp(eigval, 0.0, arma::datum::inf));
  return hermitize(eigvec * arma::diagmat(root) * eigvec.t());
}

arma::cx_mat hermitian_inv_sqrt(const arma::cx_mat& a) {
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, hermitize(a)))
    throw std::runtime_error("hermitian_inv_sqrt: eigendecomposition failed");
  const double floor = 1e-14 * std::max(eigval.max(), 1.0);
  if (eigval.min() <= floor)
    throw std::runtime_error("hermitian_inv_sqrt: matrix is not positive definite");
  return hermitize(eigvec * arma::diagmat(1.0 / arma::sqrt(eigval)) * eigvec.t());
}

bool is_hermitian_psd(const arma::cx_mat& a, double tol) {
  if (!a.is_square()) return false;
  const double scale = std::max(1.0, arma::norm(a, "fro"));
  if (arma::norm(a - a.t(), "fro") > tol * scale) return false;
  arma::vec eigval;
  if (!arma::eig_sym(eigval, hermitize(a))) return false;
  return eigval.min() >= -tol * scale;
}

bool is_unitary(const arma::cx_mat& u, double tol) {
  if (!u.is_square()) return false;
  const arma::cx_mat eye = arma::eye<arma::cx_mat>(u.n_rows, u.n_cols);
  return arma::norm(u.t() * u - eye, "fro") <= tol * static_cast<double>(u.n_rows);
}

void fix_svd_phases(arma::cx_mat& u, arma::cx_mat& v, double tol) {
  const arma::uword pairs = std::min(u.n_cols, v.n_cols);
  for (arma::uword j = 0; j < pairs; ++j) {
    for (arma::uword i = 0; i < v.n_rows; ++i) {
      const arma::cx_double z = v(i, j);
      if (std::abs(z) > tol) {
        const arma::cx_double phase = z / std::abs(z);
        v.col(j) *= std::conj(phase);
        u.col(j) *= std::conj(phase);
        break;
      }
    }
  }
}

bool proportional_to_identity(const arma::cx_mat& m, double* factor, double tol) {
  if (!m.is_square()) return false;
  const arma::uword d = m.n_rows;
  const double c = arma::trace(m).real() / static_cast<double>(d);
  const double scale = arma::norm(m, "fro");
  const double dev =
      arma::norm(m - c * arma::eye<arma::cx_mat>(d, d), "fro");
  const bool ok = (scale == 0.0) ? true : (dev <= tol * scale);
  if (ok && factor != nullptr) *factor = c;
  return ok;
}

}  // namespace relaytx
