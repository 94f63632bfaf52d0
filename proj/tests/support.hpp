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
// Shared helpers for the test suites. The Monte Carlo machinery here is the
// independent oracle for the analytic chain statistics: it propagates data,
// estimation errors and noise directly through the signal model and never
// touches the library's covariance formulas.

#ifndef RELAYTX_TESTS_SUPPORT_HPP
#define RELAYTX_TESTS_SUPPORT_HPP

#include <armadillo>
#include <vector>

#include "relaytx/linalg.hpp"
#include "relaytx/mse_core.hpp"
#include "relaytx/rng.hpp"

namespace relaytx::testsupport {

// Per-hop error square roots for fast trial-by-trial error draws. err_sigma
// in HopModel already carries the error variance, so no extra scale appears
// here.
struct ErrorShaper {
  std::vector<arma::cx_mat> sqrt_sigma;
  std::vector<arma::cx_mat> sqrt_psi;

  explicit ErrorShaper(const ChainModel& chain) {
    for (const HopModel& hop : chain.hops) {
      sqrt_sigma.push_back(hermitian_sqrt(hop.err_sigma));
      sqrt_psi.push_back(hermitian_sqrt(hop.err_psi));
    }
  }

  arma::cx_mat draw(size_t k, Rng& rng) const {
    return sqrt_sigma[k] *
           rng.cgaussian_matrix(sqrt_sigma[k].n_rows, sqrt_psi[k].n_rows) *
           sqrt_psi[k];
  }
};

// One end-to-end sample: draws s ~ CN(0, I), fresh channel errors and fresh
// noise, and returns the equalized error vector g*y - s.
inline arma::cx_vec mc_error_sample(const ChainModel& chain, const PrecoderSet& p,
                                    const arma::cx_mat& g, const ErrorShaper& shaper,
                                    Rng& rng) {
  arma::cx_vec x(chain.n_streams);
  for (arma::uword i = 0; i < x.n_elem; ++i) x(i) = rng.cgaussian();
  const arma::cx_vec s = x;
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    const HopModel& hop = chain.hops[k];
    const arma::cx_mat h = hop.hbar + shaper.draw(k, rng);
    arma::cx_vec noise(hop.m_rx);
    for (arma::uword i = 0; i < noise.n_elem; ++i) noise(i) = rng.cgaussian();
    x = h * (p[k] * x) + std::sqrt(hop.noise_var) * noise;
  }
  return g * x - s;
}

// Empirical MSE matrix with the standard error of each entry's real part in
// se (same layout).
inline arma::cx_mat mc_mse_matrix(const ChainModel& chain, const PrecoderSet& p,
                                  const arma::cx_mat& g, long samples, Rng& rng,
                                  arma::mat* se = nullptr) {
  const arma::uword n = chain.n_streams;
  const ErrorShaper shaper(chain);
  arma::cx_mat sum(n, n, arma::fill::zeros);
  arma::mat sumsq(n, n, arma::fill::zeros);
  for (long t = 0; t < samples; ++t) {
    const arma::cx_vec e = mc_error_sample(chain, p, g, shaper, rng);
    const arma::cx_mat outer = e * e.t();
    sum += outer;
    sumsq += arma::square(arma::real(outer));
  }
  const double m = static_cast<double>(samples);
  if (se != nullptr) {
    const arma::mat mean_re = arma::real(sum) / m;
    *se = arma::sqrt(arma::clamp(sumsq / m - arma::square(mean_re), 0.0,
                                 arma::datum::inf) /
                     m);
  }
  return sum / m;
}

// Scalar Monte Carlo estimate of the total MSE with its standard error.
inline void mc_total_mse(const ChainModel& chain, const PrecoderSet& p,
                         const arma::cx_mat& g, long samples, Rng& rng,
                         double* mean, double* stderr_out) {
  const ErrorShaper shaper(chain);
  double sum = 0.0, sumsq = 0.0;
  for (long t = 0; t < samples; ++t) {
    const arma::cx_vec e = mc_error_sample(chain, p, g, shaper, rng);
    const double v = std::pow(arma::norm(e), 2);
    sum += v;
    sumsq += v * v;
  }
  const double m = static_cast<double>(samples);
  *mean = sum / m;
  *stderr_out = std::sqrt(std::max(sumsq / m - (*mean) * (*mean), 0.0) / m);
}

// Random chain with hops of bounded size; per-hop exponential correlations
// keep the receive side proportional to I when structured is true.
inline ChainModel random_chain(Rng& rng, arma::uword n_hops, arma::uword max_antennas,
                               bool structured, double sigma_e_sq) {
  const arma::uword n = 1 + rng.raw() % max_antennas;
  ChainModel chain;
  chain.n_streams = n;
  for (arma::uword k = 0; k < n_hops; ++k) {
    HopModel hop;
    hop.n_tx = n + rng.raw() % (max_antennas - n + 1);
    hop.m_rx = n + rng.raw() % (max_antennas - n + 1);
    hop.hbar = rng.cgaussian_matrix(hop.m_rx, hop.n_tx) *
               std::sqrt(1.0 - sigma_e_sq);
    const double alpha = 0.6 * rng.uniform();
    arma::mat psi(hop.n_tx, hop.n_tx);
    for (arma::uword i = 0; i < hop.n_tx; ++i)
      for (arma::uword j = 0; j < hop.n_tx; ++j)
        psi(i, j) = std::pow(alpha, std::abs(static_cast<double>(i) -
                                             static_cast<double>(j)));
    hop.err_psi = arma::cx_mat(psi, arma::zeros(hop.n_tx, hop.n_tx));
    if (structured) {
      hop.err_sigma = sigma_e_sq * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
    } else {
      const double beta = 0.5 * rng.uniform();
      arma::mat sig(hop.m_rx, hop.m_rx);
      for (arma::uword i = 0; i < hop.m_rx; ++i)
        for (arma::uword j = 0; j < hop.m_rx; ++j)
          sig(i, j) = std::pow(beta, std::abs(static_cast<double>(i) -
                                              static_cast<double>(j)));
      hop.err_sigma = sigma_e_sq * arma::cx_mat(sig, arma::zeros(hop.m_rx, hop.m_rx));
    }
    hop.noise_var = 0.5 + rng.uniform();
    hop.power_budget = 1.0 + 9.0 * rng.uniform();
    chain.hops.push_back(hop);
  }
  chain.validate();
  return chain;
}

// Random precoders scaled hop-by-hop to meet each budget with equality,
// using the covariance recursion inline.
inline PrecoderSet random_precoders(const ChainModel& chain, Rng& rng) {
  PrecoderSet p(chain.n_hops());
  arma::cx_mat r = arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams);
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    const HopModel& hop = chain.hops[k];
    const arma::uword in_dim = (k == 0) ? chain.n_streams : chain.hops[k - 1].m_rx;
    p[k] = rng.cgaussian_matrix(hop.n_tx, in_dim);
    const double c = arma::trace(p[k] * r * p[k].t()).real();
    p[k] *= std::sqrt(hop.power_budget / c);
    const arma::cx_mat tx = p[k] * r * p[k].t();
    const double leak = arma::trace(tx * hop.err_psi).real();
    r = hop.hbar * tx * hop.hbar.t() + leak * hop.err_sigma +
        hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
    r = 0.5 * (r + r.t());
  }
  return p;
}

// Majorization partial-sum check: a (sorted descending) prefix-dominated by
// b with equal totals.
inline bool majorized_by(const arma::vec& a, const arma::vec& b, double tol) {
  const arma::vec ad = arma::sort(a, "descend");
  const arma::vec bd = arma::sort(b, "descend");
  double sa = 0.0, sb = 0.0;
  for (arma::uword i = 0; i < ad.n_elem; ++i) {
    sa += ad(i);
    sb += bd(i);
    if (sa > sb + tol) return false;
  }
  return std::abs(sa - sb) <= tol;
}

// Weak version: prefix domination only.
inline bool weakly_majorized_by(const arma::vec& a, const arma::vec& b, double tol) {
  const arma::vec ad = arma::sort(a, "descend");
  const arma::vec bd = arma::sort(b, "descend");
  double sa = 0.0, sb = 0.0;
  for (arma::uword i = 0; i < ad.n_elem; ++i) {
    sa += ad(i);
    sb += bd(i);
    if (sa > sb + tol) return false;
  }
  return true;
}

inline arma::cx_mat random_unitary(arma::uword n, Rng& rng) {
  arma::cx_mat q, r;
  arma::qr(q, r, rng.cgaussian_matrix(n, n));
  return q;
}

}  // namespace relaytx::testsupport

#endif  // RELAYTX_TESTS_SUPPORT_HPP
