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

#include <catch2/catch_amalgamated.hpp>

#include "relaytx/mse_core.hpp"
#include "relaytx/rng.hpp"
#include "support.hpp"

using namespace relaytx;
using namespace relaytx::testsupport;

namespace {

// Scalar single-hop chain: hbar = 1, no error, unit noise.
ChainModel scalar_chain() {
  ChainModel chain;
  chain.n_streams = 1;
  HopModel hop;
  hop.m_rx = 1;
  hop.n_tx = 1;
  hop.hbar = arma::cx_mat(1, 1, arma::fill::ones);
  hop.err_sigma = arma::zeros<arma::cx_mat>(1, 1);
  hop.err_psi = arma::zeros<arma::cx_mat>(1, 1);
  hop.noise_var = 1.0;
  hop.power_budget = 1.0;
  chain.hops.push_back(hop);
  return chain;
}

}  // namespace

TEST_CASE("received covariance recursion, scalar cases") {
  ChainModel chain = scalar_chain();
  PrecoderSet p{arma::cx_mat(1, 1, arma::fill::ones)};

  // 1*1*1*1 + 0 + 1 = 2
  const auto r = rx_covariances(chain, p);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[1](0, 0).real() - 2.0) < 1e-15);

  // Zero precoders leave only the noise.
  Rng rng(3);
  ChainModel c2 = random_chain(rng, 3, 4, false, 0.1);
  PrecoderSet zero(c2.n_hops());
  for (size_t k = 0; k < c2.n_hops(); ++k) {
    const arma::uword in_dim = (k == 0) ? c2.n_streams : c2.hops[k - 1].m_rx;
    zero[k] = arma::zeros<arma::cx_mat>(c2.hops[k].n_tx, in_dim);
  }
  const auto rz = rx_covariances(c2, zero);
  for (size_t k = 1; k < rz.size(); ++k) {
    const arma::cx_mat expected =
        c2.hops[k - 1].noise_var *
        arma::eye<arma::cx_mat>(c2.hops[k - 1].m_rx, c2.hops[k - 1].m_rx);
    CHECK(arma::norm(rz[k] - expected, "fro") < 1e-14);
  }
}

TEST_CASE("received covariance matches Monte Carlo") {
  Rng rng(11);
  ChainModel chain = random_chain(rng, 2, 2, false, 0.2);
  const PrecoderSet p = random_precoders(chain, rng);
  const auto r = rx_covariances(chain, p);

  // Propagate samples directly through the signal model.
  const ErrorShaper shaper(chain);
  const long samples = 100000;
  const arma::uword m = chain.hops.back().m_rx;
  arma::cx_mat sum(m, m, arma::fill::zeros);
  arma::mat sumsq(m, m, arma::fill::zeros);
  Rng draw(12);
  for (long t = 0; t < samples; ++t) {
    arma::cx_vec x(chain.n_streams);
    for (arma::uword i = 0; i < x.n_elem; ++i) x(i) = draw.cgaussian();
    for (size_t k = 0; k < chain.n_hops(); ++k) {
      const HopModel& hop = chain.hops[k];
      const arma::cx_mat h = hop.hbar + shaper.draw(k, draw);
      arma::cx_vec noise(hop.m_rx);
      for (arma::uword i = 0; i < noise.n_elem; ++i) noise(i) = draw.cgaussian();
      x = h * (p[k] * x) + std::sqrt(hop.noise_var) * noise;
    }
    const arma::cx_mat outer = x * x.t();
    sum += outer;
    sumsq += arma::square(arma::real(outer));
  }
  const arma::cx_mat mean = sum / double(samples);
  const arma::mat se = arma::sqrt(
      arma::clamp(sumsq / samples - arma::square(arma::real(mean)), 0.0,
                  arma::datum::inf) /
      samples);
  for (arma::uword i = 0; i < m; ++i)
    for (arma::uword j = 0; j < m; ++j)
      CHECK(std::abs(mean(i, j).real() - r.back()(i, j).real()) <=
            3.0 * std::max(se(i, j), 1e-6));
}

TEST_CASE("MSE matrix, scalar and trivial equalizers") {
  ChainModel chain = scalar_chain();
  PrecoderSet p{arma::cx_mat(1, 1, arma::fill::ones)};

  // g = 0 leaves the symbol covariance.
  const MseReport at_zero = mse_matrix(chain, p, arma::zeros<arma::cx_mat>(1, 1));
  CHECK(std::abs(at_zero.phi(0, 0).real() - 1.0) < 1e-15);

  // g = 1/2: 1/4 * 2 + 1 - 1/2 - 1/2 = 1/2.
  arma::cx_mat g(1, 1);
  g(0, 0) = 0.5;
  const MseReport at_half = mse_matrix(chain, p, g);
  CHECK(std::abs(at_half.phi(0, 0).real() - 0.5) < 1e-15);

  // The LMMSE equalizer is h p / (h^2 p^2 + noise) = 1/2 with MSE 1/2.
  const arma::cx_mat gl = lmmse_equalizer(chain, p);
  CHECK(std::abs(gl(0, 0) - arma::cx_double(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(mse_matrix_lmmse(chain, p).diag(0) - 0.5) < 1e-15);

  // Zero precoders give a zero equalizer and identity MSE.
  PrecoderSet zero{arma::zeros<arma::cx_mat>(1, 1)};
  CHECK(arma::norm(lmmse_equalizer(chain, zero), "fro") == 0.0);
  CHECK(std::abs(mse_matrix_lmmse(chain, zero).diag(0) - 1.0) < 1e-15);
}

TEST_CASE("analytic MSE matrix matches Monte Carlo") {
  Rng rng(21);
  ChainModel chain = random_chain(rng, 2, 2, false, 0.15);
  const PrecoderSet p = random_precoders(chain, rng);
  const arma::cx_mat g = lmmse_equalizer(chain, p);
  const MseReport analytic = mse_matrix(chain, p, g);

  arma::mat se;
  Rng draw(22);
  const arma::cx_mat empirical = mc_mse_matrix(chain, p, g, 100000, draw, &se);
  for (arma::uword i = 0; i < analytic.phi.n_rows; ++i)
    for (arma::uword j = 0; j < analytic.phi.n_cols; ++j)
      CHECK(std::abs(empirical(i, j).real() - analytic.phi(i, j).real()) <=
            3.0 * std::max(se(i, j), 1e-6));
}

TEST_CASE("LMMSE MSE matrix equals its closed form") {
  Rng rng(25);
  ChainModel chain = random_chain(rng, 2, 3, false, 0.1);
  const PrecoderSet p = random_precoders(chain, rng);
  const MseReport composed = mse_matrix_lmmse(chain, p);
  const arma::cx_mat l = chained_channel(chain, p);
  const arma::cx_mat closed =
      arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams) -
      l.t() * arma::solve(rx_covariances(chain, p).back(), l);
  CHECK(arma::norm(composed.phi - closed, "fro") < 1e-10);
}

TEST_CASE("LMMSE dominates every equalizer in the semidefinite order") {
  Rng rng(31);
  for (int instance = 0; instance < 4; ++instance) {
    ChainModel chain = random_chain(rng, 1 + instance % 3, 4, false, 0.1);
    const PrecoderSet p = random_precoders(chain, rng);
    const arma::cx_mat gl = lmmse_equalizer(chain, p);
    const MseReport best = mse_matrix(chain, p, gl);
    const arma::uword m = chain.hops.back().m_rx;

    for (int trial = 0; trial < 50; ++trial) {
      const double scale = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
      const arma::cx_mat g = gl + scale * rng.cgaussian_matrix(chain.n_streams, m);
      const MseReport other = mse_matrix(chain, p, g);
      arma::vec eig;
      arma::eig_sym(eig, other.phi - best.phi);
      CHECK(eig.min() >= -1e-9);
    }

    // Local-optimality probe on the trace.
    const double base = arma::accu(best.diag);
    for (int trial = 0; trial < 100; ++trial) {
      const arma::cx_mat g = gl + 1e-3 * rng.cgaussian_matrix(chain.n_streams, m);
      CHECK(arma::accu(mse_matrix(chain, p, g).diag) >= base - 1e-12);
    }
  }
}

TEST_CASE("perfect-CSI reduction drops the error terms") {
  Rng rng(41);
  ChainModel chain = random_chain(rng, 3, 3, false, 0.0);
  for (HopModel& hop : chain.hops) {
    hop.err_sigma.zeros();
    hop.err_psi.zeros();
  }
  const PrecoderSet p = random_precoders(chain, rng);
  const arma::cx_mat g = lmmse_equalizer(chain, p);
  const MseReport full = mse_matrix(chain, p, g);

  // Directly coded perfect-CSI expression: G R G^H + I - L^H G^H - G L with
  // the plain noise-only covariance recursion.
  arma::cx_mat r = arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams);
  arma::cx_mat l = arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams);
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    const HopModel& hop = chain.hops[k];
    r = hop.hbar * p[k] * r * p[k].t() * hop.hbar.t() +
        hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
    l = hop.hbar * p[k] * l;
  }
  const arma::cx_mat phi = g * r * g.t() +
                           arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams) -
                           l.t() * g.t() - g * l;
  CHECK(arma::norm(full.phi - phi, "fro") < 1e-12 * std::max(1.0, arma::norm(phi, "fro")));
}

TEST_CASE("majorization of the diagonal profile") {
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const arma::uword n = 2 + trial % 4;
    arma::vec lam(n);
    for (arma::uword i = 0; i < n; ++i) lam(i) = rng.uniform();
    const arma::cx_mat v = random_unitary(n, rng);
    const arma::cx_mat theta = v * arma::diagmat(lam) * v.t();
    const arma::vec diag_profile = 1.0 - arma::real(theta.diag());
    const arma::vec constant(n, arma::fill::value(1.0 - arma::accu(lam) / n));
    CHECK(majorized_by(constant, diag_profile, 1e-10));
    // And the diagonal profile is majorized by the spectrum.
    CHECK(majorized_by(diag_profile, arma::sort(1.0 - lam, "descend"), 1e-10));
  }
}

TEST_CASE("objective values") {
  MseReport report;
  report.phi = arma::cx_mat(arma::diagmat(arma::vec{0.2, 0.8}), arma::zeros(2, 2));
  report.diag = {0.2, 0.8};
  report.eigs = {0.8, 0.2};
  CHECK(objective_value(Objective::max_mse(), report) == Catch::Approx(0.8));
  CHECK(objective_value(Objective::sum_mse(), report) == Catch::Approx(1.0));

  MseReport identity;
  identity.phi = arma::eye<arma::cx_mat>(2, 2);
  identity.diag = {1.0, 1.0};
  identity.eigs = {1.0, 1.0};
  CHECK(objective_value(Objective::mutual_info(), identity) == Catch::Approx(0.0));

  MseReport singular;
  singular.phi = arma::zeros<arma::cx_mat>(2, 2);
  singular.diag = {0.0, 0.0};
  singular.eigs = {0.0, 0.0};
  CHECK_THROWS(objective_value(Objective::mutual_info(), singular));
}

TEST_CASE("objective schur classes") {
  CHECK(Objective::max_mse().schur_class() == SchurClass::Convex);
  CHECK(Objective::sum_mse().schur_class() == SchurClass::Concave);
  CHECK(Objective::mutual_info().schur_class() == SchurClass::Concave);
}

TEST_CASE("shape validation") {
  ChainModel chain = scalar_chain();
  PrecoderSet wrong{arma::cx_mat(2, 2, arma::fill::ones)};
  CHECK_THROWS_AS(rx_covariances(chain, wrong), std::invalid_argument);
  PrecoderSet p{arma::cx_mat(1, 1, arma::fill::ones)};
  CHECK_THROWS_AS(mse_matrix(chain, p, arma::zeros<arma::cx_mat>(2, 2)),
                  std::invalid_argument);
}
