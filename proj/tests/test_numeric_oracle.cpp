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

#include "relaytx/design.hpp"
#include "relaytx/numeric_oracle.hpp"
#include "relaytx/rng.hpp"
#include "support.hpp"

using namespace relaytx;
using namespace relaytx::testsupport;

TEST_CASE("gradient check on a quadratic") {
  Rng rng(1);
  arma::mat a = arma::randu(6, 6);  // arbitrary fixed matrix is fine here
  a = a.t() * a + arma::eye(6, 6);
  const arma::vec b = arma::randu(6);
  const auto f = [&](const arma::vec& x) {
    return 0.5 * arma::dot(x, a * x) - arma::dot(b, x);
  };
  const arma::vec x = arma::randu(6);
  CHECK(numeric_gradient_check(f, x, 10, rng) < 1e-6);
}

TEST_CASE("scalar perfect-CSI instance recovers the closed form") {
  ChainModel chain;
  chain.n_streams = 1;
  HopModel hop;
  hop.m_rx = hop.n_tx = 1;
  hop.hbar = arma::cx_mat(1, 1);
  hop.hbar(0, 0) = arma::cx_double(0.8, -0.3);
  hop.err_sigma = arma::zeros<arma::cx_mat>(1, 1);
  hop.err_psi = arma::zeros<arma::cx_mat>(1, 1);
  hop.noise_var = 1.0;
  hop.power_budget = 4.0;
  chain.hops.push_back(hop);

  OracleProblem problem;
  problem.chain = chain;
  problem.objective = Objective::sum_mse();
  problem.restarts = 3;
  Rng rng(2);
  const OracleResult result = optimize_precoders(problem, rng);

  const double h2 = std::norm(hop.hbar(0, 0));
  const double expected = hop.noise_var / (hop.power_budget * h2 + hop.noise_var);
  CHECK(std::abs(result.objective_value - expected) < 1e-6 * expected);
  CHECK(std::abs(std::norm(result.precoders[0](0, 0)) - hop.power_budget) < 1e-8);
}

TEST_CASE("oracle returns feasible points") {
  Rng rng(3);
  ChainModel chain = random_chain(rng, 2, 2, true, 0.05);
  OracleProblem problem;
  problem.chain = chain;
  problem.objective = Objective::mutual_info();
  problem.restarts = 2;
  problem.max_iters = 60;
  const OracleResult result = optimize_precoders(problem, rng);
  const std::vector<double> powers = hop_transmit_powers(chain, result.precoders);
  for (size_t k = 0; k < powers.size(); ++k)
    CHECK(std::abs(powers[k] - chain.hops[k].power_budget) <
          1e-8 * chain.hops[k].power_budget);
}

TEST_CASE("gradient check on the chain objective") {
  Rng rng(4);
  ChainModel chain = random_chain(rng, 2, 2, true, 0.05);
  const auto f = oracle_objective_fn(chain, Objective::sum_mse());
  const PrecoderSet p = random_feasible_precoders(chain, rng);
  CHECK(numeric_gradient_check(f, pack_precoders(p), 10, rng) < 1e-4);
}

TEST_CASE("structured solution is a stationary point of the oracle objective") {
  Rng rng(5);
  for (ObjectiveKind kind :
       {ObjectiveKind::SumMse, ObjectiveKind::MutualInfo, ObjectiveKind::MaxMse}) {
    ChainModel chain = random_chain(rng, 2, 2, true, 0.04);
    const Objective obj{kind};
    const StructuredSolution sol = design_transceiver(chain, obj);
    CHECK(oracle_gradient_norm(chain, obj, sol.precoders) < 1e-4);
  }
}

TEST_CASE("oracle certifies the structure at desk scale") {
  Rng rng(6);
  ChainModel chain = random_chain(rng, 2, 2, true, 0.03);
  const Objective obj = Objective::mutual_info();
  const StructuredSolution sol = design_transceiver(chain, obj);
  const double structured =
      objective_value(obj, mse_matrix_lmmse(chain, sol.precoders));

  OracleProblem problem;
  problem.chain = chain;
  problem.objective = obj;
  problem.restarts = 5;
  problem.max_iters = 150;
  const OracleResult oracle = optimize_precoders(problem, rng);
  CHECK(structured <= oracle.objective_value + 1e-3 * std::abs(oracle.objective_value));
}

TEST_CASE("desk-scale guard") {
  Rng rng(7);
  ChainModel chain;
  chain.n_streams = 4;
  for (int k = 0; k < 3; ++k) {
    HopModel hop;
    hop.m_rx = hop.n_tx = 5;
    hop.hbar = rng.cgaussian_matrix(5, 5);
    hop.err_sigma = arma::zeros<arma::cx_mat>(5, 5);
    hop.err_psi = arma::zeros<arma::cx_mat>(5, 5);
    hop.noise_var = 1.0;
    hop.power_budget = 1.0;
    chain.hops.push_back(hop);
  }
  OracleProblem problem;
  problem.chain = chain;
  problem.objective = Objective::sum_mse();
  Rng r(8);
  CHECK_THROWS_AS(optimize_precoders(problem, r), std::invalid_argument);
}
