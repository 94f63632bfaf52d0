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

#include "relaytx/power_alloc.hpp"
#include "relaytx/rng.hpp"

using namespace relaytx;

namespace {

double budget_gap(const AllocationProblem& p, const AllocationResult& r) {
  double worst = 0.0;
  for (size_t k = 0; k < p.budgets.size(); ++k)
    worst = std::max(worst,
                     std::abs(arma::accu(arma::square(r.f[k])) - p.budgets[k]));
  return worst;
}

}  // namespace

TEST_CASE("symmetric single hop splits evenly") {
  AllocationProblem p;
  p.gains = {arma::vec{1.0, 1.0}};
  p.budgets = {2.0};
  p.objective = Objective::mutual_info();
  const AllocationResult r = solve(p);
  CHECK(r.converged);
  CHECK(std::abs(r.f[0](0) - 1.0) < 1e-6);
  CHECK(std::abs(r.f[0](1) - 1.0) < 1e-6);
  CHECK(budget_gap(p, r) < 1e-9);
  CHECK(kkt_residual(p, r) < 1e-6);
}

TEST_CASE("single hop matches the grid oracle") {
  AllocationProblem p;
  p.gains = {arma::vec{1.0, 0.5}};
  p.budgets = {2.0};
  p.objective = Objective::mutual_info();
  const AllocationResult r = solve(p);
  const AllocationResult g = grid_oracle(p, 0.002);
  CHECK(r.objective_value <= g.objective_value + 1e-9);
  CHECK(g.objective_value - r.objective_value < 1e-3);
  CHECK(kkt_residual(p, r) < 1e-4);
}

TEST_CASE("two hops match a four-variable grid") {
  AllocationProblem p;
  p.gains = {arma::vec{1.0, 0.6}, arma::vec{0.9, 0.5}};
  p.budgets = {2.0, 2.0};
  p.objective = Objective::max_mse();
  const AllocationResult r = solve(p);
  const AllocationResult g = grid_oracle(p, 0.01);
  CHECK(r.objective_value <= g.objective_value + 1e-9);
  CHECK(g.objective_value - r.objective_value < 1e-3);
  CHECK(kkt_residual(p, r) < 1e-4);
  CHECK(budget_gap(p, r) < 1e-9);
}

TEST_CASE("objective is nonincreasing across cycles") {
  Rng rng(3);
  for (ObjectiveKind kind :
       {ObjectiveKind::MaxMse, ObjectiveKind::SumMse, ObjectiveKind::MutualInfo}) {
    AllocationProblem p;
    p.objective = Objective{kind};
    for (int k = 0; k < 3; ++k) {
      arma::vec h(4);
      for (auto& v : h) v = 0.1 + 2.0 * rng.uniform();
      p.gains.push_back(arma::sort(h, "descend"));
      p.budgets.push_back(1.0 + 20.0 * rng.uniform());
    }
    const AllocationResult r = solve(p);
    for (arma::uword i = 1; i < r.objective_trace.n_elem; ++i)
      CHECK(r.objective_trace(i) <= r.objective_trace(i - 1) + 1e-12);
    CHECK(budget_gap(p, r) < 1e-9);
    CHECK(kkt_residual(p, r) < 1e-4);
  }
}

TEST_CASE("permutation equivariance") {
  AllocationProblem p;
  p.gains = {arma::vec{1.4, 0.9, 0.3}, arma::vec{1.1, 0.7, 0.5}};
  p.budgets = {3.0, 2.0};
  p.objective = Objective::sum_mse();
  const AllocationResult r = solve(p);

  const arma::uvec perm{2, 0, 1};
  AllocationProblem pp = p;
  for (auto& h : pp.gains) h = h(perm);
  const AllocationResult rp = solve(pp);
  for (size_t k = 0; k < p.gains.size(); ++k)
    for (arma::uword i = 0; i < perm.n_elem; ++i)
      CHECK(std::abs(rp.f[k](i) - r.f[k](perm(i))) < 1e-9);
}

TEST_CASE("gain scaling leaves gamma invariant") {
  AllocationProblem p;
  p.gains = {arma::vec{1.2, 0.8}};
  p.budgets = {4.0};
  p.objective = Objective::mutual_info();
  const AllocationResult r = solve(p);
  const arma::vec gamma = gamma_from_allocation(r.f, p.gains);

  // Doubling every gain while quartering the budget preserves f^2 h^2.
  AllocationProblem q;
  q.gains = {2.0 * p.gains[0]};
  q.budgets = {1.0};
  q.objective = p.objective;
  const AllocationResult rq = solve(q);
  const arma::vec gamma_q = gamma_from_allocation(rq.f, q.gains);
  CHECK(arma::abs(gamma - gamma_q).max() < 1e-9);
}

TEST_CASE("zero-gain streams receive no power") {
  AllocationProblem p;
  p.gains = {arma::vec{1.0, 0.0}};
  p.budgets = {2.0};
  p.objective = Objective::sum_mse();
  const AllocationResult r = solve(p);
  CHECK(std::abs(r.f[0](0) - std::sqrt(2.0)) < 1e-9);
  CHECK(r.f[0](1) == 0.0);
  // The dead stream is excluded from the residual by complementary slackness.
  CHECK(kkt_residual(p, r) < 1e-6);
}

TEST_CASE("grid oracle basics") {
  // A single stream takes the whole budget at any hop count.
  AllocationProblem p;
  p.gains = {arma::vec{0.7}, arma::vec{1.3}};
  p.budgets = {1.5, 2.5};
  p.objective = Objective::mutual_info();
  const AllocationResult g = grid_oracle(p, 0.1);
  CHECK(std::abs(g.f[0](0) - std::sqrt(1.5)) < 1e-12);
  CHECK(std::abs(g.f[1](0) - std::sqrt(2.5)) < 1e-12);

  // Symmetric gains split evenly at grid resolution.
  AllocationProblem p2;
  p2.gains = {arma::vec{1.0, 1.0}};
  p2.budgets = {2.0};
  p2.objective = Objective::sum_mse();
  const AllocationResult g2 = grid_oracle(p2, 0.01);
  CHECK(std::abs(g2.f[0](0) * g2.f[0](0) - 1.0) <= 0.011);

  // The solver is never worse than the oracle (up to grid slack).
  const AllocationResult s2 = solve(p2);
  CHECK(s2.objective_value <= g2.objective_value + 1e-9);

  // Dimension guard.
  AllocationProblem big;
  big.objective = Objective::sum_mse();
  for (int k = 0; k < 4; ++k) {
    big.gains.push_back(arma::vec{1.0, 0.5});
    big.budgets.push_back(1.0);
  }
  CHECK_THROWS_AS(grid_oracle(big, 0.01), std::invalid_argument);
}

TEST_CASE("max iteration exhaustion flags not-converged") {
  AllocationProblem p;
  p.gains = {arma::vec{1.0, 0.6}, arma::vec{0.9, 0.5}};
  p.budgets = {2.0, 2.0};
  p.objective = Objective::mutual_info();
  p.max_iters = 1;
  p.tol = 0.0;
  const AllocationResult r = solve(p);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(budget_gap(p, r) < 1e-9);
}
