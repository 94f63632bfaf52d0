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

#ifndef RELAYTX_POWER_ALLOC_HPP
#define RELAYTX_POWER_ALLOC_HPP

#include <armadillo>
#include <vector>

#include "relaytx/mse_core.hpp"

namespace relaytx {

/// Scalar power-allocation problem over the per-hop effective channel gains.
/// Stream i carries the composite gain gamma_i = prod_k u_ki / (u_ki + 1)
/// with u_ki = f_ki^2 h_ki^2, and each hop spends exactly its budget:
/// sum_i f_ki^2 = budget_k.
struct AllocationProblem {
  std::vector<arma::vec> gains;  // h_{k,i}, nonnegative, descending per hop
  std::vector<double> budgets;   // one per hop, positive
  Objective objective;
  double tol = 1e-9;   // absolute objective-change stopping threshold
  int max_iters = 500; // full hop cycles
  // When set, the descent also tries deterministic starts that concentrate
  // power on the strongest 1..N-1 streams and keeps the best converged run;
  // the plain uniform start alone can settle on an interior local optimum of
  // the coupled product objective.
  bool multi_start = true;
};

struct AllocationResult {
  std::vector<arma::vec> f;  // f_{k,i} >= 0, sum of squares = budget per hop
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  arma::vec objective_trace;  // objective after init and after each cycle
};

/// Composite per-stream gains gamma from per-hop amplitude vectors.
arma::vec gamma_from_allocation(const std::vector<arma::vec>& f,
                                const std::vector<arma::vec>& gains);

/// Reduced objective as a function of gamma; lower is better.
/// MaxMse: 1 - mean(gamma) (the common per-stream MSE after the
/// diagonal-equalizing rotation). SumMse: sum(1 - gamma).
/// MutualInfo: sum(log(1 - gamma)).
double reduced_objective(const Objective& obj, const arma::vec& gamma);

/// Block-coordinate descent over hops. Each hop subproblem is an exact
/// water-filling solved by bisection on the Lagrange multiplier; a projected
/// gradient pass backs it up if the stationarity check fails. Never throws on
/// exhausted iterations; the result is flagged not-converged instead.
AllocationResult solve(const AllocationProblem& problem);

/// Max stationarity violation |dg/dx + mu_k| over hops, measured on active
/// streams (f > 0) with the hop multiplier mu_k estimated from them.
double kkt_residual(const AllocationProblem& problem, const AllocationResult& result);

/// Exhaustive simplex-grid search over per-hop power splits with the given
/// absolute step in f^2. Refuses instances with more than 6 power variables
/// or an excessive point count (throws std::invalid_argument).
AllocationResult grid_oracle(const AllocationProblem& problem, double step);

}  // namespace relaytx

#endif  // RELAYTX_POWER_ALLOC_HPP
