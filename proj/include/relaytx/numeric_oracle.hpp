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

#ifndef RELAYTX_NUMERIC_ORACLE_HPP
#define RELAYTX_NUMERIC_ORACLE_HPP

#include <armadillo>
#include <functional>

#include "relaytx/mse_core.hpp"
#include "relaytx/rng.hpp"

namespace relaytx {

/// Desk-scale general-purpose optimizer over raw precoder matrices, used to
/// certify the closed-form structure. Deliberately independent of the design
/// path: the objective is evaluated through the chain statistics and all
/// derivatives are numeric.
struct OracleProblem {
  ChainModel chain;
  Objective objective;
  int restarts = 20;
  int max_iters = 300;
  double gradient_step = 1e-6;   // central-difference step
  double stop_grad_norm = 1e-6;  // descent stops below this gradient norm
};

struct OracleResult {
  PrecoderSet precoders;
  double objective_value = arma::datum::inf;
  double gradient_norm = arma::datum::inf;  // at the returned point
};

/// Random precoders rescaled hop-by-hop to meet every power budget with
/// equality; rescaling in hop order keeps earlier hops feasible because each
/// received covariance depends only on the preceding precoders.
PrecoderSet random_feasible_precoders(const ChainModel& chain, Rng& rng);

/// Projected gradient descent on the power-normalized parameterization with
/// numeric gradients, best of `restarts` random starts. Restarts that hit a
/// non-finite objective are discarded. Throws std::invalid_argument beyond
/// desk scale (more than 64 complex precoder entries).
OracleResult optimize_precoders(const OracleProblem& problem, Rng& rng);

/// Norm of the oracle's numeric gradient at a given feasible precoder set;
/// near zero when the point is a stationary point of the constrained
/// problem.
double oracle_gradient_norm(const ChainModel& chain, const Objective& obj,
                            const PrecoderSet& precoders, double step = 1e-6);

/// Compares the full central-difference gradient of f against independent
/// directional differences along random unit directions; returns the largest
/// relative deviation.
double numeric_gradient_check(const std::function<double(const arma::vec&)>& f,
                              const arma::vec& x, int n_directions, Rng& rng,
                              double gradient_step = 1e-6, double probe_step = 1e-5);

/// The oracle's objective as a function of the packed parameter vector, for
/// gradient diagnostics.
std::function<double(const arma::vec&)> oracle_objective_fn(const ChainModel& chain,
                                                            const Objective& obj);

/// Packs precoders into the oracle's real parameter vector.
arma::vec pack_precoders(const PrecoderSet& precoders);

}  // namespace relaytx

#endif  // RELAYTX_NUMERIC_ORACLE_HPP
