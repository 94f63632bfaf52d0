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

#include "relaytx/design.hpp"

#include <cmath>

#include "relaytx/linalg.hpp"

namespace relaytx {

namespace {

// Robust transmit-shaping matrix: the error leakage seen by the next
// receiver grows with alpha * budget along the transmit correlation, on top
// of the receiver noise.
arma::cx_mat tx_shaping(const HopModel& hop) {
  const double a = alpha_k(hop);
  return a * hop.power_budget * hop.err_psi +
         hop.noise_var * arma::eye<arma::cx_mat>(hop.n_tx, hop.n_tx);
}

arma::cx_mat forwarding_noise_cov(const HopModel& hop, const arma::cx_mat& fwd) {
  const double leak = arma::trace(fwd * fwd.t() * hop.err_psi).real();
  return leak * hop.err_sigma +
         hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
}

}  // namespace

double alpha_k(const HopModel& hop) {
  return arma::trace(hop.err_sigma).real() / static_cast<double>(hop.m_rx);
}

bool structure_supported(const ChainModel& chain) {
  for (const HopModel& hop : chain.hops)
    if (!proportional_to_identity(hop.err_sigma) &&
        !proportional_to_identity(hop.err_psi))
      return false;
  return true;
}

EffectiveHop effective_hop_svd(const HopModel& hop) {
  const arma::cx_mat b_inv_sqrt = hermitian_inv_sqrt(tx_shaping(hop));

  double psi_level = 0.0;
  arma::cx_mat s;
  if (proportional_to_identity(hop.err_sigma)) {
    // Receive correlation proportional to I: the receive whitener is a
    // scalar and cancels against its own normalization.
    s = hop.hbar * b_inv_sqrt;
  } else if (proportional_to_identity(hop.err_psi, &psi_level)) {
    // Transmit correlation proportional to I: the forwarded power meets the
    // budget on the boundary, which pins the receive-side covariance before
    // the allocation is known.
    const double leak = psi_level * hop.power_budget;
    const arma::cx_mat kf =
        leak * hop.err_sigma +
        hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx);
    const double eta = leak * alpha_k(hop) + hop.noise_var;
    s = hermitian_inv_sqrt(kf / eta) * hop.hbar * b_inv_sqrt;
  } else {
    throw StructureUnsupported(
        "closed-form structure requires err_sigma or err_psi proportional to "
        "the identity on every hop");
  }

  EffectiveHop eff;
  if (!arma::svd(eff.rx_basis, eff.gains, eff.tx_basis, s))
    throw std::runtime_error("effective_hop_svd: SVD failed");
  fix_svd_phases(eff.rx_basis, eff.tx_basis);
  return eff;
}

arma::cx_mat q_f_matrix(arma::uword n) {
  if (n == 0) throw std::invalid_argument("q_f_matrix: n must be positive");
  const bool power_of_two = (n & (n - 1)) == 0;
  if (power_of_two) {
    arma::mat h(1, 1, arma::fill::ones);
    while (h.n_rows < n)
      h = arma::join_vert(arma::join_horiz(h, h), arma::join_horiz(h, -h));
    return arma::cx_mat(h / std::sqrt(static_cast<double>(n)),
                        arma::zeros(n, n));
  }
  arma::cx_mat q(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (arma::uword j = 0; j < n; ++j)
    for (arma::uword k = 0; k < n; ++k) {
      const double angle = -2.0 * arma::datum::pi *
                           static_cast<double>(j * k % n) / static_cast<double>(n);
      q(j, k) = scale * arma::cx_double(std::cos(angle), std::sin(angle));
    }
  return q;
}

arma::cx_mat u_omega(const Objective& obj, arma::uword n) {
  if (obj.schur_class() == SchurClass::Convex) return q_f_matrix(n);
  return arma::eye<arma::cx_mat>(n, n);
}

double xi_k(const HopModel& hop, const EffectiveHop& eff, const arma::vec& lambda_f) {
  const arma::uword n = lambda_f.n_elem;
  const arma::cx_mat b_inv_sqrt = hermitian_inv_sqrt(tx_shaping(hop));
  const arma::cx_mat vn = eff.tx_basis.cols(0, n - 1);
  const arma::cx_mat m = vn.t() * b_inv_sqrt * hop.err_psi * b_inv_sqrt * vn;
  double weighted = 0.0;
  for (arma::uword i = 0; i < n; ++i)
    weighted += lambda_f(i) * lambda_f(i) * m(i, i).real();
  const double denom = 1.0 - alpha_k(hop) * weighted;
  if (!(denom > 0.0))
    throw InfeasibleScaling("xi_k: nonpositive normalization denominator");
  return hop.noise_var / denom;
}

arma::vec gamma_from_gains(const std::vector<arma::vec>& f,
                           const std::vector<arma::vec>& h) {
  return gamma_from_allocation(f, h);
}

ChainTransform transform_state(const ChainModel& chain,
                               const std::vector<arma::cx_mat>& fwd) {
  ChainTransform t;
  const size_t n_hops = chain.n_hops();
  t.noise_cov.resize(n_hops);
  t.whitened_rx.resize(n_hops);
  t.transfer.resize(n_hops);
  for (size_t k = 0; k < n_hops; ++k) {
    const HopModel& hop = chain.hops[k];
    t.noise_cov[k] = hermitize(forwarding_noise_cov(hop, fwd[k]));
    const arma::cx_mat k_inv_sqrt = hermitian_inv_sqrt(t.noise_cov[k]);
    const arma::cx_mat hf = k_inv_sqrt * hop.hbar * fwd[k];
    t.whitened_rx[k] = hermitize(
        hf * hf.t() + arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx));
    t.transfer[k] = hermitian_inv_sqrt(t.whitened_rx[k]) * hf;
  }
  return t;
}

StructuredSolution assemble_solution(const ChainModel& chain, const Objective& obj,
                                     const std::vector<arma::vec>& lambda_f) {
  chain.validate();
  const size_t n_hops = chain.n_hops();
  const arma::uword n = chain.n_streams;
  if (lambda_f.size() != n_hops)
    throw std::invalid_argument("assemble_solution: one allocation per hop expected");
  for (size_t k = 0; k < n_hops; ++k) {
    if (lambda_f[k].n_elem != n || lambda_f[k].min() < 0.0)
      throw std::invalid_argument("assemble_solution: bad allocation vector");
    const double power = arma::accu(arma::square(lambda_f[k]));
    if (std::abs(power - chain.hops[k].power_budget) >
        1e-6 * std::max(chain.hops[k].power_budget, 1.0))
      throw std::invalid_argument("assemble_solution: allocation must meet the hop budget");
  }

  StructuredSolution sol;
  sol.lambda_f = lambda_f;
  sol.u_omega = u_omega(obj, n);

  std::vector<EffectiveHop> effs(n_hops);
  sol.hop_gains.resize(n_hops);
  sol.xi.resize(n_hops);
  sol.fwd.resize(n_hops);
  for (size_t k = 0; k < n_hops; ++k) {
    const HopModel& hop = chain.hops[k];
    effs[k] = effective_hop_svd(hop);
    sol.hop_gains[k] = effs[k].gains.head(n);
    sol.xi[k] = xi_k(hop, effs[k], lambda_f[k]);

    const arma::cx_mat b_inv_sqrt = hermitian_inv_sqrt(tx_shaping(hop));
    const arma::cx_mat vn = effs[k].tx_basis.cols(0, n - 1);
    const arma::cx_mat u_prev =
        (k == 0) ? sol.u_omega : arma::cx_mat(effs[k - 1].rx_basis.cols(0, n - 1));
    sol.fwd[k] = std::sqrt(sol.xi[k]) * b_inv_sqrt * vn *
                 arma::diagmat(arma::conv_to<arma::cx_vec>::from(lambda_f[k])) *
                 u_prev.t();
  }

  // Physical precoders: the first hop transmits the forwarding matrix as-is;
  // later hops undo the preceding hop's whitening and normalization.
  sol.precoders.resize(n_hops);
  sol.precoders[0] = sol.fwd[0];
  for (size_t k = 1; k < n_hops; ++k) {
    const HopModel& prev = chain.hops[k - 1];
    const arma::cx_mat kf = hermitize(forwarding_noise_cov(prev, sol.fwd[k - 1]));
    const arma::cx_mat k_inv_sqrt = hermitian_inv_sqrt(kf);
    const arma::cx_mat hf = k_inv_sqrt * prev.hbar * sol.fwd[k - 1];
    const arma::cx_mat pi = hermitize(
        hf * hf.t() + arma::eye<arma::cx_mat>(prev.m_rx, prev.m_rx));
    sol.precoders[k] = sol.fwd[k] * hermitian_inv_sqrt(pi) * k_inv_sqrt;
  }

  sol.equalizer = lmmse_equalizer(chain, sol.precoders);
  sol.theta_spectrum = gamma_from_gains(lambda_f, sol.hop_gains);
  sol.objective_value = reduced_objective(obj, sol.theta_spectrum);
  return sol;
}

StructuredSolution design_transceiver(const ChainModel& chain, const Objective& obj,
                                      const DesignOptions& options) {
  chain.validate();
  const arma::uword n = chain.n_streams;

  AllocationProblem problem;
  problem.objective = obj;
  problem.tol = options.allocation_tol;
  problem.max_iters = options.allocation_max_iters;
  problem.multi_start = options.allocation_multi_start;
  for (const HopModel& hop : chain.hops) {
    const EffectiveHop eff = effective_hop_svd(hop);  // throws if unsupported
    problem.gains.push_back(eff.gains.head(n));
    problem.budgets.push_back(hop.power_budget);
  }

  const AllocationResult alloc = solve(problem);
  StructuredSolution sol = assemble_solution(chain, obj, alloc.f);
  sol.allocation_converged = alloc.converged;
  sol.allocation_iterations = alloc.iterations;
  return sol;
}

}  // namespace relaytx
