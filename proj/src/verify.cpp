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

#include "relaytx/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "relaytx/channel.hpp"
#include "relaytx/design.hpp"
#include "relaytx/linalg.hpp"
#include "relaytx/numeric_oracle.hpp"
#include "relaytx/power_alloc.hpp"
#include "relaytx/rng.hpp"
#include "relaytx/sim.hpp"

namespace relaytx::verify {

namespace {

// Partial-sum comparison: every prefix sum of sorted(a) bounded by that of
// sorted(b), totals equal within tol.
bool majorized_by(const arma::vec& a, const arma::vec& b, double tol) {
  const arma::vec ad = arma::sort(a, "descend");
  const arma::vec bd = arma::sort(b, "descend");
  if (ad.n_elem != bd.n_elem) return false;
  double sa = 0.0, sb = 0.0;
  for (arma::uword i = 0; i < ad.n_elem; ++i) {
    sa += ad(i);
    sb += bd(i);
    if (sa > sb + tol) return false;
  }
  return std::abs(sa - sb) <= tol;
}

arma::cx_mat random_unitary(arma::uword n, Rng& rng) {
  arma::cx_mat q, r;
  arma::qr(q, r, rng.cgaussian_matrix(n, n));
  return q;
}

ChainModel canned_chain(std::uint64_t seed, double corr_alpha, double sigma_e_sq,
                        double snr_db) {
  ChainTemplate tpl;
  tpl.n_streams = 2;
  tpl.node_antennas = {2, 2, 2};
  tpl.corr_alpha = {corr_alpha, corr_alpha};
  tpl.corr_beta = {0.0, 0.0};
  tpl.sigma_e_sq = sigma_e_sq;

  Rng rng(seed);
  std::vector<arma::cx_mat> hbar;
  for (const HopErrorModel& m : hop_error_models(tpl)) {
    Rng hop_rng = rng.derive(hbar.size());
    hbar.push_back(HopSampler(m).sample_estimated_channel(hop_rng));
  }
  return chain_from_template(tpl, hbar, std::pow(10.0, snr_db / 10.0), true);
}

struct Reporter {
  std::ostream& out;
  bool all_ok = true;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "[ ok ] " : "[FAIL] ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << "\n";
    all_ok = all_ok && ok;
  }
};

}  // namespace

std::vector<CannedInstance> canned_structure_instances() {
  std::vector<CannedInstance> v;
  v.push_back({"k2n2-summse-a0.3", canned_chain(101, 0.3, 0.02, 15.0), Objective::sum_mse()});
  v.push_back({"k2n2-mi-a0.5", canned_chain(102, 0.5, 0.05, 12.0), Objective::mutual_info()});
  v.push_back({"k2n2-maxmse-a0.2", canned_chain(103, 0.2, 0.01, 18.0), Objective::max_mse()});
  v.push_back({"k2n2-mi-a0.0", canned_chain(104, 0.0, 0.004, 20.0), Objective::mutual_info()});
  v.push_back({"k2n2-summse-a0.45", canned_chain(105, 0.45, 0.08, 10.0), Objective::sum_mse()});
  return v;
}

bool run_all(std::ostream& out, int oracle_restarts) {
  Reporter r{out};
  Rng rng(7771);

  // Majorization partial sums on random spectra.
  {
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
      const arma::uword n = 2 + trial % 4;
      arma::vec lam(n);
      for (arma::uword i = 0; i < n; ++i) lam(i) = rng.uniform();
      const arma::cx_mat v = random_unitary(n, rng);
      const arma::cx_mat theta = v * arma::diagmat(lam) * v.t();
      const arma::vec diag_mse =
          1.0 - arma::real(theta.diag());  // diagonal of I - theta
      const arma::vec constant(n, arma::fill::value(1.0 - arma::accu(lam) / n));
      ok = majorized_by(constant, diag_mse, 1e-10);
    }
    r.check("majorization: constant profile below diagonal profile", ok);
  }

  // Constant-diagonal rotation.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const arma::uword n = 1 + trial % 5;
      const arma::cx_mat q = q_f_matrix(n);
      arma::vec lam(n);
      for (arma::uword i = 0; i < n; ++i) lam(i) = rng.uniform();
      const arma::vec d = arma::real((q * arma::diagmat(lam) * q.t()).eval().diag());
      ok = arma::abs(d - arma::accu(lam) / n).max() < 1e-10 && is_unitary(q);
    }
    r.check("rotation: equal-modulus unitary equalizes any diagonal", ok);
  }

  // Structure certification on the canned corpus.
  for (const CannedInstance& inst : canned_structure_instances()) {
    const StructuredSolution sol = design_transceiver(inst.chain, inst.objective);
    const MseReport report = mse_matrix_lmmse(inst.chain, sol.precoders);
    const double structured = objective_value(inst.objective, report);

    const std::vector<double> powers = hop_transmit_powers(inst.chain, sol.precoders);
    bool on_budget = true;
    for (size_t k = 0; k < powers.size(); ++k)
      on_budget = on_budget &&
                  std::abs(powers[k] - inst.chain.hops[k].power_budget) <=
                      1e-8 * inst.chain.hops[k].power_budget;
    r.check("power boundary: " + inst.name, on_budget);

    const arma::vec gam = arma::sort(sol.theta_spectrum, "descend");
    const arma::vec eig = arma::sort(1.0 - report.eigs, "descend");
    r.check("spectrum consistency: " + inst.name,
            arma::abs(gam - eig).max() < 1e-8);

    OracleProblem op;
    op.chain = inst.chain;
    op.objective = inst.objective;
    op.restarts = oracle_restarts;
    Rng oracle_rng = rng.derive(0xA11, std::hash<std::string>{}(inst.name));
    const OracleResult oracle = optimize_precoders(op, oracle_rng);
    const bool not_beaten =
        structured <= oracle.objective_value + 1e-3 * std::abs(oracle.objective_value);
    r.check("structure not beaten by oracle: " + inst.name, not_beaten);

    Rng sample_rng = rng.derive(0xB22, std::hash<std::string>{}(inst.name));
    double best_random = arma::datum::inf;
    for (int i = 0; i < 1000; ++i) {
      const PrecoderSet p = random_feasible_precoders(inst.chain, sample_rng);
      best_random = std::min(best_random,
                             objective_value(inst.objective, mse_matrix_lmmse(inst.chain, p)));
    }
    r.check("structure not beaten by random sampling: " + inst.name,
            structured <= best_random + 1e-9);
  }

  // Zero-error degeneration: robust and estimate-only designs coincide.
  {
    ChainTemplate tpl;
    tpl.n_streams = 2;
    tpl.node_antennas = {3, 3, 3};
    tpl.corr_alpha = {0.4, 0.4};
    tpl.corr_beta = {0.0, 0.0};
    tpl.sigma_e_sq = 0.0;
    Rng crng(424242);
    std::vector<arma::cx_mat> hbar;
    for (const HopErrorModel& m : hop_error_models(tpl)) {
      Rng hop_rng = crng.derive(hbar.size());
      hbar.push_back(HopSampler(m).sample_estimated_channel(hop_rng));
    }
    const double p = std::pow(10.0, 1.5);
    const ChainModel robust = chain_from_template(tpl, hbar, p, true);
    const ChainModel basic = chain_from_template(tpl, hbar, p, false);
    const StructuredSolution a = design_transceiver(robust, Objective::mutual_info());
    const StructuredSolution b = design_transceiver(basic, Objective::mutual_info());
    double dev = 0.0;
    for (size_t k = 0; k < a.precoders.size(); ++k)
      dev = std::max(dev, arma::norm(a.precoders[k] - b.precoders[k], "fro"));
    r.check("degeneration: zero error makes robust equal estimate-only design",
            dev < 1e-10);
  }

  // Water-filling against the exhaustive grid.
  {
    AllocationProblem p1;
    p1.gains = {arma::vec{1.0, 0.5}};
    p1.budgets = {2.0};
    p1.objective = Objective::mutual_info();
    const AllocationResult s1 = solve(p1);
    const AllocationResult g1 = grid_oracle(p1, 0.01);
    r.check("water-filling vs grid: single hop",
            s1.objective_value <= g1.objective_value + 1e-9 &&
                g1.objective_value - s1.objective_value < 1e-3 &&
                kkt_residual(p1, s1) < 1e-4);

    AllocationProblem p2;
    p2.gains = {arma::vec{1.0, 0.6}, arma::vec{0.9, 0.5}};
    p2.budgets = {2.0, 2.0};
    p2.objective = Objective::max_mse();
    const AllocationResult s2 = solve(p2);
    const AllocationResult g2 = grid_oracle(p2, 0.01);
    r.check("water-filling vs grid: two hops",
            s2.objective_value <= g2.objective_value + 1e-9 &&
                g2.objective_value - s2.objective_value < 1e-3 &&
                kkt_residual(p2, s2) < 1e-4);
  }

  out << (r.all_ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return r.all_ok;
}

}  // namespace relaytx::verify
