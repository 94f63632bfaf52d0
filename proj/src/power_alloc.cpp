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

#include "relaytx/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace relaytx {

namespace {

constexpr int kBisectionSteps = 100;
constexpr int kFallbackSteps = 500;

void validate_problem(const AllocationProblem& p) {
  if (p.gains.empty() || p.gains.size() != p.budgets.size())
    throw std::invalid_argument("AllocationProblem: gains/budgets size mismatch");
  const arma::uword n = p.gains[0].n_elem;
  for (size_t k = 0; k < p.gains.size(); ++k) {
    if (p.gains[k].n_elem != n)
      throw std::invalid_argument("AllocationProblem: ragged gain vectors");
    if (p.gains[k].min() < 0.0)
      throw std::invalid_argument("AllocationProblem: gains must be nonnegative");
    if (!(p.budgets[k] > 0.0))
      throw std::invalid_argument("AllocationProblem: budgets must be positive");
  }
}

// Fraction u/(u+1) passed by one hop for stream power x against gain^2 a.
arma::vec pass_fraction(const arma::vec& x, const arma::vec& a) {
  arma::vec u = x % a;
  return u / (u + 1.0);
}

// Marginal utility of one hop's stream: d/dx of the maximized utility with
// the other hops' fractions held in c. Identical for the MSE criteria up to
// a constant factor; the mutual-information marginal carries the extra
// 1/(1 - gamma) weight through b = (1-c) a.
double marginal(ObjectiveKind kind, double a, double c, double x) {
  if (a <= 0.0 || c <= 0.0) return 0.0;
  const double d = 1.0 + a * x;
  if (kind == ObjectiveKind::MutualInfo) {
    const double b = (1.0 - c) * a;
    return c * a / (d * (1.0 + b * x));
  }
  return c * a / (d * d);
}

// Inverse of the marginal: stream power at water level mu (0 when the
// stream's zero-power marginal is already below mu).
double power_at_level(ObjectiveKind kind, double a, double c, double mu) {
  if (a <= 0.0 || c <= 0.0) return 0.0;
  const double m0 = c * a;
  if (m0 <= mu) return 0.0;
  if (kind == ObjectiveKind::MutualInfo) {
    const double b = (1.0 - c) * a;
    if (b <= 0.0) return (m0 / mu - 1.0) / a;
    // (1 + a x)(1 + b x) = c a / mu, positive root.
    const double disc = (a - b) * (a - b) + 4.0 * a * b * (m0 / mu);
    return std::max(0.0, (-(a + b) + std::sqrt(disc)) / (2.0 * a * b));
  }
  return (std::sqrt(m0 / mu) - 1.0) / a;
}

// Euclidean projection onto { x >= 0, sum x = total }.
arma::vec project_simplex(arma::vec x, double total) {
  const arma::uword n = x.n_elem;
  arma::vec u = arma::sort(x, "descend");
  arma::vec css = arma::cumsum(u);
  double theta = 0.0;
  for (arma::uword i = 0; i < n; ++i) {
    const double t = (css(i) - total) / static_cast<double>(i + 1);
    if (u(i) - t > 0.0) theta = t;
  }
  return arma::clamp(x - theta, 0.0, arma::datum::inf);
}

struct HopSubproblem {
  ObjectiveKind kind;
  arma::vec a;  // gain^2
  arma::vec c;  // composite fraction of the other hops
  double budget;

  double utility(const arma::vec& x) const {
    double v = 0.0;
    for (arma::uword i = 0; i < x.n_elem; ++i) {
      if (a(i) <= 0.0 || c(i) <= 0.0) continue;
      const double u = a(i) * x(i);
      if (kind == ObjectiveKind::MutualInfo) {
        const double b = (1.0 - c(i)) * a(i);
        v += std::log1p(u) - std::log1p(b * x(i));
      } else {
        v += c(i) * u / (u + 1.0);
      }
    }
    return v;
  }

  arma::vec gradient(const arma::vec& x) const {
    arma::vec g(x.n_elem);
    for (arma::uword i = 0; i < x.n_elem; ++i)
      g(i) = marginal(kind, a(i), c(i), x(i));
    return g;
  }
};

// Exact single-hop water-filling by bisection on the water level, with a
// projected-gradient ascent pass if the stationarity check fails.
arma::vec waterfill_hop(const HopSubproblem& sp) {
  const arma::uword n = sp.a.n_elem;
  const double p = sp.budget;
  arma::vec m0 = sp.c % sp.a;
  const double mu_max = m0.max();
  if (!(mu_max > 0.0)) {
    // Every stream is dead here or upstream; any split is equivalent.
    return arma::vec(n, arma::fill::value(p / static_cast<double>(n)));
  }

  auto total_power = [&](double mu) {
    double s = 0.0;
    for (arma::uword i = 0; i < n; ++i)
      s += power_at_level(sp.kind, sp.a(i), sp.c(i), mu);
    return s;
  };

  double hi = mu_max;
  double lo = mu_max * 0.5;
  for (int it = 0; it < 400 && total_power(lo) < p; ++it) lo *= 0.5;
  for (int it = 0; it < kBisectionSteps; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total_power(mid) >= p ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  arma::vec x(n);
  for (arma::uword i = 0; i < n; ++i)
    x(i) = power_at_level(sp.kind, sp.a(i), sp.c(i), mu);
  const double s = arma::accu(x);
  if (s > 0.0) x *= p / s;

  // Stationarity check over the active set.
  double worst = 0.0;
  int active = 0;
  for (arma::uword i = 0; i < n; ++i) {
    if (x(i) <= 1e-12 * p) continue;
    ++active;
    worst = std::max(worst, std::abs(marginal(sp.kind, sp.a(i), sp.c(i), x(i)) - mu));
  }
  if (active == 0 || worst <= 1e-6 * mu) return x;

  // Fallback: projected gradient ascent with Armijo halving.
  arma::vec best = x;
  double best_u = sp.utility(best);
  for (int it = 0; it < kFallbackSteps; ++it) {
    const arma::vec g = sp.gradient(best);
    double step = p / std::max(arma::norm(g, "inf"), 1e-12);
    bool improved = false;
    for (int h = 0; h < 60; ++h, step *= 0.5) {
      arma::vec cand = project_simplex(best + step * g, p);
      const double u = sp.utility(cand);
      if (u > best_u + 1e-14) {
        best = cand;
        best_u = u;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return best;
}

arma::vec gamma_from_pass(const std::vector<arma::vec>& t) {
  arma::vec g = t[0];
  for (size_t k = 1; k < t.size(); ++k) g %= t[k];
  return g;
}

}  // namespace

arma::vec gamma_from_allocation(const std::vector<arma::vec>& f,
                                const std::vector<arma::vec>& gains) {
  if (f.size() != gains.size())
    throw std::invalid_argument("gamma_from_allocation: hop count mismatch");
  arma::vec g(f[0].n_elem, arma::fill::ones);
  for (size_t k = 0; k < f.size(); ++k) {
    if (f[k].n_elem != gains[k].n_elem)
      throw std::invalid_argument("gamma_from_allocation: length mismatch");
    g %= pass_fraction(arma::square(f[k]), arma::square(gains[k]));
  }
  return g;
}

double reduced_objective(const Objective& obj, const arma::vec& gamma) {
  const double n = static_cast<double>(gamma.n_elem);
  switch (obj.kind) {
    case ObjectiveKind::MaxMse:
      return 1.0 - arma::accu(gamma) / n;
    case ObjectiveKind::SumMse:
      return n - arma::accu(gamma);
    case ObjectiveKind::MutualInfo: {
      double v = 0.0;
      for (arma::uword i = 0; i < gamma.n_elem; ++i) v += std::log1p(-gamma(i));
      return v;
    }
  }
  throw std::logic_error("reduced_objective: unknown kind");
}

namespace {

// One block-coordinate descent run from the given starting powers.
AllocationResult descend(const AllocationProblem& problem,
                         const std::vector<arma::vec>& a,
                         std::vector<arma::vec> x) {
  const size_t n_hops = problem.gains.size();
  const arma::uword n = problem.gains[0].n_elem;
  std::vector<arma::vec> t(n_hops);
  for (size_t k = 0; k < n_hops; ++k) t[k] = pass_fraction(x[k], a[k]);

  auto objective = [&]() {
    return reduced_objective(problem.objective, gamma_from_pass(t));
  };

  std::vector<double> trace;
  double obj = objective();
  trace.push_back(obj);

  AllocationResult result;
  int iter = 0;
  for (; iter < problem.max_iters; ++iter) {
    for (size_t k = 0; k < n_hops; ++k) {
      arma::vec c(n, arma::fill::ones);
      for (size_t l = 0; l < n_hops; ++l)
        if (l != k) c %= t[l];
      HopSubproblem sp{problem.objective.kind, a[k], c, problem.budgets[k]};
      x[k] = waterfill_hop(sp);
      t[k] = pass_fraction(x[k], a[k]);
    }
    const double next = objective();
    trace.push_back(next);
    const double improvement = obj - next;
    obj = next;
    if (improvement < problem.tol) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.f.resize(n_hops);
  for (size_t k = 0; k < n_hops; ++k) result.f[k] = arma::sqrt(x[k]);
  result.objective_value = obj;
  result.iterations = iter;
  result.objective_trace = arma::vec(trace);
  return result;
}

}  // namespace

AllocationResult solve(const AllocationProblem& problem) {
  validate_problem(problem);
  const size_t n_hops = problem.gains.size();
  const arma::uword n = problem.gains[0].n_elem;

  std::vector<arma::vec> a(n_hops);
  for (size_t k = 0; k < n_hops; ++k) a[k] = arma::square(problem.gains[k]);

  // The coupled product objective is nonconvex across hops and the descent
  // can settle on an interior stationary point when the global optimum
  // concentrates power on few streams. Deterministic starts covering the
  // top-m prefixes (m = n is the uniform start) recover those optima; the
  // best converged run wins.
  AllocationResult best;
  best.objective_value = arma::datum::inf;
  const arma::uword m_low = problem.multi_start ? 1 : n;
  for (arma::uword m = n; m >= m_low; --m) {
    std::vector<arma::vec> x(n_hops);
    for (size_t k = 0; k < n_hops; ++k) {
      x[k] = arma::vec(n, arma::fill::zeros);
      for (arma::uword i = 0; i < m; ++i)
        x[k](i) = problem.budgets[k] / static_cast<double>(m);
    }
    AllocationResult run = descend(problem, a, std::move(x));
    if (run.objective_value < best.objective_value) best = std::move(run);
  }
  return best;
}

double kkt_residual(const AllocationProblem& problem, const AllocationResult& result) {
  validate_problem(problem);
  const size_t n_hops = problem.gains.size();
  const arma::uword n = problem.gains[0].n_elem;

  std::vector<arma::vec> a(n_hops), x(n_hops), t(n_hops);
  for (size_t k = 0; k < n_hops; ++k) {
    a[k] = arma::square(problem.gains[k]);
    x[k] = arma::square(result.f[k]);
    t[k] = pass_fraction(x[k], a[k]);
  }
  const arma::vec gamma = gamma_from_pass(t);

  double residual = 0.0;
  for (size_t k = 0; k < n_hops; ++k) {
    arma::vec c(n, arma::fill::ones);
    for (size_t l = 0; l < n_hops; ++l)
      if (l != k) c %= t[l];

    // dg/dx for the minimized objective on this hop's stream powers.
    arma::vec grad(n, arma::fill::zeros);
    for (arma::uword i = 0; i < n; ++i) {
      const double d = 1.0 + a[k](i) * x[k](i);
      const double tprime = a[k](i) / (d * d);
      switch (problem.objective.kind) {
        case ObjectiveKind::MaxMse:
          grad(i) = -c(i) * tprime / static_cast<double>(n);
          break;
        case ObjectiveKind::SumMse:
          grad(i) = -c(i) * tprime;
          break;
        case ObjectiveKind::MutualInfo:
          grad(i) = -c(i) * tprime / std::max(1.0 - gamma(i), 1e-300);
          break;
      }
    }

    double mu = 0.0;
    int active = 0;
    for (arma::uword i = 0; i < n; ++i) {
      if (problem.gains[k](i) <= 0.0) continue;  // complementary slackness
      if (x[k](i) <= 1e-12 * problem.budgets[k]) continue;
      mu += -grad(i);
      ++active;
    }
    if (active == 0) continue;
    mu /= static_cast<double>(active);
    for (arma::uword i = 0; i < n; ++i) {
      if (problem.gains[k](i) <= 0.0) continue;
      if (x[k](i) <= 1e-12 * problem.budgets[k]) continue;
      residual = std::max(residual, std::abs(grad(i) + mu));
    }
  }
  return residual;
}

AllocationResult grid_oracle(const AllocationProblem& problem, double step) {
  validate_problem(problem);
  if (!(step > 0.0)) throw std::invalid_argument("grid_oracle: step must be positive");
  const size_t n_hops = problem.gains.size();
  const arma::uword n = problem.gains[0].n_elem;
  if (n * n_hops > 6)
    throw std::invalid_argument("grid_oracle: instance too large (more than 6 power variables)");

  // All per-hop splits on the grid; the last stream takes the remainder so
  // every candidate meets the budget exactly.
  std::vector<std::vector<arma::vec>> candidates(n_hops);
  double total_points = 1.0;
  for (size_t k = 0; k < n_hops; ++k) {
    const double p = problem.budgets[k];
    std::vector<arma::vec> list;
    arma::vec current(n, arma::fill::zeros);
    std::function<void(arma::uword, double)> emit = [&](arma::uword i, double left) {
      if (i + 1 == n) {
        current(i) = std::max(left, 0.0);
        list.push_back(current);
        return;
      }
      for (double v = 0.0; v <= left + 1e-12; v += step) {
        current(i) = std::min(v, left);
        emit(i + 1, left - current(i));
      }
    };
    emit(0, p);
    total_points *= static_cast<double>(list.size());
    if (total_points > 2.5e7)
      throw std::invalid_argument("grid_oracle: grid too fine for this instance");
    candidates[k] = std::move(list);
  }

  std::vector<size_t> index(n_hops, 0);
  std::vector<arma::vec> best(n_hops);
  double best_value = arma::datum::inf;
  while (true) {
    arma::vec gamma(n, arma::fill::ones);
    for (size_t k = 0; k < n_hops; ++k)
      gamma %= pass_fraction(candidates[k][index[k]], arma::square(problem.gains[k]));
    const double value = reduced_objective(problem.objective, gamma);
    if (value < best_value) {
      best_value = value;
      for (size_t k = 0; k < n_hops; ++k) best[k] = candidates[k][index[k]];
    }
    size_t k = 0;
    while (k < n_hops && ++index[k] == candidates[k].size()) {
      index[k] = 0;
      ++k;
    }
    if (k == n_hops) break;
  }

  AllocationResult result;
  result.f.resize(n_hops);
  for (size_t k = 0; k < n_hops; ++k) result.f[k] = arma::sqrt(best[k]);
  result.objective_value = best_value;
  result.iterations = 0;
  result.converged = true;
  result.objective_trace = arma::vec{best_value};
  return result;
}

}  // namespace relaytx
