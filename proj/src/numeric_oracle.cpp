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

#include "relaytx/numeric_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relaytx/linalg.hpp"

namespace relaytx {

namespace {

struct Shape {
  arma::uword rows, cols;
};

std::vector<Shape> precoder_shapes(const ChainModel& chain) {
  std::vector<Shape> shapes(chain.n_hops());
  for (size_t k = 0; k < chain.n_hops(); ++k) {
    shapes[k].rows = chain.hops[k].n_tx;
    shapes[k].cols = (k == 0) ? chain.n_streams : chain.hops[k - 1].m_rx;
  }
  return shapes;
}

arma::uword total_complex_entries(const std::vector<Shape>& shapes) {
  arma::uword n = 0;
  for (const Shape& s : shapes) n += s.rows * s.cols;
  return n;
}

PrecoderSet unpack(const arma::vec& x, const std::vector<Shape>& shapes) {
  PrecoderSet p(shapes.size());
  arma::uword off = 0;
  for (size_t k = 0; k < shapes.size(); ++k) {
    const arma::uword count = shapes[k].rows * shapes[k].cols;
    arma::mat re(x.memptr() + off, shapes[k].rows, shapes[k].cols);
    arma::mat im(x.memptr() + off + count, shapes[k].rows, shapes[k].cols);
    p[k] = arma::cx_mat(re, im);
    off += 2 * count;
  }
  return p;
}

// Rescale to budget equality in hop order; the received covariance entering
// hop k depends only on hops before k, so later rescales never break earlier
// feasibility. Returns false for degenerate (zero-power) directions.
bool normalize_in_place(const ChainModel& chain, PrecoderSet& p) {
  arma::cx_mat r = arma::eye<arma::cx_mat>(chain.n_streams, chain.n_streams);
  for (size_t k = 0; k < p.size(); ++k) {
    const HopModel& hop = chain.hops[k];
    double c = arma::trace(p[k] * r * p[k].t()).real();
    if (!(c > 0.0) || !std::isfinite(c)) return false;
    p[k] *= std::sqrt(hop.power_budget / c);
    const arma::cx_mat tx = p[k] * r * p[k].t();
    const double leak = arma::trace(tx * hop.err_psi).real();
    r = hermitize(hop.hbar * tx * hop.hbar.t() + leak * hop.err_sigma +
                  hop.noise_var * arma::eye<arma::cx_mat>(hop.m_rx, hop.m_rx));
  }
  return true;
}

arma::vec numeric_gradient(const std::function<double(const arma::vec&)>& f,
                           const arma::vec& x, double step) {
  arma::vec g(x.n_elem);
  arma::vec probe = x;
  for (arma::uword i = 0; i < x.n_elem; ++i) {
    probe(i) = x(i) + step;
    const double fp = f(probe);
    probe(i) = x(i) - step;
    const double fm = f(probe);
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace

arma::vec pack_precoders(const PrecoderSet& precoders) {
  arma::uword total = 0;
  for (const arma::cx_mat& p : precoders) total += 2 * p.n_elem;
  arma::vec x(total);
  arma::uword off = 0;
  for (const arma::cx_mat& p : precoders) {
    const arma::mat re = arma::real(p);
    const arma::mat im = arma::imag(p);
    x.subvec(off, off + p.n_elem - 1) = arma::vectorise(re);
    off += p.n_elem;
    x.subvec(off, off + p.n_elem - 1) = arma::vectorise(im);
    off += p.n_elem;
  }
  return x;
}

std::function<double(const arma::vec&)> oracle_objective_fn(const ChainModel& chain,
                                                            const Objective& obj) {
  const std::vector<Shape> shapes = precoder_shapes(chain);
  return [chain, obj, shapes](const arma::vec& x) -> double {
    PrecoderSet p = unpack(x, shapes);
    if (!normalize_in_place(chain, p)) return arma::datum::inf;
    try {
      const double v = objective_value(obj, mse_matrix_lmmse(chain, p));
      return std::isfinite(v) ? v : arma::datum::inf;
    } catch (const std::exception&) {
      return arma::datum::inf;
    }
  };
}

PrecoderSet random_feasible_precoders(const ChainModel& chain, Rng& rng) {
  chain.validate();
  const std::vector<Shape> shapes = precoder_shapes(chain);
  PrecoderSet p(shapes.size());
  for (size_t k = 0; k < shapes.size(); ++k)
    p[k] = rng.cgaussian_matrix(shapes[k].rows, shapes[k].cols);
  if (!normalize_in_place(chain, p))
    throw std::runtime_error("random_feasible_precoders: degenerate draw");
  return p;
}

OracleResult optimize_precoders(const OracleProblem& problem, Rng& rng) {
  problem.chain.validate();
  const std::vector<Shape> shapes = precoder_shapes(problem.chain);
  if (total_complex_entries(shapes) > 64)
    throw std::invalid_argument("optimize_precoders: instance beyond desk scale");
  const auto f = oracle_objective_fn(problem.chain, problem.objective);

  OracleResult best;
  for (int r = 0; r < problem.restarts; ++r) {
    arma::uword dim = 0;
    for (const Shape& s : shapes) dim += 2 * s.rows * s.cols;
    arma::vec x(dim);
    for (arma::uword i = 0; i < dim; ++i)
      x(i) = rng.gaussian() / std::sqrt(2.0);
    double fx = f(x);
    if (!std::isfinite(fx)) continue;  // discard degenerate restart

    double gnorm = arma::datum::inf;
    for (int it = 0; it < problem.max_iters; ++it) {
      const arma::vec g = numeric_gradient(f, x, problem.gradient_step);
      gnorm = arma::norm(g);
      if (!std::isfinite(gnorm) || gnorm < problem.stop_grad_norm) break;
      double step = 1.0 / std::max(1.0, gnorm);
      bool moved = false;
      for (int h = 0; h < 50; ++h, step *= 0.5) {
        const arma::vec cand = x - step * g;
        const double fc = f(cand);
        if (fc <= fx - 1e-4 * step * gnorm * gnorm) {
          x = cand;
          fx = fc;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (fx < best.objective_value) {
      PrecoderSet p = unpack(x, shapes);
      if (!normalize_in_place(problem.chain, p)) continue;
      best.precoders = std::move(p);
      best.objective_value = fx;
      best.gradient_norm = gnorm;
    }
  }
  if (!std::isfinite(best.objective_value))
    throw std::runtime_error("optimize_precoders: every restart diverged");
  return best;
}

double oracle_gradient_norm(const ChainModel& chain, const Objective& obj,
                            const PrecoderSet& precoders, double step) {
  const auto f = oracle_objective_fn(chain, obj);
  return arma::norm(numeric_gradient(f, pack_precoders(precoders), step));
}

double numeric_gradient_check(const std::function<double(const arma::vec&)>& f,
                              const arma::vec& x, int n_directions, Rng& rng,
                              double gradient_step, double probe_step) {
  const arma::vec g = numeric_gradient(f, x, gradient_step);
  double worst = 0.0;
  for (int d = 0; d < n_directions; ++d) {
    arma::vec dir(x.n_elem);
    for (arma::uword i = 0; i < x.n_elem; ++i) dir(i) = rng.gaussian();
    const double len = arma::norm(dir);
    if (len == 0.0) continue;  // zero direction: both sides are exactly zero
    dir /= len;
    const double fd = (f(x + probe_step * dir) - f(x - probe_step * dir)) /
                      (2.0 * probe_step);
    const double dev = std::abs(arma::dot(g, dir) - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace relaytx
