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

#ifndef RELAYTX_RNG_HPP
#define RELAYTX_RNG_HPP

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace relaytx {

/// Deterministic random stream. Every source of randomness in the library
/// flows through this class so that any result is reproducible from a single
/// root seed. Gaussian variates are produced by an explicit Box-Muller
/// transform on raw 53-bit uniforms instead of std::normal_distribution,
/// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), gen_(scramble(seed)) {}

  /// Derives an independent stream keyed by (root seed, tags). The result
  /// depends only on the root seed, never on how much of this stream has
  /// been consumed, so derived streams are schedule-independent.
  Rng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = mix(root_, a);
    s = mix(s, b);
    s = mix(s, c);
    return Rng(s);
  }

  std::uint64_t raw() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  /// One random bit.
  int bit() { return static_cast<int>(raw() & 1u); }

  /// Standard normal N(0, 1).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(raw() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * arma::datum::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Circular complex Gaussian CN(0, 1): real and imaginary parts are
  /// independent N(0, 1/2).
  arma::cx_double cgaussian() {
    const double s = 1.0 / std::sqrt(2.0);
    return {s * gaussian(), s * gaussian()};
  }

  arma::cx_mat cgaussian_matrix(arma::uword m, arma::uword n) {
    arma::cx_mat w(m, n);
    for (arma::uword j = 0; j < n; ++j)
      for (arma::uword i = 0; i < m; ++i) w(i, j) = cgaussian();
    return w;
  }

  std::uint64_t root_seed() const { return root_; }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds and tag values.
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return scramble(a ^ (0x9e3779b97f4a7c15ull + (b << 1)));
  }

  std::uint64_t root_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace relaytx

#endif  // RELAYTX_RNG_HPP
