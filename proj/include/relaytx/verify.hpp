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

#ifndef RELAYTX_VERIFY_HPP
#define RELAYTX_VERIFY_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "relaytx/mse_core.hpp"

namespace relaytx::verify {

/// Small fixed instances (two hops, two streams, receive correlation
/// proportional to the identity) on which the closed-form structure can be
/// cross-certified against the numeric optimizer.
struct CannedInstance {
  std::string name;
  ChainModel chain;
  Objective objective;
};

std::vector<CannedInstance> canned_structure_instances();

/// Runs the built-in invariant corpus: majorization partial sums,
/// constant-diagonal rotations, structure-vs-oracle cross certification,
/// water-filling vs grid oracle, and the zero-error degeneration. Prints one
/// line per check to `out`; returns true when everything passed.
bool run_all(std::ostream& out, int oracle_restarts = 6);

}  // namespace relaytx::verify

#endif  // RELAYTX_VERIFY_HPP
