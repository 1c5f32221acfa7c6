// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
// Exact brute-force Shapley values and interactions for small cooperative
// games. Coalitions are bitmasks over players 0..n-1.
//
// Composite players (a set of patches acting as one) are passed as
// "elements": disjoint coalitions whose union is the flattened patch set.
//

#ifndef VXCODE_GAME_ORACLE_H_
#define VXCODE_GAME_ORACLE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vxcode/geometry.h"

namespace vxcode {

using Coalition = std::uint32_t;

class GameSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A cooperative game with every coalition value memoized.
class Game {
 public:
  static constexpr int kMaxPlayers = 20;

  // Evaluates `f` on all 2^n coalitions. Throws GameSizeError for n outside
  // [1, kMaxPlayers].
  Game(int n, const std::function<double(const PatchSet&)>& f);
  // `values[mask]` is f of the coalition `mask`; size must be 2^n.
  static Game FromTable(int n, std::vector<double> values);

  int n() const { return n_; }
  Coalition All() const { return static_cast<Coalition>((1ULL << n_) - 1); }
  double operator()(Coalition s) const { return values_[s]; }

 private:
  Game(int n, std::vector<double> values);

  int n_;
  std::vector<double> values_;
};

Coalition ToCoalition(const PatchSet& s);
PatchSet ToPatchSet(Coalition s);
int Size(Coalition s);

// Shapley value of `target` in the game whose players are the disjoint
// coalitions `players` (every other patch stays absent).
double ShapleyOverPlayers(const Game& g, std::span<const Coalition> players,
                          std::size_t target);

// phi(i | N).
double ShapleyExact(const Game& g, int i);

// I(i, j | N) = phi({i,j} | N') - phi(i | N \ {j}) - phi(j | N \ {i}).
double InteractionExact(const Game& g, int i, int j);

// f(B) - f(empty).
double ShapleySelfContext(const Game& g, Coalition b);

// phi_sc(union E) - sum of phi_sc over every proper nonempty sub-collection
// of the elements E. Throws std::invalid_argument for fewer than 2 elements.
double InteractionSelfContext(const Game& g,
                              std::span<const Coalition> elements);
// Singleton elements of `b`.
double InteractionSelfContext(const Game& g, Coalition b);

// Shapley value measuring the effect of removing player i.
double ShapleyDeletion(const Game& g, int i);

// Deletion Shapley of block `b` inside `context` (patches outside are
// absent), with b as one player: (f(context) - f(context \ b)) /
// (|context \ b| + 1).
double ShapleyFullContext(const Game& g, Coalition b, Coalition context);
double ShapleyFullContext(const Game& g, Coalition b);

// phi_fc(union E | N) - sum over proper nonempty sub-collections c of
// phi_fc(union c | N \ (union E \ union c)).
double InteractionFullContext(const Game& g,
                              std::span<const Coalition> elements);
double InteractionFullContext(const Game& g, Coalition b);

// Elements for a greedy step: the already identified set (if nonempty) as
// one element followed by each patch of `added` as its own element.
std::vector<Coalition> StepElements(Coalition identified, Coalition added);

// |phi_sc(S u B) - [I_sc(E) + sum of phi_sc over the sub-collections of E]|
// with E = StepElements(S, B). The sum is formed by enumerating
// sub-collections by size, independently of the interaction routine.
double VerifyInsertionDecomposition(const Game& g, Coalition identified,
                                    Coalition added);

// Same for the deletion side with full-context quantities.
double VerifyDeletionDecomposition(const Game& g, Coalition identified,
                                   Coalition added);

// Hand-expanded forms for r = 1 and r = 2, checked against the definitions.
// Arguments are single patches b1, b2 and the identified set s (nonempty for
// the k >= 2 forms).
double VerifyInsertionR1(const Game& g, Coalition s, int b);
double VerifyInsertionR2First(const Game& g, int b1, int b2);
double VerifyInsertionR2(const Game& g, Coalition s, int b1, int b2);
double VerifyDeletionR1First(const Game& g, int b);
double VerifyDeletionR1(const Game& g, Coalition s, int b);
double VerifyDeletionR2First(const Game& g, int b1, int b2);
double VerifyDeletionR2(const Game& g, Coalition s, int b1, int b2);

// Uniform random game on n players (values in [0, 1)) from the shared
// SplitMix64 stream.
Game RandomGame(int n, std::uint64_t seed);

struct IdentityReport {
  int n = 0;
  int trials = 0;
  std::uint64_t checks = 0;
  double max_insertion = 0.0;  // general decomposition, k = 1 and k >= 2
  double max_deletion = 0.0;
  double max_expansion = 0.0;   // r = 1 / r = 2 hand expansions
  double max_efficiency = 0.0;  // |sum phi - (f(N) - f(empty))|

  double MaxResidual() const;
};

// Runs every decomposition identity on `trials` random games of n players.
// With `corrupt`, one identity is deliberately broken (negative control).
IdentityReport RunIdentitySuite(int n, int trials, std::uint64_t seed,
                                bool corrupt = false);

}  // namespace vxcode

#endif  // VXCODE_GAME_ORACLE_H_
