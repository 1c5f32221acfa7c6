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

#include "vxcode/game_oracle.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vxcode/random.h"

namespace vxcode {
namespace {

Game Additive(const std::vector<double>& w) {
  return Game(static_cast<int>(w.size()), [w](const PatchSet& s) {
    double sum = 0.0;
    for (PatchIndex i : s) sum += w[i];
    return sum;
  });
}

// f(empty) = 0, f({0}) = 1, f({1}) = 2, f({0,1}) = 4.
Game SmallGame() { return Game::FromTable(2, {0.0, 1.0, 2.0, 4.0}); }

// Textbook permutation formula, independent of the subset-weight code.
double ShapleyByPermutations(const Game& g, int i) {
  std::vector<int> perm(g.n());
  for (int k = 0; k < g.n(); ++k) perm[k] = k;
  double total = 0.0;
  long count = 0;
  do {
    Coalition before = 0;
    for (int p : perm) {
      if (p == i) break;
      before |= 1u << p;
    }
    total += g(before | (1u << i)) - g(before);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / static_cast<double>(count);
}

TEST(ShapleyTest, AdditiveGameGivesWeights) {
  const std::vector<double> w = {0.1, 0.25, 0.05, 0.4, 0.2};
  const Game g = Additive(w);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ShapleyExact(g, i), w[i], 1e-15);
}

TEST(ShapleyTest, SymmetricSquareGame) {
  const Game g(3, [](const PatchSet& s) {
    return static_cast<double>(s.size() * s.size());
  });
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(ShapleyExact(g, i), 3.0, 1e-14);
}

TEST(ShapleyTest, TwoPlayerExample) {
  EXPECT_DOUBLE_EQ(ShapleyExact(SmallGame(), 0), 1.5);
  EXPECT_DOUBLE_EQ(ShapleyExact(SmallGame(), 1), 2.5);
}

TEST(ShapleyTest, MatchesPermutationFormula) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = RandomGame(6, seed);
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(ShapleyExact(g, i), ShapleyByPermutations(g, i), 1e-13);
    }
  }
}

TEST(ShapleyTest, AxiomsOnRandomGames) {
  SplitMix64 rng(1234);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.Below(8));
    const Game g = RandomGame(n, rng.Next());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += ShapleyExact(g, i);
    EXPECT_NEAR(sum, g(g.All()) - g(0), 1e-12);
  }
}

TEST(ShapleyTest, DummyPlayerGetsZero) {
  const Game base = RandomGame(5, 77);
  // Player 5 never changes the value.
  const Game g(6,
               [&](const PatchSet& s) { return base(ToCoalition(s) & 0x1f); });
  EXPECT_NEAR(ShapleyExact(g, 5), 0.0, 1e-15);
}

TEST(InteractionTest, Examples) {
  EXPECT_DOUBLE_EQ(InteractionExact(SmallGame(), 0, 1), 1.0);
  const Game redundant = Game::FromTable(2, {0.0, 1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(InteractionExact(redundant, 0, 1), -1.0);
  const Game add = Additive({0.3, 0.1, 0.6, 0.2});
  EXPECT_NEAR(InteractionExact(add, 1, 3), 0.0, 1e-15);
}

TEST(SelfContextTest, Examples) {
  const Game g = Game::FromTable(2, {0.1, 0.6, 0.3, 0.9});
  EXPECT_EQ(ShapleySelfContext(g, 0), 0.0);
  EXPECT_DOUBLE_EQ(ShapleySelfContext(g, 0b01), 0.5);
  EXPECT_DOUBLE_EQ(ShapleySelfContext(g, 0b11), 0.9 - 0.1);
}

TEST(SelfContextTest, PairInteraction) {
  const Game g = Game::FromTable(2, {0.0, 0.2, 0.3, 0.9});
  EXPECT_NEAR(InteractionSelfContext(g, 0b11), 0.4, 1e-15);
  const Game add = Additive({0.3, 0.1, 0.6});
  EXPECT_NEAR(InteractionSelfContext(add, 0b101), 0.0, 1e-15);
}

TEST(SelfContextTest, TripleMatchesBruteExpansion) {
  const Game g = RandomGame(5, 3);
  const Coalition b = 0b10110;
  const int p[] = {1, 2, 4};
  auto phi = [&](Coalition c) { return g(c) - g(0); };
  // Proper nonempty subsets of three players.
  double subsets = 0.0;
  for (int i = 0; i < 3; ++i) subsets += phi(1u << p[i]);
  subsets += phi((1u << p[0]) | (1u << p[1]));
  subsets += phi((1u << p[0]) | (1u << p[2]));
  subsets += phi((1u << p[1]) | (1u << p[2]));
  EXPECT_NEAR(InteractionSelfContext(g, b), phi(b) - subsets, 1e-14);
  EXPECT_THROW(InteractionSelfContext(g, 0b100), std::invalid_argument);
}

TEST(DeletionShapleyTest, Examples) {
  EXPECT_DOUBLE_EQ(ShapleyDeletion(SmallGame(), 0), 1.5);
  const Game one = Game::FromTable(1, {0.2, 0.7});
  EXPECT_DOUBLE_EQ(ShapleyDeletion(one, 0), 0.5);
  const std::vector<double> w = {0.1, 0.25, 0.05, 0.4};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ShapleyDeletion(Additive(w), i), w[i], 1e-15);
  }
}

TEST(DeletionShapleyTest, EqualsShapleyOnRandomGames) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Game g = RandomGame(7, seed);
    for (int i = 0; i < 7; ++i) {
      EXPECT_NEAR(ShapleyDeletion(g, i), ShapleyExact(g, i), 1e-13);
    }
  }
}

TEST(FullContextTest, Examples) {
  const Game g = RandomGame(4, 9);
  EXPECT_NEAR(ShapleyFullContext(g, g.All()), g(g.All()) - g(0), 1e-15);
  const std::vector<double> w = {0.1, 0.25, 0.05, 0.4};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ShapleyFullContext(Additive(w), 1u << i), w[i] / 4, 1e-15);
  }
  const Game flat = Game::FromTable(2, {0.0, 0.0, 0.5, 0.5});
  EXPECT_EQ(ShapleyFullContext(flat, 0b01), 0.0);
}

TEST(FullContextTest, InteractionBruteExpansion) {
  const Game add = Additive({0.1, 0.25, 0.05, 0.4});
  // Pair {0, 2} in N = 4 players:
  //   phi_fc({0,2} | N) = (0.1 + 0.05) / 3
  //   phi_fc({0} | N \ {2}) = 0.1 / 3, phi_fc({2} | N \ {0}) = 0.05 / 3.
  EXPECT_NEAR(InteractionFullContext(add, 0b0101), 0.0, 1e-15);
  const Game constant(3, [](const PatchSet&) { return 0.7; });
  EXPECT_EQ(InteractionFullContext(constant, 0b011), 0.0);
}

TEST(FullContextTest, TwoPlayerHandExpansion) {
  // N = {0,1}, B = N:
  //   phi_fc(N | N) = f(N) - f(empty) = 4
  //   phi_fc({0} | {0}) = f({0}) - f(empty) = 1
  //   phi_fc({1} | {1}) = f({1}) - f(empty) = 2
  EXPECT_DOUBLE_EQ(InteractionFullContext(SmallGame(), 0b11), 1.0);
}

TEST(DecompositionTest, SixPlayersTwoIdentifiedPairStep) {
  const Game g = RandomGame(6, 21);
  EXPECT_LT(VerifyInsertionDecomposition(g, 0b000101, 0b011000), 1e-12);
  EXPECT_LT(VerifyDeletionDecomposition(g, 0b000101, 0b011000), 1e-12);
}

TEST(DecompositionTest, AdditiveGameInteraction) {
  const Game add = Additive({0.1, 0.25, 0.05, 0.4, 0.2});
  // Two elements: no interaction.
  const std::vector<Coalition> pair = StepElements(0b00011, 0b00100);
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_NEAR(InteractionSelfContext(add, pair), 0.0, 1e-15);
  // m elements: every element sits in 2^(m-1) - 1 proper sub-collections, so
  // the interaction is -(2^(m-1) - 2) times the total weight.
  const std::vector<Coalition> e = StepElements(0b00011, 0b11100);
  ASSERT_EQ(e.size(), 4u);
  EXPECT_NEAR(InteractionSelfContext(add, e), -6.0 * 1.0, 1e-14);
  EXPECT_LT(VerifyInsertionDecomposition(add, 0b00011, 0b11100), 1e-15);
}

TEST(DecompositionTest, HandExpansions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game g = RandomGame(5, seed);
    EXPECT_LT(VerifyInsertionR1(g, 0b00110, 0), 1e-13);
    EXPECT_LT(VerifyInsertionR2First(g, 1, 3), 1e-13);
    EXPECT_LT(VerifyInsertionR2(g, 0b00100, 0, 4), 1e-13);
    EXPECT_LT(VerifyDeletionR1First(g, 2), 1e-13);
    EXPECT_LT(VerifyDeletionR1(g, 0b00011, 4), 1e-13);
    EXPECT_LT(VerifyDeletionR2First(g, 0, 1), 1e-13);
    EXPECT_LT(VerifyDeletionR2(g, 0b10000, 2, 3), 1e-13);
  }
}

TEST(DecompositionTest, R1ThreeTermForm) {
  // phi_sc(S u {b}) = I_sc({S, b}) + phi_sc(b) + phi_sc(S).
  const Game g = RandomGame(6, 44);
  const Coalition s = 0b000110, b = 0b100000;
  const Coalition elems[] = {s, b};
  EXPECT_NEAR(ShapleySelfContext(g, s | b),
              InteractionSelfContext(g, elems) + ShapleySelfContext(g, b) +
                  ShapleySelfContext(g, s),
              1e-14);
}

TEST(IdentitySuiteTest, SmallRunIsClean) {
  const IdentityReport r = RunIdentitySuite(6, 20, 5);
  EXPECT_GT(r.checks, 0u);
  EXPECT_LT(r.MaxResidual(), 1e-12);
}

TEST(IdentitySuiteTest, CorruptionIsDetected) {
  EXPECT_GT(RunIdentitySuite(4, 3, 5, /*corrupt=*/true).MaxResidual(), 1e-12);
}

TEST(IdentitySuiteTest, SizeBound) {
  EXPECT_THROW(RunIdentitySuite(21, 1, 0), GameSizeError);
  EXPECT_THROW(Game(0, [](const PatchSet&) { return 0.0; }), GameSizeError);
  EXPECT_THROW(Game::FromTable(2, {0.0, 1.0}), std::invalid_argument);
}

}  // namespace
}  // namespace vxcode
