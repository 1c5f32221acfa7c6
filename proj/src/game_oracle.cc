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

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "vxcode/random.h"

namespace vxcode {

namespace {

void CheckSize(int n) {
  if (n < 1 || n > Game::kMaxPlayers) {
    throw GameSizeError("game: player count " + std::to_string(n) +
                        " outside [1, " + std::to_string(Game::kMaxPlayers) +
                        "]");
  }
}

// Neumaier-compensated running sum.
class KahanSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Coalition UnionOf(std::span<const Coalition> elements, std::uint32_t pick) {
  Coalition u = 0;
  while (pick) {
    u |= elements[static_cast<std::size_t>(std::countr_zero(pick))];
    pick &= pick - 1;
  }
  return u;
}

Coalition UnionAll(std::span<const Coalition> elements) {
  Coalition u = 0;
  for (Coalition e : elements) u |= e;
  return u;
}

void CheckElements(std::span<const Coalition> elements) {
  if (elements.size() < 2) {
    throw std::invalid_argument("interaction needs at least two elements");
  }
  if (elements.size() > static_cast<std::size_t>(Game::kMaxPlayers)) {
    throw GameSizeError("interaction: too many elements");
  }
  Coalition seen = 0;
  for (Coalition e : elements) {
    if (e == 0 || (seen & e) != 0) {
      throw std::invalid_argument(
          "interaction: elements must be disjoint "
          "and nonempty");
    }
    seen |= e;
  }
}

std::vector<Coalition> Singletons(Coalition b) {
  std::vector<Coalition> out;
  while (b) {
    out.push_back(b & (~b + 1));
    b &= b - 1;
  }
  return out;
}

// Visits every size-k subset of {0..m-1} in lexicographic order as a bitmask.
template <typename Visit>
void ForEachCombination(int m, int k, Visit&& visit) {
  if (k < 0 || k > m) return;
  std::vector<int> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (int p : pick) mask |= 1u << p;
    visit(mask);
    int i = k;
    while (i > 0 && pick[static_cast<std::size_t>(i - 1)] == m - k + i - 1) --i;
    if (i == 0) return;
    ++pick[static_cast<std::size_t>(i - 1)];
    for (int j = i; j < k; ++j) {
      pick[static_cast<std::size_t>(j)] =
          pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

// phi_sc(union E) with the sub-collection sum computed size by size.
double SelfContextDecomposition(const Game& g,
                                std::span<const Coalition> elements) {
  const int m = static_cast<int>(elements.size());
  KahanSum sum;
  for (int size = 1; size < m; ++size) {
    ForEachCombination(m, size, [&](std::uint32_t pick) {
      sum.Add(ShapleySelfContext(g, UnionOf(elements, pick)));
    });
  }
  return InteractionSelfContext(g, elements) + sum.Value();
}

double FullContextDecomposition(const Game& g,
                                std::span<const Coalition> elements) {
  const int m = static_cast<int>(elements.size());
  const Coalition all = UnionAll(elements);
  KahanSum sum;
  for (int size = 1; size < m; ++size) {
    ForEachCombination(m, size, [&](std::uint32_t pick) {
      const Coalition c = UnionOf(elements, pick);
      sum.Add(ShapleyFullContext(g, c, g.All() & ~(all & ~c)));
    });
  }
  return InteractionFullContext(g, elements) + sum.Value();
}

}  // namespace

Game::Game(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {}

Game::Game(int n, const std::function<double(const PatchSet&)>& f) : n_(n) {
  CheckSize(n);
  values_.resize(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < values_.size(); ++mask) {
    values_[mask] = f(ToPatchSet(static_cast<Coalition>(mask)));
  }
}

Game Game::FromTable(int n, std::vector<double> values) {
  CheckSize(n);
  if (values.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("game: table must have 2^n entries");
  }
  return Game(n, std::move(values));
}

Coalition ToCoalition(const PatchSet& s) {
  Coalition c = 0;
  for (PatchIndex i : s) {
    if (i >= static_cast<PatchIndex>(Game::kMaxPlayers)) {
      throw GameSizeError("coalition: player index too large");
    }
    c |= Coalition{1} << i;
  }
  return c;
}

PatchSet ToPatchSet(Coalition s) {
  std::vector<PatchIndex> out;
  while (s) {
    out.push_back(static_cast<PatchIndex>(std::countr_zero(s)));
    s &= s - 1;
  }
  return PatchSet(std::move(out));
}

int Size(Coalition s) { return std::popcount(s); }

double ShapleyOverPlayers(const Game& g, std::span<const Coalition> players,
                          std::size_t target) {
  const std::size_t m = players.size();
  if (target >= m) throw std::out_of_range("shapley: target out of range");
  if (m > static_cast<std::size_t>(Game::kMaxPlayers)) {
    throw GameSizeError("shapley: too many players");
  }
  std::vector<Coalition> others;
  others.reserve(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (i != target) others.push_back(players[i]);
  }
  // weight[s] = s! (m - s - 1)! / m! = 1 / (m * C(m - 1, s)).
  std::vector<double> weight(m);
  double binom = 1.0;
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = 1.0 / (static_cast<double>(m) * binom);
    binom = binom * static_cast<double>(m - 1 - s) / static_cast<double>(s + 1);
  }

  const Coalition self = players[target];
  const std::size_t subsets = std::size_t{1} << others.size();
  std::vector<Coalition> unions(subsets, 0);
  KahanSum sum;
  for (std::size_t sub = 0; sub < subsets; ++sub) {
    if (sub) {
      unions[sub] = unions[sub & (sub - 1)] |
                    others[static_cast<std::size_t>(std::countr_zero(sub))];
    }
    const Coalition u = unions[sub];
    sum.Add(weight[static_cast<std::size_t>(std::popcount(sub))] *
            (g(u | self) - g(u)));
  }
  return sum.Value();
}

double ShapleyExact(const Game& g, int i) {
  if (i < 0 || i >= g.n()) throw std::out_of_range("shapley: bad player");
  const std::vector<Coalition> players = Singletons(g.All());
  return ShapleyOverPlayers(g, players, static_cast<std::size_t>(i));
}

double InteractionExact(const Game& g, int i, int j) {
  if (i == j) throw std::invalid_argument("interaction: i == j");
  if (i < 0 || j < 0 || i >= g.n() || j >= g.n()) {
    throw std::out_of_range("interaction: bad player");
  }
  const Coalition bi = Coalition{1} << i;
  const Coalition bj = Coalition{1} << j;

  std::vector<Coalition> merged = Singletons(g.All() & ~(bi | bj));
  merged.push_back(bi | bj);
  const double joint = ShapleyOverPlayers(g, merged, merged.size() - 1);

  auto alone = [&](Coalition self, Coalition absent) {
    std::vector<Coalition> players = Singletons(g.All() & ~(self | absent));
    players.push_back(self);
    return ShapleyOverPlayers(g, players, players.size() - 1);
  };
  return joint - alone(bi, bj) - alone(bj, bi);
}

double ShapleySelfContext(const Game& g, Coalition b) { return g(b) - g(0); }

double InteractionSelfContext(const Game& g,
                              std::span<const Coalition> elements) {
  CheckElements(elements);
  const auto m = static_cast<std::uint32_t>(elements.size());
  const std::uint32_t full = (m == 32) ? ~0u : ((1u << m) - 1);
  KahanSum parts;
  for (std::uint32_t pick = 1; pick < full; ++pick) {
    parts.Add(ShapleySelfContext(g, UnionOf(elements, pick)));
  }
  return ShapleySelfContext(g, UnionAll(elements)) - parts.Value();
}

double InteractionSelfContext(const Game& g, Coalition b) {
  const std::vector<Coalition> e = Singletons(b);
  return InteractionSelfContext(g, e);
}

double ShapleyDeletion(const Game& g, int i) {
  if (i < 0 || i >= g.n()) throw std::out_of_range("shapley: bad player");
  const int n = g.n();
  // P_d(A | N) = (n - |A| - 1)! |A|! / n! = 1 / (n * C(n - 1, |A|)).
  std::vector<double> weight(static_cast<std::size_t>(n));
  double binom = 1.0;
  for (int a = 0; a < n; ++a) {
    weight[static_cast<std::size_t>(a)] = 1.0 / (n * binom);
    binom = binom * (n - 1 - a) / (a + 1);
  }
  const Coalition bit = Coalition{1} << i;
  KahanSum sum;
  for (Coalition s = 0; s <= g.All(); ++s) {
    if (!(s & bit)) continue;
    const Coalition rest = s & ~bit;
    sum.Add(weight[static_cast<std::size_t>(Size(rest))] * (g(s) - g(rest)));
    if (s == g.All()) break;
  }
  return sum.Value();
}

double ShapleyFullContext(const Game& g, Coalition b, Coalition context) {
  if ((b & ~context) != 0) {
    throw std::invalid_argument("full-context shapley: block outside context");
  }
  const Coalition rest = context & ~b;
  return (g(context) - g(rest)) / static_cast<double>(Size(rest) + 1);
}

double ShapleyFullContext(const Game& g, Coalition b) {
  return ShapleyFullContext(g, b, g.All());
}

double InteractionFullContext(const Game& g,
                              std::span<const Coalition> elements) {
  CheckElements(elements);
  const Coalition all = UnionAll(elements);
  const auto m = static_cast<std::uint32_t>(elements.size());
  const std::uint32_t full = (1u << m) - 1;
  KahanSum parts;
  for (std::uint32_t pick = 1; pick < full; ++pick) {
    const Coalition c = UnionOf(elements, pick);
    parts.Add(ShapleyFullContext(g, c, g.All() & ~(all & ~c)));
  }
  return ShapleyFullContext(g, all) - parts.Value();
}

double InteractionFullContext(const Game& g, Coalition b) {
  const std::vector<Coalition> e = Singletons(b);
  return InteractionFullContext(g, e);
}

std::vector<Coalition> StepElements(Coalition identified, Coalition added) {
  if ((identified & added) != 0) {
    throw std::invalid_argument("step elements: sets overlap");
  }
  std::vector<Coalition> out;
  if (identified) out.push_back(identified);
  for (Coalition s : Singletons(added)) out.push_back(s);
  return out;
}

double VerifyInsertionDecomposition(const Game& g, Coalition identified,
                                    Coalition added) {
  const std::vector<Coalition> e = StepElements(identified, added);
  const double direct = g(identified | added) - g(0);
  if (e.size() < 2) return std::fabs(direct - ShapleySelfContext(g, added));
  return std::fabs(direct - SelfContextDecomposition(g, e));
}

double VerifyDeletionDecomposition(const Game& g, Coalition identified,
                                   Coalition added) {
  const std::vector<Coalition> e = StepElements(identified, added);
  const Coalition all = identified | added;
  const Coalition rest = g.All() & ~all;
  const double direct =
      (g(g.All()) - g(rest)) / static_cast<double>(Size(rest) + 1);
  if (e.size() < 2) return std::fabs(direct - ShapleyFullContext(g, all));
  return std::fabs(direct - FullContextDecomposition(g, e));
}

double VerifyInsertionR1(const Game& g, Coalition s, int b) {
  const Coalition bb = Coalition{1} << b;
  const Coalition pair[] = {s, bb};
  const double rhs = InteractionSelfContext(g, pair) +
                     ShapleySelfContext(g, bb) + ShapleySelfContext(g, s);
  return std::fabs(ShapleySelfContext(g, s | bb) - rhs);
}

double VerifyInsertionR2First(const Game& g, int b1, int b2) {
  const Coalition x = Coalition{1} << b1;
  const Coalition y = Coalition{1} << b2;
  const double rhs = InteractionSelfContext(g, x | y) +
                     ShapleySelfContext(g, x) + ShapleySelfContext(g, y);
  return std::fabs(ShapleySelfContext(g, x | y) - rhs);
}

double VerifyInsertionR2(const Game& g, Coalition s, int b1, int b2) {
  const Coalition x = Coalition{1} << b1;
  const Coalition y = Coalition{1} << b2;
  const Coalition triple[] = {s, x, y};
  const double rhs = InteractionSelfContext(g, triple) +
                     ShapleySelfContext(g, s | x) +
                     ShapleySelfContext(g, s | y) +
                     ShapleySelfContext(g, x | y) + ShapleySelfContext(g, x) +
                     ShapleySelfContext(g, y) + ShapleySelfContext(g, s);
  return std::fabs(ShapleySelfContext(g, s | x | y) - rhs);
}

double VerifyDeletionR1First(const Game& g, int b) {
  const Coalition x = Coalition{1} << b;
  const double expected = (g(g.All()) - g(g.All() & ~x)) / g.n();
  return std::fabs(ShapleyFullContext(g, x) - expected);
}

double VerifyDeletionR1(const Game& g, Coalition s, int b) {
  const Coalition x = Coalition{1} << b;
  const Coalition n = g.All();
  const Coalition pair[] = {s, x};
  const double rhs = InteractionFullContext(g, pair) +
                     ShapleyFullContext(g, x, n & ~s) +
                     ShapleyFullContext(g, s, n & ~x);
  return std::fabs(ShapleyFullContext(g, s | x) - rhs);
}

double VerifyDeletionR2First(const Game& g, int b1, int b2) {
  const Coalition x = Coalition{1} << b1;
  const Coalition y = Coalition{1} << b2;
  const Coalition n = g.All();
  const double rhs = InteractionFullContext(g, x | y) +
                     ShapleyFullContext(g, x, n & ~y) +
                     ShapleyFullContext(g, y, n & ~x);
  return std::fabs(ShapleyFullContext(g, x | y) - rhs);
}

double VerifyDeletionR2(const Game& g, Coalition s, int b1, int b2) {
  const Coalition x = Coalition{1} << b1;
  const Coalition y = Coalition{1} << b2;
  const Coalition n = g.All();
  const Coalition triple[] = {s, x, y};
  const double rhs = InteractionFullContext(g, triple) +
                     ShapleyFullContext(g, x | y, n & ~s) +
                     ShapleyFullContext(g, s | x, n & ~y) +
                     ShapleyFullContext(g, s | y, n & ~x) +
                     ShapleyFullContext(g, x, n & ~(s | y)) +
                     ShapleyFullContext(g, y, n & ~(s | x)) +
                     ShapleyFullContext(g, s, n & ~(x | y));
  return std::fabs(ShapleyFullContext(g, s | x | y) - rhs);
}

Game RandomGame(int n, std::uint64_t seed) {
  CheckSize(n);
  SplitMix64 rng(seed);
  std::vector<double> values(std::size_t{1} << n);
  for (double& v : values) v = rng.Uniform();
  return Game::FromTable(n, std::move(values));
}

double IdentityReport::MaxResidual() const {
  return std::max({max_insertion, max_deletion, max_expansion});
}

namespace {

// Random subset of `pool` with exactly k members.
Coalition RandomSubset(SplitMix64& rng, Coalition pool, int k) {
  std::vector<Coalition> bits = Singletons(pool);
  rng.Shuffle(bits);
  Coalition out = 0;
  for (int i = 0; i < k && i < static_cast<int>(bits.size()); ++i) {
    out |= bits[static_cast<std::size_t>(i)];
  }
  return out;
}

int LowestPlayer(Coalition c) { return std::countr_zero(c); }

// Largest step size exercised by the suite; larger r only repeats the same
// code paths at exponential cost.
constexpr int kMaxSuiteR = 8;

}  // namespace

IdentityReport RunIdentitySuite(int n, int trials, std::uint64_t seed,
                                bool corrupt) {
  CheckSize(n);
  if (trials < 0) throw std::invalid_argument("identity suite: trials < 0");
  IdentityReport report;
  report.n = n;
  report.trials = trials;
  SplitMix64 master(seed);

  auto record = [&report](double& slot, double residual) {
    slot = std::max(slot, residual);
    ++report.checks;
  };

  for (int t = 0; t < trials; ++t) {
    const Game g = RandomGame(n, master.Next());
    SplitMix64 rng(master.Next());
    const Coalition all = g.All();

    for (int r = 1; r <= std::min(n, kMaxSuiteR); ++r) {
      const Coalition added = RandomSubset(rng, all, r);
      record(report.max_insertion, VerifyInsertionDecomposition(g, 0, added));
      record(report.max_deletion, VerifyDeletionDecomposition(g, 0, added));
      if (r < n) {
        const int s_size =
            1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - r)));
        const Coalition identified = RandomSubset(rng, all & ~added, s_size);
        record(report.max_insertion,
               VerifyInsertionDecomposition(g, identified, added));
        record(report.max_deletion,
               VerifyDeletionDecomposition(g, identified, added));
      }
    }

    const Coalition order = RandomSubset(rng, all, std::min(n, 3));
    const std::vector<Coalition> picks = Singletons(order);
    const int b1 = LowestPlayer(picks[0]);
    record(report.max_expansion, VerifyDeletionR1First(g, b1));
    if (n >= 2) {
      const int b2 = LowestPlayer(picks[1]);
      const Coalition rest = all & ~(picks[0]);
      const Coalition s1 = RandomSubset(
          rng, rest,
          1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - 1))));
      record(report.max_expansion, VerifyInsertionR1(g, s1, b1));
      record(report.max_expansion, VerifyDeletionR1(g, s1, b1));
      record(report.max_expansion, VerifyInsertionR2First(g, b1, b2));
      record(report.max_expansion, VerifyDeletionR2First(g, b1, b2));
      if (n >= 3) {
        const Coalition rest2 = all & ~(picks[0] | picks[1]);
        const Coalition s2 = RandomSubset(
            rng, rest2,
            1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - 2))));
        record(report.max_expansion, VerifyInsertionR2(g, s2, b1, b2));
        record(report.max_expansion, VerifyDeletionR2(g, s2, b1, b2));
      }
    }

    if (corrupt) {
      // Compare the decomposition of a perturbed game against the direct
      // value of the original one.
      std::vector<double> values(std::size_t{1} << n);
      for (Coalition c = 0; c <= all; ++c) {
        values[c] = g(c);
        if (c == all) break;
      }
      values[all] += 1e-9;
      const Game bent = Game::FromTable(n, std::move(values));
      const std::vector<Coalition> e = Singletons(all);
      const double lhs = g(all) - g(0);
      const double rhs = e.size() < 2 ? bent(all) - bent(0)
                                      : SelfContextDecomposition(bent, e);
      record(report.max_insertion, std::fabs(lhs - rhs));
    }
  }
  return report;
}

}  // namespace vxcode
