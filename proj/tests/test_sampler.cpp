#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "lamsynth/sampler.hpp"
#include "toy_models.hpp"

using namespace lamsynth;

namespace {

// Two steps; after token 0 nothing is valid, so prefix {0} is a dead end.
struct WithDeadEnd : SequenceModel {
  bool complete(std::span<const int> prefix) const override { return prefix.size() == 2; }
  void expand(std::span<const int> prefix, std::vector<int>& tokens, std::vector<double>& scores) override {
    if (prefix.size() == 1 && prefix[0] == 0) return;
    for (int t = 0; t < 3; ++t) {
      tokens.push_back(t);
      scores.push_back(1.0 + t);
    }
  }
};

struct ZeroScores : SequenceModel {
  bool complete(std::span<const int> prefix) const override { return prefix.size() == 1; }
  void expand(std::span<const int>, std::vector<int>& tokens, std::vector<double>& scores) override {
    tokens = {4, 5};
    scores = {0.0, 0.0};
  }
};

}  // namespace

TEST_CASE("first draw follows the scores") {
  toy::OneStep m({0.9, 0.1});
  std::mt19937_64 rng(1);
  int zeros = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    SamplerTrie trie;
    const auto s = sample_unique(trie, m, 1, rng);
    REQUIRE(s.size() == 1);
    zeros += s[0][0] == 0;
  }
  CHECK(std::abs(zeros / double(trials) - 0.9) < 0.02);
}

TEST_CASE("asking for more than the space returns every sequence once") {
  toy::OneStep m({0.5, 0.25, 0.25});
  SamplerTrie trie;
  std::mt19937_64 rng(2);
  auto s = sample_unique(trie, m, 10, rng);
  CHECK(s.size() == 3);
  std::sort(s.begin(), s.end());
  CHECK(s == std::vector<std::vector<int>>{{0}, {1}, {2}});
  CHECK(trie.exhausted());
  CHECK(trie.remaining_mass() < 1e-12);
  std::vector<int> out;
  CHECK_FALSE(trie.sample(m, rng, out));
}

TEST_CASE("dead ends are skipped and pruned") {
  WithDeadEnd m;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    SamplerTrie trie;
    const auto s = sample_unique(trie, m, 100, rng);
    CHECK(s.size() == 6);
    std::set<std::vector<int>> distinct(s.begin(), s.end());
    CHECK(distinct.size() == 6);
    for (const auto& q : s) CHECK(q[0] != 0);
  }
}

TEST_CASE("zero scores fall back to uniform") {
  ZeroScores m;
  SamplerTrie trie;
  std::mt19937_64 rng(4);
  CHECK(sample_unique(trie, m, 5, rng).size() == 2);
}

TEST_CASE("ordered pairs follow the without-replacement law") {
  const std::vector<double> p = {0.6, 0.3, 0.1};
  const auto law = toy::without_replacement(p, 2);
  toy::OneStep m(p);
  std::mt19937_64 rng(5);
  std::map<std::vector<int>, double> freq;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    SamplerTrie trie;
    auto s = sample_unique(trie, m, 2, rng);
    freq[{s[0][0], s[1][0]}] += 1.0 / trials;
  }
  double tv = 0;
  for (const auto& [k, q] : law) tv += std::abs(q - freq[k]) / 2;
  CHECK(tv < 0.02);
  CHECK(law.at({1, 0}) == doctest::Approx(0.3 * 0.6 / 0.7));
}

TEST_CASE("model is consulted once per node") {
  WithDeadEnd m;
  SamplerTrie trie;
  std::mt19937_64 rng(6);
  sample_unique(trie, m, 100, rng);
  CHECK(trie.model_calls() == 4);
}
