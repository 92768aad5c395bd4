#include "doctest.h"

#include <set>
#include <sstream>

#include "lamsynth/search.hpp"
#include "lamsynth/source.hpp"
#include "naive_enum.hpp"

using namespace lamsynth;

namespace {

Task sort_task() {
  Task t;
  t.name = "sort";
  t.input_names = {"x"};
  t.input_types = {BaseType::List};
  t.inputs = {{Value::list({3, 1, 2}), Value::list({5, -4}), Value::list({0, 9, 7, 7})}};
  t.outputs = {Value::list({1, 2, 3}), Value::list({-4, 5}), Value::list({0, 7, 7, 9})};
  return t;
}

Task impossible_task() {
  Task t = sort_task();
  t.name = "impossible";
  t.outputs = {Value::list({1, 2, 3}), Value::list({1, 2, 3}), Value::list({0, 0, 0, 0, 0, 0, 0, 0, 0, 1})};
  return t;
}

// Random but valid scores, including exact zeros.
class NoisyPolicy final : public Policy {
 public:
  explicit NoisyPolicy(std::uint64_t seed) : rng_(seed) {}
  std::string_view name() const override { return "noisy"; }
  void score(const StepContext&, std::span<const int> valid, std::vector<double>& scores) override {
    std::uniform_real_distribution<double> u(0, 1);
    scores.clear();
    for (std::size_t i = 0; i < valid.size(); ++i) scores.push_back(u(rng_) < 0.2 ? 0.0 : u(rng_));
  }

 private:
  std::mt19937_64 rng_;
};

class BadProposer final : public Policy {
 public:
  std::string_view name() const override { return "bad"; }
  void score(const StepContext&, std::span<const int> valid, std::vector<double>& scores) override {
    scores.assign(valid.size(), 1.0);
  }
  bool proposes() const override { return true; }
  std::vector<std::vector<int>> propose(const OpDescriptor& op, std::size_t) override {
    return {std::vector<int>(static_cast<std::size_t>(op.arity), 100000)};
  }
};

class NegativeScores final : public Policy {
 public:
  std::string_view name() const override { return "negative"; }
  void score(const StepContext&, std::span<const int> valid, std::vector<double>& scores) override {
    scores.assign(valid.size(), -1.0);
  }
};

SearchConfig quick(double timeout = 20) {
  SearchConfig c;
  c.timeout_s = timeout;
  c.restart_interval_s = timeout;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("enumeration order and pool invariants") {
  const Task task = sort_task();
  SearchConfig c = quick();
  c.max_weight = 4;
  c.stop_on_solution = false;
  std::vector<Term> seen;
  std::set<std::string> keys;
  const Executor ex(task);
  const auto result = enumerate(task, c, [&](const ValueEntry& e) {
    seen.push_back(e.term);
    return true;
  });
  CHECK(result.status == SearchStatus::Exhausted);
  const auto atoms = initial_terms(task);
  REQUIRE(seen.size() > atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) CHECK(seen[i] == atoms[i]);
  std::set<std::size_t> hashes;
  std::unordered_map<ExecutionKey, int, ExecutionKeyHash> distinct;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (i) CHECK(seen[i - 1].weight() <= seen[i].weight());
    CHECK(seen[i].weight() <= 4);
    CHECK(typecheck(seen[i]));
    CHECK(distinct.emplace(ex.key(seen[i]), 0).second);
  }
}

TEST_CASE("enumeration finds a minimal solution") {
  const auto r = enumerate(sort_task(), quick());
  REQUIRE(r.status == SearchStatus::Solved);
  CHECK(to_source(*r.solution) == "Sort(x)");
  CHECK(verify(*r.solution, sort_task()));
}

TEST_CASE("enumeration key counts match brute force") {
  for (std::uint64_t seed : {1, 2}) {
    const Task task = naive::random_task(seed);
    CHECK(naive::enumerator_counts(task, 3) == naive::key_counts(task, 3));
  }
}

TEST_CASE("memory budget freezes the pool but keeps checking solutions") {
  Task task = sort_task();
  task.outputs = {Value::list({2, 3}), Value::list({-4}), Value::list({7, 7, 9})};  // Drop(1, Sort(x))
  SearchConfig c = quick();
  c.memory_budget_mb = 0;
  const auto r = enumerate(task, c);
  CHECK(r.stats.pool_frozen);
  CHECK(r.status != SearchStatus::Solved);  // Sort(x) was never stored
  c.memory_budget_mb = 64;
  const auto ok = enumerate(task, c);
  REQUIRE(ok.status == SearchStatus::Solved);
  CHECK(verify(*ok.solution, task));
}

TEST_CASE("uniform policy solves a one-op task") {
  UniformPolicy policy;
  const auto r = restart_loop(sort_task(), policy, quick());
  REQUIRE(r.status == SearchStatus::Solved);
  CHECK(verify(*r.solution, sort_task()));
  CHECK(r.restarts.size() == 1);
  CHECK(r.restarts[0].solved);
}

TEST_CASE("heuristic policy solves a one-op task") {
  HeuristicPolicy policy;
  const auto r = restart_loop(sort_task(), policy, quick());
  REQUIRE(r.status == SearchStatus::Solved);
  CHECK(verify(*r.solution, sort_task()));
}

TEST_CASE("seeded iteration-bounded restarts are reproducible") {
  auto run = [](std::uint64_t seed) {
    SearchConfig c = quick(1000);
    c.seed = seed;
    c.restart_iterations = 2;
    c.max_restarts = 3;
    std::ostringstream out;
    EventLog log(out, false);
    UniformPolicy policy;
    const auto r = restart_loop(impossible_task(), policy, c, &log);
    CHECK(r.status == SearchStatus::Timeout);
    CHECK(r.restarts.size() == 3);
    for (const auto& rr : r.restarts) CHECK(rr.stats.iterations == 2);
    return out.str();
  };
  const std::string a = run(5);
  CHECK(!a.empty());
  CHECK(a == run(5));
  CHECK(a != run(6));
  CHECK(a.find("\"elapsed_ms\":null") != std::string::npos);
}

TEST_CASE("restarts start from fresh pools with fresh seeds") {
  SearchConfig c = quick(1000);
  c.restart_iterations = 1;
  c.max_restarts = 2;
  UniformPolicy policy;
  const auto r = restart_loop(impossible_task(), policy, c);
  REQUIRE(r.restarts.size() == 2);
  CHECK(r.restarts[0].seed != r.restarts[1].seed);
  CHECK(r.restarts[0].seed == restart_seed(c.seed, 0));
  const auto single = policy_search(impossible_task(), policy, c, 1000, restart_seed(c.seed, 1));
  CHECK(single.stats.pool_size == r.restarts[1].stats.pool_size);
  CHECK(single.stats.candidates == r.restarts[1].stats.candidates);
}

TEST_CASE("masks never produce invalid merges") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    NoisyPolicy policy(seed);
    SearchConfig c = quick(1000);
    c.restart_iterations = 3;
    const auto r = policy_search(impossible_task(), policy, c, 1000, seed);
    CHECK(r.stats.candidates > 0);
    CHECK(r.stats.errors == 0);
  }
}

TEST_CASE("policy contract violations are reported") {
  BadProposer bad;
  const auto r = restart_loop(impossible_task(), bad, quick());
  CHECK(r.status == SearchStatus::PolicyFailure);
  CHECK(r.message.find("masks") != std::string::npos);
  NegativeScores neg;
  CHECK(restart_loop(impossible_task(), neg, quick()).status == SearchStatus::PolicyFailure);
}

TEST_CASE("heuristic prefers values that look like the output") {
  const Task task = sort_task();
  const Executor ex(task);
  ValuePool pool;
  auto add = [&](const std::string& src) {
    const Term t = parse_term(src, task.input_type_map());
    ValueEntry e{t, ex.key(t), std::nullopt};
    e.signature = value_signature(e.key.values, task);
    std::size_t i = 0;
    pool.insert(std::move(e), &i);
    return i;
  };
  const std::size_t exact = add("Sort(x)");
  const std::size_t reversed = add("Reverse(x)");
  const std::size_t number = add("Sum(x)");
  HeuristicPolicy h;
  h.begin(task, io_signature(task));
  const std::vector<std::size_t> all = {exact, reversed, number};
  h.observe(pool, all);
  CHECK(h.log_score(exact) > h.log_score(reversed));
  CHECK(h.log_score(reversed) > h.log_score(number));

  const std::vector<int> valid = {0, 1, 2};
  std::vector<double> scores;
  StepContext ctx;
  ctx.op = &descriptor(OpId::Reverse);
  h.score(ctx, valid, scores);
  CHECK(std::max_element(scores.begin(), scores.end()) - scores.begin() == static_cast<long>(exact));
  double total = 0;
  for (double s : scores) total += s;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("verification and held-out checks") {
  Task task = sort_task();
  const auto types = task.input_type_map();
  CHECK(verify(parse_term("Sort(x)", types), task));
  CHECK_FALSE(verify(parse_term("Reverse(x)", types), task));
  CHECK_FALSE(verify(parse_term("lambda v1: Add(v1, 1)", types), task));
  CHECK(check_held_out(parse_term("Reverse(x)", types), task));  // no held-out cases
  task.held_out = {{{Value::list({1, 3, 2})}, Value::list({1, 2, 3})}};
  CHECK(check_held_out(parse_term("Sort(x)", types), task));
  CHECK_FALSE(check_held_out(parse_term("Reverse(x)", types), task));
}

TEST_CASE("config validation") {
  SearchConfig c;
  c.restart_interval_s = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.timeout_s = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.samples_per_op = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
