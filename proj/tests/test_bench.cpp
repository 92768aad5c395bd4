#include "doctest.h"

#include <sstream>

#include <json.hpp>

#include "lamsynth/bench.hpp"

using namespace lamsynth;

namespace {

std::vector<Task> tasks() {
  Task sort;
  sort.name = "sort";
  sort.input_names = {"x"};
  sort.input_types = {BaseType::List};
  sort.inputs = {{Value::list({3, 1, 2}), Value::list({5, -4})}};
  sort.outputs = {Value::list({1, 2, 3}), Value::list({-4, 5})};
  sort.solution = "Sort(x)";
  sort.held_out = {{{Value::list({2, 9, 0})}, Value::list({0, 2, 9})}};

  // Reverse fits both examples but not the held-out case.
  Task fooled = sort;
  fooled.name = "fooled";
  fooled.outputs = {Value::list({2, 1, 3}), Value::list({-4, 5})};
  fooled.solution.reset();
  fooled.held_out = {{{Value::list({1, 2, 3})}, Value::list({1, 2, 3})}};

  Task hard = sort;
  hard.name = "hard";
  hard.outputs = {Value::list({1, 1, 1, 1, 1, 1, 1, 1, 1, 2}), Value::list({1, 1, 1, 1, 1, 1, 1, 1, 1, 3})};
  hard.solution.reset();
  hard.held_out.clear();
  return {sort, fooled, hard};
}

BenchConfig config() {
  BenchConfig c;
  c.search.timeout_s = 2;
  c.search.restart_interval_s = 1;
  c.search.max_weight = 4;
  c.trials = 2;
  c.curve_points = 4;
  c.min_bucket = 1;
  return c;
}

}  // namespace

TEST_CASE("weight buckets") {
  using B = std::vector<WeightBucket>;
  auto summary = [](const B& b) {
    std::vector<std::tuple<int, int, std::size_t>> out;
    for (const auto& x : b) out.emplace_back(x.lo, x.hi, x.tasks);
    return out;
  };
  const std::vector<int> w = {3, 3, 4, 5, 5, 5, 6, 7};
  CHECK(summary(weight_buckets(w, 2)) == std::vector<std::tuple<int, int, std::size_t>>{{3, 3, 2}, {4, 5, 4}, {6, 7, 2}});
  CHECK(summary(weight_buckets(w, 3)) == std::vector<std::tuple<int, int, std::size_t>>{{3, 4, 3}, {5, 7, 5}});
  CHECK(summary(weight_buckets(w, 100)) == std::vector<std::tuple<int, int, std::size_t>>{{3, 7, 8}});
  CHECK(weight_buckets({}, 5).empty());
}

TEST_CASE("bench rows, aggregates and false positives") {
  const auto ts = tasks();
  const BenchReport r = run_bench(ts, config());
  REQUIRE(r.rows.size() == 6);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].task == ts[i / 2].name);
    CHECK(r.rows[i].trial == i % 2);
  }
  CHECK(r.rows[0].solved);
  CHECK(r.rows[0].held_out_pass);
  CHECK(r.rows[0].simplified == "Sort(x)");
  CHECK(r.rows[0].task_weight == 2);
  CHECK(r.rows[2].solved);
  CHECK_FALSE(r.rows[2].held_out_pass);
  CHECK_FALSE(r.rows[4].solved);
  CHECK_FALSE(r.rows[4].task_weight.has_value());
  std::size_t solved = 0;
  for (const auto& row : r.rows) solved += row.solved;
  CHECK(r.true_positives + r.false_positives == solved);
  CHECK(r.true_positives == 2);
  CHECK(r.false_positives == 2);
  REQUIRE(r.curve.size() == 5);
  CHECK(r.curve.front().first == 0);
  CHECK(r.curve.back().first == doctest::Approx(2));
  CHECK(r.curve.back().second == doctest::Approx(2.0));
  for (std::size_t i = 1; i < r.curve.size(); ++i) CHECK(r.curve[i - 1].second <= r.curve[i].second);
}

TEST_CASE("parallel workers give the same rows") {
  BenchConfig c = config();
  const BenchReport one = run_bench(tasks(), c);
  c.workers = 3;
  const BenchReport three = run_bench(tasks(), c);
  std::ostringstream a, b;
  write_rows(a, one, false);
  write_rows(b, three, false);
  CHECK(a.str() == b.str());
}

TEST_CASE("report files") {
  BenchConfig c = config();
  c.method = "policy";
  c.search.policy_id = "uniform";
  const BenchReport r = run_bench(tasks(), c);
  std::ostringstream rows, summary, curve;
  write_rows(rows, r, false);
  write_summary(summary, r, false);
  write_curve(curve, r);
  std::istringstream lines(rows.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["time_s"].is_null());
    ++n;
  }
  CHECK(n == 6);
  const auto s = nlohmann::json::parse(summary.str());
  CHECK(s["tasks"] == 3);
  CHECK(s["trials"] == 2);
  CHECK(s["curve"].empty());
  CHECK(curve.str().rfind("time_s,solved\n", 0) == 0);
}

TEST_CASE("bench config errors") {
  BenchConfig c = config();
  c.method = "beam";
  CHECK_THROWS_AS(run_bench(tasks(), c), ConfigError);
  c = config();
  c.trials = 0;
  CHECK_THROWS_AS(run_bench(tasks(), c), ConfigError);
}
