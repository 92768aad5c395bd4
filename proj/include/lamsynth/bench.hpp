#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lamsynth/policy.hpp"
#include "lamsynth/search.hpp"
#include "lamsynth/task.hpp"

namespace lamsynth {

struct BenchConfig {
  // "enumerate" or "policy".
  std::string method = "enumerate";
  SearchConfig search;
  std::size_t trials = 1;
  std::size_t workers = 1;
  std::size_t curve_points = 60;
  std::size_t min_bucket = 15;
  // Creates one policy per search (method "policy").
  std::function<std::unique_ptr<Policy>()> make_policy;
};

struct BenchRow {
  std::string task;
  std::size_t trial = 0;
  std::optional<int> task_weight;  // weight of the reference solution
  std::string status;
  bool solved = false;
  double time_s = 0;
  std::string solution;
  std::string simplified;
  int weight = 0;
  bool held_out_pass = false;  // meaningful when solved
  std::size_t restarts = 0;
  std::string error;
};

struct WeightBucket {
  int lo = 0;
  int hi = 0;
  std::size_t tasks = 0;
  double success_rate = 0;  // averaged over trials
};

struct BenchReport {
  std::vector<BenchRow> rows;  // task-major, then trial
  std::size_t trials = 0;
  double timeout_s = 0;
  // (time, tasks solved by then, averaged over trials)
  std::vector<std::pair<double, double>> curve;
  std::vector<WeightBucket> buckets;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
};

BenchReport run_bench(const std::vector<Task>& tasks, const BenchConfig& config);

// Aggregates from rows alone.
void aggregate(BenchReport& report, std::size_t curve_points, std::size_t min_bucket);
// Consecutive weights grouped until each group holds at least min_tasks
// tasks; a short tail joins the previous group.
std::vector<WeightBucket> weight_buckets(const std::vector<int>& task_weights, std::size_t min_tasks);

// With timing off, times are written as null so seeded reports compare byte
// for byte.
void write_rows(std::ostream& out, const BenchReport& report, bool timing = true);
void write_summary(std::ostream& out, const BenchReport& report, bool timing = true);
void write_curve(std::ostream& out, const BenchReport& report);

}  // namespace lamsynth
