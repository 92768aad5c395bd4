#include "lamsynth/bench.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "lamsynth/lambda_term.hpp"
#include "lamsynth/source.hpp"

namespace lamsynth {
namespace {

std::optional<int> reference_weight(const Task& task) {
  if (!task.solution) return std::nullopt;
  try {
    return parse_solution(*task.solution, task.input_type_map()).weight();
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

BenchRow run_one(const Task& task, std::size_t index, std::size_t trial, const BenchConfig& config) {
  BenchRow row;
  row.task = task.name;
  row.trial = trial;
  row.task_weight = reference_weight(task);
  SearchConfig sc = config.search;
  sc.seed = restart_seed(restart_seed(config.search.seed, index), trial);
  SearchResult r;
  try {
    if (config.method == "enumerate") {
      r = enumerate(task, sc);
    } else {
      std::unique_ptr<Policy> policy = config.make_policy ? config.make_policy() : make_policy(sc.policy_id);
      if (!policy) throw ConfigError("unknown policy '" + sc.policy_id + "'");
      r = restart_loop(task, *policy, sc);
    }
  } catch (const PolicyError& e) {
    r.status = SearchStatus::PolicyFailure;
    r.message = e.what();
  }
  row.status = std::string(to_string(r.status));
  row.error = r.message;
  row.time_s = r.stats.elapsed_s;
  row.restarts = r.restarts.size();
  if (r.status == SearchStatus::Solved && r.solution) {
    row.solved = true;
    row.solution = to_source(*r.solution);
    row.simplified = simplify(*r.solution);
    row.weight = r.solution->weight();
    row.held_out_pass = check_held_out(*r.solution, task);
  }
  return row;
}

}  // namespace

std::vector<WeightBucket> weight_buckets(const std::vector<int>& task_weights, std::size_t min_tasks) {
  std::map<int, std::size_t> counts;
  for (int w : task_weights) ++counts[w];
  std::vector<WeightBucket> out;
  WeightBucket cur;
  bool open = false;
  for (const auto& [w, n] : counts) {
    if (!open) {
      cur = {w, w, 0, 0};
      open = true;
    }
    cur.hi = w;
    cur.tasks += n;
    if (cur.tasks >= min_tasks) {
      out.push_back(cur);
      open = false;
    }
  }
  if (open) {
    if (out.empty()) {
      out.push_back(cur);
    } else {
      out.back().hi = cur.hi;
      out.back().tasks += cur.tasks;
    }
  }
  return out;
}

void aggregate(BenchReport& report, std::size_t curve_points, std::size_t min_bucket) {
  const double trials = static_cast<double>(std::max<std::size_t>(report.trials, 1));
  report.curve.clear();
  for (std::size_t i = 0; i <= curve_points; ++i) {
    const double t = curve_points ? report.timeout_s * static_cast<double>(i) / static_cast<double>(curve_points) : 0;
    std::size_t solved = 0;
    for (const BenchRow& r : report.rows)
      if (r.solved && r.time_s <= t) ++solved;
    report.curve.emplace_back(t, static_cast<double>(solved) / trials);
  }

  // One weight per task (rows repeat a task once per trial).
  std::vector<int> weights;
  std::map<std::string, int> task_weight;
  for (const BenchRow& r : report.rows)
    if (r.task_weight && task_weight.emplace(r.task, *r.task_weight).second) weights.push_back(*r.task_weight);
  report.buckets = weight_buckets(weights, min_bucket);
  for (WeightBucket& b : report.buckets) {
    std::size_t solved = 0;
    for (const BenchRow& r : report.rows)
      if (r.solved && r.task_weight && *r.task_weight >= b.lo && *r.task_weight <= b.hi) ++solved;
    b.success_rate = b.tasks ? static_cast<double>(solved) / (static_cast<double>(b.tasks) * trials) : 0;
  }

  report.true_positives = report.false_positives = 0;
  for (const BenchRow& r : report.rows) {
    if (!r.solved) continue;
    (r.held_out_pass ? report.true_positives : report.false_positives)++;
  }
}

BenchReport run_bench(const std::vector<Task>& tasks, const BenchConfig& config) {
  if (config.method != "enumerate" && config.method != "policy")
    throw ConfigError("unknown method '" + config.method + "'");
  if (config.trials < 1) throw ConfigError("trials must be positive");
  config.search.validate();
  BenchReport report;
  report.trials = config.trials;
  report.timeout_s = config.search.timeout_s;
  const std::size_t jobs = tasks.size() * config.trials;
  report.rows.resize(jobs);

  BenchConfig per_worker = config;
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(jobs, 1));
  per_worker.search.memory_budget_mb = std::max<std::size_t>(config.search.memory_budget_mb / workers, 64);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
      const std::size_t task = j / config.trials;
      report.rows[j] = run_one(tasks[task], task, j % config.trials, per_worker);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  aggregate(report, config.curve_points, config.min_bucket);
  return report;
}

void write_rows(std::ostream& out, const BenchReport& report, bool timing) {
  for (const BenchRow& r : report.rows) {
    nlohmann::ordered_json j;
    j["task"] = r.task;
    j["trial"] = r.trial;
    j["task_weight"] = r.task_weight ? nlohmann::ordered_json(*r.task_weight) : nlohmann::ordered_json(nullptr);
    j["status"] = r.status;
    j["solved"] = r.solved;
    j["time_s"] = timing ? nlohmann::ordered_json(r.time_s) : nlohmann::ordered_json(nullptr);
    j["solution"] = r.solution;
    j["simplified"] = r.simplified;
    j["weight"] = r.weight;
    j["held_out_pass"] = r.held_out_pass;
    j["restarts"] = timing ? nlohmann::ordered_json(r.restarts) : nlohmann::ordered_json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

void write_summary(std::ostream& out, const BenchReport& report, bool timing) {
  nlohmann::ordered_json j;
  std::size_t solved = 0;
  for (const BenchRow& r : report.rows) solved += r.solved;
  j["tasks"] = report.trials ? report.rows.size() / report.trials : 0;
  j["trials"] = report.trials;
  j["timeout_s"] = report.timeout_s;
  j["solved_rows"] = solved;
  j["true_positives"] = report.true_positives;
  j["false_positives"] = report.false_positives;
  nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
  for (const WeightBucket& b : report.buckets)
    buckets.push_back({{"weights", {b.lo, b.hi}}, {"tasks", b.tasks}, {"success_rate", b.success_rate}});
  j["weight_buckets"] = std::move(buckets);
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  if (timing)
    for (const auto& [t, n] : report.curve) curve.push_back({t, n});
  j["curve"] = std::move(curve);
  out << j.dump(2) << '\n';
}

void write_curve(std::ostream& out, const BenchReport& report) {
  out << "time_s,solved\n";
  for (const auto& [t, n] : report.curve) out << t << ',' << n << '\n';
}

}  // namespace lamsynth
