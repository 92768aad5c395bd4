#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lamsynth/task.hpp"

namespace lamsynth {

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t num_tasks = 100;
  // When nonzero, exactly this many tasks per weight in [min_weight, max_weight]
  // and num_tasks is ignored.
  std::size_t per_weight = 0;
  int min_weight = 3;
  int max_weight = 8;
  double lambda_fraction = 0.8;
  std::size_t max_inputs = 3;
  std::size_t min_examples = 2;
  std::size_t max_examples = 5;
  std::size_t min_list_length = 1;
  std::size_t max_list_length = 10;
  int min_element = -10;
  int max_element = 10;
  // Budget of each exhaustive search and how many tasks it may contribute.
  double search_timeout_s = 20;
  std::size_t memory_budget_mb = 1024;
  std::size_t tasks_per_search = 20;
  std::size_t max_searches = 1000;
  std::size_t held_out = 2;

  void validate() const;  // throws ConfigError
};

struct GenReport {
  std::vector<Task> tasks;
  std::size_t searches = 0;
  // Strata that could not be filled within max_searches.
  std::vector<std::string> warnings;
};

// Random inputs, exhaustive enumeration, then sampling of distinct programs
// with a lambda quota. Every task carries its minimal-weight solution.
GenReport generate_tasks(const GenConfig& config);

// Fresh inputs on which the reference solution runs without error, with the
// reference outputs. Throws TaskFormatError when no such inputs are found.
std::vector<HeldOutCase> generate_held_out(const Task& task, std::uint64_t seed, const GenConfig& config = {},
                                           std::size_t count = 2);

// Drops training tasks whose reference solution also solves an eval task.
std::vector<Task> dedup_against_eval(const std::vector<Task>& train, const std::vector<Task>& eval);

// Whether the task's reference solution uses a lambda.
bool solution_uses_lambda(const Task& task);

}  // namespace lamsynth
