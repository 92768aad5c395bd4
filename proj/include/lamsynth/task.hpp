#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lamsynth/source.hpp"
#include "lamsynth/value.hpp"

namespace lamsynth {

struct HeldOutCase {
  std::vector<Value> inputs;  // aligned with Task::input_names
  Value output;
};

// A PBE task. inputs[i][e] is the value of input i in example e.
struct Task {
  std::string name;
  std::vector<std::string> input_names;
  std::vector<BaseType> input_types;
  std::vector<std::vector<Value>> inputs;
  std::vector<Value> outputs;
  std::optional<std::string> solution;
  std::vector<HeldOutCase> held_out;

  std::size_t num_examples() const { return outputs.size(); }
  std::size_t num_inputs() const { return input_names.size(); }
  std::optional<std::size_t> input_index(std::string_view name) const;
  InputTypes input_type_map() const;
  // The task restricted to its held-out cases as examples.
  Task held_out_task() const;
};

class TaskFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks names, types, example counts and the DSL value ranges.
void validate(const Task& task);

std::string task_to_json(const Task& task);
Task task_from_json(std::string_view text);
Task load_task(const std::filesystem::path& path);
void save_task(const Task& task, const std::filesystem::path& path);
// A single file, or every *.json file of a directory in name order.
std::vector<Task> load_tasks(const std::filesystem::path& path);

}  // namespace lamsynth
