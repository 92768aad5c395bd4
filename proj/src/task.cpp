#include "lamsynth/task.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lamsynth {
namespace {

using json = nlohmann::ordered_json;

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return v.as_int();
    case Value::Kind::Bool:
      return v.as_bool();
    case Value::Kind::List: {
      json arr = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) arr.push_back(v.at(i));
      return arr;
    }
    case Value::Kind::Err:
      break;
  }
  return nullptr;
}

Value value_from_json(const json& j, const std::string& where) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) {
    const Value v = Value::integer(j.get<std::int64_t>());
    if (v.is_err()) throw TaskFormatError(where + ": integer outside the DSL range");
    return v;
  }
  if (j.is_array()) {
    std::vector<std::int64_t> items;
    for (const json& e : j) {
      if (!e.is_number_integer()) throw TaskFormatError(where + ": lists hold integers only");
      items.push_back(e.get<std::int64_t>());
    }
    const Value v = Value::list(items);
    if (v.is_err()) throw TaskFormatError(where + ": list too long or element out of range");
    return v;
  }
  throw TaskFormatError(where + ": expected an integer, boolean or list");
}

BaseType base_type_of(const Value& v) {
  if (v.is_bool()) return BaseType::Bool;
  if (v.is_list()) return BaseType::List;
  return BaseType::Int;
}

}  // namespace

std::optional<std::size_t> Task::input_index(std::string_view n) const {
  for (std::size_t i = 0; i < input_names.size(); ++i)
    if (input_names[i] == n) return i;
  return std::nullopt;
}

InputTypes Task::input_type_map() const {
  InputTypes m;
  for (std::size_t i = 0; i < input_names.size(); ++i) m.emplace(input_names[i], input_types[i]);
  return m;
}

Task Task::held_out_task() const {
  Task t;
  t.name = name + "#held_out";
  t.input_names = input_names;
  t.input_types = input_types;
  t.inputs.assign(input_names.size(), {});
  for (const HeldOutCase& c : held_out) {
    for (std::size_t i = 0; i < c.inputs.size(); ++i) t.inputs[i].push_back(c.inputs[i]);
    t.outputs.push_back(c.output);
  }
  t.solution = solution;
  return t;
}

void validate(const Task& task) {
  if (task.input_names.empty() || task.input_names.size() > 3)
    throw TaskFormatError("a task has between 1 and 3 inputs");
  if (task.input_types.size() != task.input_names.size() || task.inputs.size() != task.input_names.size())
    throw TaskFormatError("inconsistent input tables");
  if (task.outputs.empty()) throw TaskFormatError("a task needs at least one example");
  for (std::size_t i = 0; i < task.input_names.size(); ++i) {
    const std::string& n = task.input_names[i];
    if (n.empty() || parse_token(n) || find_op(n) || n == "lambda" ||
        !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_') ||
        !std::all_of(n.begin(), n.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
      throw TaskFormatError("invalid input name '" + n + "'");
    if (task.inputs[i].size() != task.outputs.size())
      throw TaskFormatError("input '" + n + "' has the wrong number of examples");
    for (const Value& v : task.inputs[i])
      if (v.is_err() || !v.has_type(task.input_types[i]))
        throw TaskFormatError("input '" + n + "' mixes value types");
  }
  for (std::size_t a = 0; a < task.input_names.size(); ++a)
    for (std::size_t b = a + 1; b < task.input_names.size(); ++b)
      if (task.input_names[a] == task.input_names[b]) throw TaskFormatError("duplicate input name");
  for (const Value& o : task.outputs)
    if (o.is_err()) throw TaskFormatError("invalid output value");
  for (const HeldOutCase& c : task.held_out) {
    if (c.inputs.size() != task.input_names.size()) throw TaskFormatError("held-out case misses inputs");
    for (std::size_t i = 0; i < c.inputs.size(); ++i)
      if (!c.inputs[i].has_type(task.input_types[i])) throw TaskFormatError("held-out input has the wrong type");
  }
}

std::string task_to_json(const Task& task) {
  json j;
  j["name"] = task.name;
  json in = json::object();
  for (std::size_t i = 0; i < task.input_names.size(); ++i) {
    json col = json::array();
    for (const Value& v : task.inputs[i]) col.push_back(value_to_json(v));
    in[task.input_names[i]] = std::move(col);
  }
  j["inputs_dict"] = std::move(in);
  json out = json::array();
  for (const Value& v : task.outputs) out.push_back(value_to_json(v));
  j["outputs"] = std::move(out);
  if (task.solution) j["solution"] = *task.solution;
  if (!task.held_out.empty()) {
    json ho = json::array();
    for (const HeldOutCase& c : task.held_out) {
      json inputs = json::object();
      for (std::size_t i = 0; i < c.inputs.size(); ++i) inputs[task.input_names[i]] = value_to_json(c.inputs[i]);
      ho.push_back({{"inputs", std::move(inputs)}, {"output", value_to_json(c.output)}});
    }
    j["held_out"] = std::move(ho);
  }
  return j.dump(2) + "\n";
}

Task task_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TaskFormatError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw TaskFormatError("task must be a JSON object");
  Task t;
  t.name = j.value("name", "");
  if (!j.contains("inputs_dict") || !j["inputs_dict"].is_object()) throw TaskFormatError("missing inputs_dict");
  if (!j.contains("outputs") || !j["outputs"].is_array()) throw TaskFormatError("missing outputs");
  for (const auto& [name, col] : j["inputs_dict"].items()) {
    if (!col.is_array()) throw TaskFormatError("inputs_dict['" + name + "'] must be a list of examples");
    t.input_names.push_back(name);
    std::vector<Value> values;
    for (const json& v : col) values.push_back(value_from_json(v, "input " + name));
    t.input_types.push_back(values.empty() ? BaseType::Int : base_type_of(values.front()));
    t.inputs.push_back(std::move(values));
  }
  for (const json& v : j["outputs"]) t.outputs.push_back(value_from_json(v, "output"));
  if (j.contains("solution") && !j["solution"].is_null()) t.solution = j["solution"].get<std::string>();
  if (j.contains("held_out")) {
    for (const json& c : j["held_out"]) {
      HeldOutCase hc;
      for (const std::string& n : t.input_names) {
        if (!c.contains("inputs") || !c["inputs"].contains(n)) throw TaskFormatError("held-out case misses input " + n);
        hc.inputs.push_back(value_from_json(c["inputs"][n], "held-out input " + n));
      }
      hc.output = value_from_json(c.at("output"), "held-out output");
      t.held_out.push_back(std::move(hc));
    }
  }
  validate(t);
  return t;
}

Task load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Task t = task_from_json(ss.str());
  if (t.name.empty()) t.name = path.stem().string();
  return t;
}

void save_task(const Task& task, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << task_to_json(task);
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {load_task(path)};
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Task> tasks;
  for (const auto& f : files) tasks.push_back(load_task(f));
  return tasks;
}

}  // namespace lamsynth
