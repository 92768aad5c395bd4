#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "lamsynth/lambda_term.hpp"
#include "lamsynth/search.hpp"
#include "lamsynth/task.hpp"

using namespace lamsynth;

namespace {

const std::filesystem::path kData = LAMSYNTH_DATA_DIR;

Task bundled(const std::string& file) { return load_task(kData / "tasks" / file); }

}  // namespace

TEST_CASE("bundled tasks load") {
  const auto all = load_tasks(kData / "tasks");
  CHECK(all.size() == 3);
  const Task t = bundled("map_replace.json");
  CHECK(t.name == "map:replace");
  CHECK(t.num_examples() == 3);
  CHECK(t.num_inputs() == 3);
  REQUIRE(t.input_index("f"));
  CHECK(t.inputs[*t.input_index("f")][2] == Value::integer(27));
}

TEST_CASE("json round trip") {
  Task t = bundled("multiply_odds.json");
  t.held_out = {{{Value::list({1, 2, 3})}, Value::list({1, 3})}};
  const Task back = task_from_json(task_to_json(t));
  CHECK(back.name == t.name);
  CHECK(back.input_names == t.input_names);
  CHECK(back.inputs == t.inputs);
  CHECK(back.outputs == t.outputs);
  CHECK(back.solution == t.solution);
  REQUIRE(back.held_out.size() == 1);
  CHECK(back.held_out[0].output == Value::list({1, 3}));
  CHECK(task_to_json(back) == task_to_json(t));
}

TEST_CASE("malformed tasks are rejected") {
  CHECK_THROWS_AS(task_from_json("{"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"x": [1]}})"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"x": [1, 2]}, "outputs": [1]})"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"x": [300]}, "outputs": [1]})"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"Map": [1]}, "outputs": [1]})"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"x": [1, [2]]}, "outputs": [1, 2]})"), TaskFormatError);
  CHECK_THROWS_AS(task_from_json(R"({"inputs_dict": {"x": [[1,2,3,4,5,6,7,8,9,10,11]]}, "outputs": [1]})"),
                  TaskFormatError);
}

TEST_CASE("bundled solutions verify and simplify to themselves") {
  const std::vector<std::pair<std::string, int>> files = {
      {"map_replace.json", 10}, {"multiply_odds.json", 11}, {"weight_9_function_7.json", 9}};
  for (const auto& [file, weight] : files) {
    const Task t = bundled(file);
    REQUIRE(t.solution);
    const Term s = parse_solution(*t.solution, t.input_type_map());
    CHECK(verify(s, t));
    CHECK(s.weight() == weight);
    CHECK(simplify(s) == *t.solution);
  }
}

TEST_CASE("merge-tree form of the replace solution simplifies to the published text") {
  const Task t = bundled("map_replace.json");
  const Term raw =
      parse_solution("Map(lambda u1: (lambda v1: If((lambda v1: Equal(f, v1))(v1), r, v1))(u1), x)", t.input_type_map());
  CHECK(verify(raw, t));
  CHECK(raw.weight() == 10);
  CHECK(simplify(raw) == "Map(lambda u1: If(Equal(f, u1), r, u1), x)");
}

TEST_CASE("held-out view") {
  Task t = bundled("weight_9_function_7.json");
  t.held_out = {{{Value::list({9, -1})}, Value::list({4, 0})}};
  const Task h = t.held_out_task();
  CHECK(h.num_examples() == 1);
  CHECK(h.outputs[0] == Value::list({4, 0}));
  CHECK(h.input_names == t.input_names);
}

TEST_CASE("save and load") {
  const Task t = bundled("map_replace.json");
  const auto path = std::filesystem::temp_directory_path() / "lamsynth_task_roundtrip.json";
  save_task(t, path);
  CHECK(task_to_json(load_task(path)) == task_to_json(t));
  std::filesystem::remove(path);
  CHECK_THROWS(load_task(path));
}
