#include "doctest.h"

#include "lamsynth/pool.hpp"
#include "lamsynth/source.hpp"

using namespace lamsynth;

namespace {

Task tiny() {
  Task t;
  t.input_names = {"x"};
  t.input_types = {BaseType::List};
  t.inputs = {{Value::list({2, 5}), Value::list({1})}};
  t.outputs = {Value::integer(0), Value::integer(0)};
  return t;
}

ValueEntry entry(const Executor& ex, const std::string& src) {
  const Term t = parse_term(src, ex.task().input_type_map());
  return {t, ex.key(t), std::nullopt};
}

}  // namespace

TEST_CASE("pool deduplicates by behaviour and keeps the lighter term") {
  const Task task = tiny();
  const Executor ex(task);
  ValuePool pool;
  std::size_t i = 99;
  CHECK(pool.insert(entry(ex, "Sum(Sort(x))"), &i) == ValuePool::Insert::Added);
  CHECK(i == 0);
  CHECK(pool.insert(entry(ex, "Head(x)")) == ValuePool::Insert::Added);
  std::optional<Term> displaced;
  CHECK(pool.insert(entry(ex, "Sum(x)"), &i, &displaced) == ValuePool::Insert::Improved);
  CHECK(i == 0);
  REQUIRE(displaced);
  CHECK(to_source(*displaced) == "Sum(Sort(x))");
  CHECK(to_source(pool[0].term) == "Sum(x)");
  CHECK(pool.insert(entry(ex, "Sum(Reverse(x))"), &i) == ValuePool::Insert::Duplicate);
  CHECK(pool.size() == 2);
  CHECK(pool.find(ex.key(parse_term("Head(x)", task.input_type_map()))) == 1u);
  CHECK_FALSE(pool.find(ex.key(parse_term("Last(x)", task.input_type_map()))).has_value());
}

TEST_CASE("lambdas and values never collide") {
  const Task task = tiny();
  const Executor ex(task);
  ValuePool pool;
  CHECK(pool.insert(entry(ex, "lambda v1: Add(v1, 1)")) == ValuePool::Insert::Added);
  CHECK(pool.insert(entry(ex, "lambda v1: Add(1, v1)")) == ValuePool::Insert::Duplicate);
  CHECK(pool.insert(entry(ex, "lambda v1: IsOdd(v1)")) == ValuePool::Insert::Added);
  CHECK(pool.insert(entry(ex, "lambda v1, v2: Add(v1, v2)")) == ValuePool::Insert::Added);
  const Term add = merge(descriptor(OpId::Add), std::vector<MergeArg>{{Term::token(VarToken::V1), {}},
                                                                     {Term::token(VarToken::V2), {}}});
  const Term padded = merge(descriptor(OpId::Add), std::vector<MergeArg>{{add, {VarToken::V1, VarToken::V2}},
                                                                        {Term::literal(0), {}}});
  CHECK(pool.insert({padded, ex.key(padded), std::nullopt}) == ValuePool::Insert::Duplicate);
}

TEST_CASE("initial terms") {
  const Task task = tiny();
  const auto atoms = initial_terms(task);
  CHECK(atoms.size() == 1 + kLiterals.size() + 4 + 1);
  for (const Term& t : atoms) CHECK(t.weight() == 1);
  CHECK(atoms.back().arity() == 1);
}
