#include "doctest.h"

#include <vector>

#include "dsl_grid.hpp"
#include "lamsynth/dsl.hpp"

using namespace lamsynth;

namespace {

Value run(OpId id, std::vector<Value> values) {
  std::vector<OpArg> args;
  for (const Value& v : values) args.push_back({&v, nullptr});
  return apply_op(descriptor(id), args);
}

}  // namespace

TEST_CASE("op table shape") {
  CHECK(op_table().size() == kNumOps);
  std::size_t higher = 0;
  for (const auto& op : op_table()) higher += op.higher_order();
  CHECK(higher == 5);
  CHECK(find_op("ZipWith") == OpId::ZipWith);
  CHECK_FALSE(find_op("Zip").has_value());
}

TEST_CASE("python integer semantics") {
  CHECK(run(OpId::IntDivide, {Value::integer(-7), Value::integer(2)}) == Value::integer(-4));
  CHECK(run(OpId::IntDivide, {Value::integer(7), Value::integer(-2)}) == Value::integer(-4));
  CHECK(run(OpId::IntDivide, {Value::integer(7), Value::integer(0)}).is_err());
  CHECK(run(OpId::IsOdd, {Value::integer(-3)}) == Value::boolean(true));
  CHECK(run(OpId::Square, {Value::integer(16)}).is_err());
  CHECK(run(OpId::Add, {Value::integer(255), Value::integer(1)}).is_err());
}

TEST_CASE("python slicing semantics") {
  const Value xs = Value::list({5, 6, 7});
  CHECK(run(OpId::Take, {Value::integer(-1), xs}) == Value::list({5, 6}));
  CHECK(run(OpId::Drop, {Value::integer(-1), xs}) == Value::list({7}));
  CHECK(run(OpId::Take, {Value::integer(9), xs}) == xs);
  CHECK(run(OpId::Access, {Value::integer(-3), xs}) == Value::integer(5));
  CHECK(run(OpId::Access, {Value::integer(3), xs}).is_err());
  CHECK(run(OpId::Head, {Value::list({})}).is_err());
  CHECK(run(OpId::Sum, {Value::list({})}) == Value::integer(0));
}

TEST_CASE("errors propagate as values") {
  CHECK(run(OpId::Add, {Value::err(), Value::integer(1)}).is_err());
  CHECK(run(OpId::Reverse, {Value::err()}).is_err());
}

TEST_CASE("grid agreement with the reference oracle") {
  std::size_t mismatches = 0;
  const std::size_t n = grid::run([&](const grid::Case& c) {
    if (!(c.engine == c.expected)) {
      if (++mismatches <= 10)
        MESSAGE(descriptor(c.op).name << "(" << c.description << "): engine " << c.engine.to_string()
                                      << ", oracle " << c.expected.to_string());
    }
  });
  CHECK(n >= 100000);
  CHECK(mismatches == 0);
}
