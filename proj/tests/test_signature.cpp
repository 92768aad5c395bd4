#include "doctest.h"

#include <random>
#include <string>

#include "lamsynth/signature.hpp"

using namespace lamsynth;

namespace {

std::size_t slot(SignatureKind kind, const std::string& description) {
  const auto& l = layout(kind);
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] == description) return i;
  FAIL("no slot " << description);
  return 0;
}

TriState at(const Signature& s, const std::string& description) {
  return s[slot(SignatureKind::Object, description)];
}

Task one_example(Value in, Value out) {
  Task t;
  t.input_names = {"x"};
  t.input_types = {in.is_list() ? BaseType::List : BaseType::Int};
  t.inputs = {{std::move(in)}};
  t.outputs = {std::move(out)};
  return t;
}

}  // namespace

TEST_CASE("relevant values of a list") {
  const auto r = relevant(Value::list({3, 1, 2}));
  const std::vector<Value> expected = {Value::list({3, 1, 2}), Value::integer(3), Value::integer(3),
                                       Value::integer(3),      Value::integer(1), Value::integer(2),
                                       Value::integer(6),      Value::integer(3), Value::integer(2)};
  CHECK(r == expected);
  const auto empty = relevant(Value::list({}));
  REQUIRE(empty.size() == 9);
  for (std::size_t i = 1; i < empty.size(); ++i) CHECK(empty[i] == Value::integer(0));
  CHECK(relevant(Value::integer(7)) == std::vector<Value>{Value::integer(7)});
  CHECK(relevant(Value::err()).empty());
}

TEST_CASE("layout lengths") {
  CHECK(signature_length(SignatureKind::Object) == 153);
  CHECK(signature_length(SignatureKind::Comparison) == 168);
  CHECK(signature_length(SignatureKind::IO) == 153 + 3 * (153 + 168));
  CHECK(signature_length(SignatureKind::Value) == 153 + 168);
  CHECK(signature_length(SignatureKind::LambdaValue) == 153 + 3 * 168);
}

TEST_CASE("value signatures never look at inputs") {
  for (SignatureKind k : {SignatureKind::Value, SignatureKind::LambdaValue})
    for (const auto& d : layout(k)) CHECK(d.find("input") == std::string::npos);
}

TEST_CASE("object properties of an int") {
  const Signature s = object_signature(SigObject::of(Value::integer(-3)));
  CHECK(at(s, "type is int") == TriState::True);
  CHECK(at(s, "type is list") == TriState::False);
  CHECK(at(s, "x as int | int: x < 0") == TriState::True);
  CHECK(at(s, "x as int | int: x % 3 == 0") == TriState::True);
  CHECK(at(s, "x as int | int: x even") == TriState::False);
  CHECK(at(s, "x as int | int: |x| < 5") == TriState::True);
  CHECK(at(s, "x as list | list: sorted") == TriState::NA);
  CHECK(at(s, "x as bool | bool: x") == TriState::NA);
}

TEST_CASE("object properties of a list") {
  const Signature s = object_signature(SigObject::of(Value::list({3, 1, 2})));
  CHECK(at(s, "x as list | list: sorted") == TriState::False);
  CHECK(at(s, "x as list | list: all unique") == TriState::True);
  CHECK(at(s, "len(x) | int: x == 2") == TriState::False);
  CHECK(at(s, "sum(x) | int: x even") == TriState::True);
  CHECK(at(s, "last(x) | int: x == 2") == TriState::True);
  CHECK(at(s, "x as int | int: x > 0") == TriState::NA);
}

TEST_CASE("errors and lambdas only fill the type block") {
  for (const SigObject& o : {SigObject::of(Value::err()), SigObject::of_lambda()}) {
    const Signature s = object_signature(o);
    for (std::size_t i = kTypeProperties; i < s.size(); ++i) CHECK(s[i] == TriState::NA);
  }
  CHECK(object_signature(SigObject::of_lambda())[0] == TriState::True);
}

TEST_CASE("comparison properties") {
  const Signature s = comparison_signature(Value::integer(2), Value::integer(10));
  const auto& l = layout(SignatureKind::Comparison);
  REQUIRE(s.size() == l.size());
  CHECK(s[slot(SignatureKind::Comparison, "x as int vs y | int: x is a factor of y")] == TriState::True);
  CHECK(s[slot(SignatureKind::Comparison, "x as int vs y | int: y is a factor of x")] == TriState::False);
  CHECK(s[slot(SignatureKind::Comparison, "x as int vs y | int: |x - y| < 10")] == TriState::True);
  CHECK(s[slot(SignatureKind::Comparison, "x as list vs y | list: x == y")] == TriState::NA);
  const Signature t = comparison_signature(Value::list({1, 2}), Value::list({2, 1, 1}));
  CHECK(t[slot(SignatureKind::Comparison, "x as list vs y | list: x shorter")] == TriState::True);
  CHECK(t[slot(SignatureKind::Comparison, "x as list vs y | list: same element set")] == TriState::True);
  CHECK(t[slot(SignatureKind::Comparison, "x as list vs y | list: lengths differ by at most 1")] == TriState::True);
}

TEST_CASE("reduction") {
  SignatureReducer red(3);
  red.add(std::vector<TriState>{TriState::True, TriState::NA, TriState::False});
  red.add(std::vector<TriState>{TriState::False, TriState::NA, TriState::False});
  const auto r = red.reduce();
  CHECK(r == ReducedSignature{1.0f, 0.5f, 0.0f, 0.5f, 1.0f, 0.0f});
  CHECK(SignatureReducer(2).reduce() == ReducedSignature{0.0f, 0.5f, 0.0f, 0.5f});
}

TEST_CASE("reduced signatures are bounded with the default for inapplicable slots") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> el(-20, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> xs(static_cast<std::size_t>(trial % 6));
    for (auto& x : xs) x = el(rng);
    const Task t = one_example(Value::list(xs), trial % 2 ? Value::integer(el(rng)) : Value::list({}));
    const auto io = io_signature(t);
    REQUIRE(io.size() == 2 * signature_length(SignatureKind::IO));
    const Value result = trial % 3 ? Value::integer(el(rng)) : Value::err();
    const auto v = value_signature(std::span<const Value>(&result, 1), t);
    REQUIRE(v.size() == 2 * signature_length(SignatureKind::Value));
    for (const auto* sig : {&io, &v})
      for (std::size_t i = 0; i < sig->size(); i += 2) {
        CHECK((*sig)[i] >= 0.0f);
        CHECK((*sig)[i] <= 1.0f);
        CHECK((*sig)[i + 1] >= 0.0f);
        CHECK((*sig)[i + 1] <= 1.0f);
        if ((*sig)[i] == 0.0f) CHECK((*sig)[i + 1] == 0.5f);
      }
  }
}

TEST_CASE("io signature marks missing inputs as inapplicable") {
  const Task t = one_example(Value::list({1, 2}), Value::integer(3));
  const auto io = io_signature(t);
  const std::size_t block = 153 + 168;
  for (std::size_t i = 153 + block; i < 153 + 3 * block; ++i) {
    CHECK(io[2 * i] == 0.0f);
    CHECK(io[2 * i + 1] == 0.5f);
  }
}

TEST_CASE("layout hash is stable") {
  CHECK(layout_hash() == "ad82cd8dbdec2834");
  CHECK(layout_manifest().rfind("# property signature layout\nversion 1\n", 0) == 0);
}
