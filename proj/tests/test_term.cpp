#include "doctest.h"

#include <algorithm>

#include "lamsynth/lambda_term.hpp"
#include "lamsynth/source.hpp"
#include "lamsynth/term.hpp"

using namespace lamsynth;

namespace {

const OpDescriptor& op(OpId id) { return descriptor(id); }

struct Figure {
  Term t1 = Term::input("x", BaseType::List);
  Term t2 = merge(op(OpId::Square), std::vector<MergeArg>{{Term::token(VarToken::V1), {}}});
  Term t3 = merge(op(OpId::Add),
                  std::vector<MergeArg>{{Term::token(VarToken::V1), {}}, {t2, {VarToken::V2}}});
  Term t4 = merge(op(OpId::Sort), std::vector<MergeArg>{{t1, {}}});
  Term t5 = merge(op(OpId::Map), std::vector<MergeArg>{{t3, {VarToken::V1, VarToken::U1}}, {t4, {}}});
};

}  // namespace

TEST_CASE("figure construction weights") {
  Figure f;
  CHECK(f.t1.weight() == 1);
  CHECK(f.t2.weight() == 2);
  CHECK(f.t3.weight() == 5);
  CHECK(f.t4.weight() == 2);
  CHECK(f.t5.weight() == 10);
  CHECK(f.t5.arity() == 1);
  CHECK(f.t3.arity() == 2);
  CHECK(simplify(f.t5) == "lambda v1: Map(lambda u1: Add(v1, Square(u1)), Sort(x))");
  CHECK(to_source(f.t3) == "lambda v1, v2: Add(v1, (lambda v1: Square(v1))(v2))");
}

TEST_CASE("shared versus separate variables") {
  const Term inc = merge(op(OpId::Add), std::vector<MergeArg>{{Term::token(VarToken::V1), {}}, {Term::literal(1), {}}});
  const Term dec =
      merge(op(OpId::Subtract), std::vector<MergeArg>{{Term::token(VarToken::V1), {}}, {Term::literal(1), {}}});
  const Term shared = merge(op(OpId::Multiply), std::vector<MergeArg>{{inc, {VarToken::V1}}, {dec, {VarToken::V1}}});
  const Term split = merge(op(OpId::Multiply), std::vector<MergeArg>{{inc, {VarToken::V1}}, {dec, {VarToken::V2}}});
  CHECK(simplify(shared) == "lambda v1: Multiply(Add(v1, 1), Subtract(v1, 1))");
  CHECK(simplify(split) == "lambda v1, v2: Multiply(Add(v1, 1), Subtract(v2, 1))");
  CHECK(shared.arity() == 1);
  CHECK(split.arity() == 2);
  // v2 first renames to v1
  const Term swapped = merge(op(OpId::Multiply), std::vector<MergeArg>{{inc, {VarToken::V2}}, {dec, {VarToken::V1}}});
  CHECK(swapped == split);
}

TEST_CASE("merge rejections") {
  const Term x = Term::input("x", BaseType::List);
  const Term sq = merge(op(OpId::Square), std::vector<MergeArg>{{Term::token(VarToken::V1), {}}});
  ConstructionError::Code why{};
  CHECK_FALSE(try_merge(op(OpId::Map), std::vector<MergeArg>{{Term::literal(1), {}}, {x, {}}}, &why) == std::nullopt);
  CHECK_FALSE(try_merge(op(OpId::Add), std::vector<MergeArg>{{x, {}}, {Term::literal(1), {}}}, &why));
  CHECK(why == ConstructionError::Code::TypeMismatch);
  CHECK_FALSE(try_merge(op(OpId::Add), std::vector<MergeArg>{{sq, {}}, {Term::literal(1), {}}}, &why));
  CHECK(why == ConstructionError::Code::VarCountMismatch);
  CHECK_FALSE(try_merge(op(OpId::Add), std::vector<MergeArg>{{sq, {VarToken::U1}}, {Term::literal(1), {}}}, &why));
  CHECK(why == ConstructionError::Code::EscapingToken);
  CHECK_FALSE(try_merge(op(OpId::Map), std::vector<MergeArg>{{Term::token(VarToken::U2), {}}, {x, {}}}, &why));
  CHECK(why == ConstructionError::Code::EscapingToken);
  CHECK_FALSE(try_merge(op(OpId::Square), std::vector<MergeArg>{{Term::token(VarToken::V1), {VarToken::V1}}}, &why));
  CHECK(why == ConstructionError::Code::TokenWithVars);
  CHECK_THROWS_AS(merge(op(OpId::Sort), std::vector<MergeArg>{}), ConstructionError);
}

TEST_CASE("source round trip of the replace solution") {
  const InputTypes in{{"x", BaseType::List}, {"f", BaseType::Int}, {"r", BaseType::Int}};
  const std::string raw = "Map(lambda u1: (lambda v1: If((lambda v1: Equal(f, v1))(v1), r, v1))(u1), x)";
  const Term t = parse_term(raw, in);
  CHECK(t.weight() == 10);
  CHECK(to_source(t) == raw);
  CHECK(simplify(t) == "Map(lambda u1: If(Equal(f, u1), r, u1), x)");
  CHECK(print_lambda(parse_lambda(raw, in)) == "Map(lambda u1: If(Equal(f, u1), r, u1), x)");
  CHECK(typecheck(t));
}

TEST_CASE("parse diagnostics") {
  const InputTypes in{{"x", BaseType::List}};
  CHECK(parse_term("Sort(x)", in).weight() == 2);
  CHECK_THROWS_AS(parse_term("Sort(y)", in), ParseError);
  CHECK_THROWS_AS(parse_term("Sort(x", in), ParseError);
  CHECK_THROWS_AS(parse_term("lambda v1, v2: Add(v2, v1)", in), ParseError);
  CHECK_THROWS_AS(parse_term("Add(5, 1)", in), ParseError);
  try {
    parse_term("Sort(x", in);
  } catch (const ParseError& e) {
    CHECK(e.position() == 6);
  }
}

TEST_CASE("decompose reproduces the figure trace") {
  Figure f;
  const Trace tr = decompose(expand(f.t5));
  // variable tokens are pool atoms, not construction steps
  const auto terms = std::count_if(tr.steps.begin(), tr.steps.end(),
                                   [](const TraceStep& s) { return !(s.atom && s.atom->is_token()); });
  CHECK(terms == 5);
  CHECK(replay(tr) == f.t5);
}
