#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lamsynth/source.hpp"
#include "lamsynth/term.hpp"

namespace lamsynth {

// Plain lambda-calculus terms over the DSL:
//   T ::= x | v | c | f(T, ..., T) | lambda v1..vn. T
// Bound variables carry process-unique integer ids, so substitution never
// captures. Used for simplification, for parsing hand-written solutions and
// as the independent side of the Merge completeness check.
struct LcNode;
using LcTerm = std::shared_ptr<const LcNode>;

struct LcNode {
  enum class Kind { Input, Const, Var, Prim, Lambda };
  Kind kind = Kind::Const;
  std::string name;        // Input
  BaseType input_type = BaseType::Int;
  int value = 0;           // Const
  int var = 0;             // Var
  const OpDescriptor* op = nullptr;
  std::vector<LcTerm> children;  // Prim arguments, or {body} for Lambda
  std::vector<int> params;       // Lambda

  const LcTerm& body() const { return children.front(); }
};

int fresh_var();
LcTerm lc_input(std::string name, BaseType type);
LcTerm lc_const(int value);
LcTerm lc_var(int id);
LcTerm lc_prim(const OpDescriptor& op, std::vector<LcTerm> args);
LcTerm lc_lambda(std::vector<int> params, LcTerm body);

bool lc_atomic(const LcTerm& t);
// Free variable ids (inputs excluded) in first-occurrence order.
std::vector<int> free_vars(const LcTerm& t);
std::optional<FunctionType> lc_type(const LcTerm& t);
bool has_exact_lambda_vars(const LcTerm& t);
// Membership in the set of terms that Merge can construct: exact lambda
// variables and well typed.
bool in_merge_domain(const LcTerm& t);

// Size measured the way Merge counts it: a slot whose lambda-stripped body r
// is atomic costs 1, otherwise weight(r) + |FreeVars(r)|.
int lc_weight(const LcTerm& t);

// Alpha-invariant serialization.
std::string canonical_key(const LcTerm& t);

// Expands a Merge tree into the lambda calculus, resolving every variable
// rename a_k(i_k) by substitution.
LcTerm expand(const Term& t);

// Python-style rendering. Slot lambdas bind u1, u2, ...; other lambdas bind
// v1, v2, ...; a fresh index is used only when a name would be captured.
std::string print_lambda(const LcTerm& t);
std::string simplify(const Term& t);

// General lambda syntax: operations, literals, inputs, (nested) lambdas and
// application of a parenthesised lambda to variables or atoms, which is
// beta-reduced while parsing.
LcTerm parse_lambda(std::string_view text, const InputTypes& inputs);

// Evaluation of a closed, arity-0 term under one set of input bindings.
struct InputBinding {
  std::string_view name;
  Value value;
};
Value lc_evaluate(const LcTerm& t, std::span<const InputBinding> inputs);

// Replayable Merge construction of a term.
struct TraceStep {
  enum class Kind { Atom, Merge };
  Kind kind = Kind::Atom;
  std::optional<Term> atom;
  const OpDescriptor* op = nullptr;
  std::vector<std::pair<std::size_t, VarTuple>> args;  // (earlier step, vars)
};

struct Trace {
  std::vector<TraceStep> steps;  // the last step builds the result
};

class DecomposeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse of Merge for terms in the Merge domain whose outer binders are in
// first-occurrence order. Atomic slot arguments (including bare variables)
// get the empty tuple; other slot arguments have their slot lambda stripped
// and are abstracted over their free variables.
Trace decompose(const LcTerm& s);
Term replay(const Trace& trace);

// A program in either syntax: Merge-tree source, or plain lambda syntax
// rebuilt through decompose. Throws ParseError.
Term parse_solution(std::string_view text, const InputTypes& inputs);
std::string to_string(const Trace& trace);

}  // namespace lamsynth
