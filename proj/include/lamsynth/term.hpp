#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lamsynth/dsl.hpp"
#include "lamsynth/value.hpp"

namespace lamsynth {

// The four Int-typed variable tokens usable in Merge argument tuples. v-tokens
// become outer lambda parameters; u-tokens refer to the auto-lambda wrapped
// around a function-valued slot.
enum class VarToken : std::uint8_t { V1, V2, U1, U2 };

inline constexpr std::array<VarToken, 4> kAllTokens = {VarToken::V1, VarToken::V2, VarToken::U1,
                                                       VarToken::U2};

constexpr bool is_u(VarToken t) { return t == VarToken::U1 || t == VarToken::U2; }
constexpr bool is_v(VarToken t) { return !is_u(t); }
// 1-based index within its family (v1 -> 1, u2 -> 2).
constexpr int token_index(VarToken t) { return (static_cast<int>(t) % 2) + 1; }
constexpr VarToken v_token(int index) { return index == 1 ? VarToken::V1 : VarToken::V2; }
constexpr VarToken u_token(int index) { return index == 1 ? VarToken::U1 : VarToken::U2; }
std::string_view token_name(VarToken t);
std::optional<VarToken> parse_token(std::string_view name);

// Ordered tuple of at most two variable tokens (lambda arity never exceeds 2).
class VarTuple {
 public:
  static constexpr std::size_t kCapacity = 2;

  VarTuple() = default;
  VarTuple(std::initializer_list<VarToken> tokens);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  VarToken operator[](std::size_t i) const { return items_[i]; }
  void push_back(VarToken t);
  const VarToken* begin() const { return items_.data(); }
  const VarToken* end() const { return items_.data() + size_; }

  bool operator==(const VarTuple& o) const;

 private:
  std::array<VarToken, kCapacity> items_{};
  std::uint8_t size_ = 0;
};

class Term;
struct TermNode;

struct MergeArg;

// Immutable, canonical lambda term represented as a Merge tree. Cheap to copy
// (shared node); equality is structural and hashing is consistent with it.
class Term {
 public:
  enum class Kind : std::uint8_t { Input, Literal, Token, Identity, Merge };

  static Term input(std::string name, BaseType type);
  static Term literal(int value);
  static Term token(VarToken t);
  static Term identity();

  Kind kind() const;
  bool is_atom() const { return kind() != Kind::Merge; }
  bool is_token() const { return kind() == Kind::Token; }

  const std::string& input_name() const;
  int literal_value() const;
  VarToken token_value() const;
  const OpDescriptor& op() const;
  std::span<const MergeArg> args() const;

  int weight() const;
  FunctionType type() const;
  int arity() const { return type().arity; }
  bool is_lambda() const { return arity() > 0; }
  // Free variable tokens: non-empty only for bare VariableToken atoms.
  std::span<const VarToken> free_tokens() const;

  std::size_t hash() const;
  const TermNode* node() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  friend Term make_merge_node(const OpDescriptor&, std::vector<MergeArg>, int);
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

// Slot argument of a Merge node: the child term applied to `vars`.
struct MergeArg {
  Term child;
  VarTuple vars;

  bool operator==(const MergeArg&) const = default;
};

struct TermNode {
  Term::Kind kind;
  FunctionType type;
  int weight = 1;
  std::size_t hash = 0;
  std::string name;  // input name
  int literal = 0;
  VarToken token = VarToken::V1;
  const OpDescriptor* op = nullptr;
  std::vector<MergeArg> args;
  std::array<VarToken, 1> free{};
  std::uint8_t num_free = 0;
};

class ConstructionError : public std::runtime_error {
 public:
  enum class Code {
    ArityMismatch,    // wrong number of slot arguments
    VarCountMismatch, // |vars_k| != arity(child_k)
    TypeMismatch,     // child result type differs from the slot's
    EscapingToken,    // u_j used where the slot binds fewer than j variables
    TokenWithVars,    // bare variable token given a non-empty tuple
  };

  ConstructionError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// The Merge operator: applies `op` to each child applied to its variable tuple,
// wraps slot k in lambda u1..u_lk, binds the remaining v-tokens with outer
// lambdas and renames them by first occurrence. Throws ConstructionError.
Term merge(const OpDescriptor& op, std::span<const MergeArg> args);
// Same as merge but reports rejection through the return value.
std::optional<Term> try_merge(const OpDescriptor& op, std::span<const MergeArg> args,
                              ConstructionError::Code* why = nullptr);

// Validation of one slot argument in isolation (used for argument masking).
std::optional<ConstructionError::Code> check_slot(const FunctionType& slot, const Term& child,
                                                  const VarTuple& vars);

// Recursively re-validates arity/type constraints and canonical naming.
bool typecheck(const Term& t);

// True when some slot is auto-lambda wrapped or some child is applied to
// variables, i.e. the term builds or passes a lambda.
bool uses_lambda(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

}  // namespace lamsynth
