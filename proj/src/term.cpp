#include "lamsynth/term.hpp"

#include <functional>

namespace lamsynth {
namespace {

std::size_t mix(std::size_t h, std::size_t x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::shared_ptr<TermNode> new_atom(Term::Kind kind, FunctionType type) {
  auto node = std::make_shared<TermNode>();
  node->kind = kind;
  node->type = type;
  node->weight = 1;
  return node;
}

}  // namespace

std::string_view token_name(VarToken t) {
  switch (t) {
    case VarToken::V1:
      return "v1";
    case VarToken::V2:
      return "v2";
    case VarToken::U1:
      return "u1";
    case VarToken::U2:
      return "u2";
  }
  return "?";
}

std::optional<VarToken> parse_token(std::string_view name) {
  for (VarToken t : kAllTokens)
    if (token_name(t) == name) return t;
  return std::nullopt;
}

VarTuple::VarTuple(std::initializer_list<VarToken> tokens) {
  for (VarToken t : tokens) push_back(t);
}

void VarTuple::push_back(VarToken t) {
  if (size_ >= kCapacity) throw std::length_error("variable tuple holds at most two tokens");
  items_[size_++] = t;
}

bool VarTuple::operator==(const VarTuple& o) const {
  if (size_ != o.size_) return false;
  for (std::size_t i = 0; i < size_; ++i)
    if (items_[i] != o.items_[i]) return false;
  return true;
}

Term Term::input(std::string name, BaseType type) {
  auto node = new_atom(Kind::Input, {0, type});
  node->hash = mix(std::hash<std::string>{}(name), 0x11);
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::literal(int value) {
  if (!is_literal(value)) throw std::invalid_argument("not a DSL literal: " + std::to_string(value));
  auto node = new_atom(Kind::Literal, {0, BaseType::Int});
  node->literal = value;
  node->hash = mix(static_cast<std::size_t>(value + 1000), 0x22);
  return Term(std::move(node));
}

Term Term::token(VarToken t) {
  auto node = new_atom(Kind::Token, {0, BaseType::Int});
  node->token = t;
  node->free[0] = t;
  node->num_free = 1;
  node->hash = mix(static_cast<std::size_t>(t), 0x33);
  return Term(std::move(node));
}

Term Term::identity() {
  static const Term id = [] {
    auto node = new_atom(Kind::Identity, {1, BaseType::Int});
    node->hash = 0x44;
    return Term(std::move(node));
  }();
  return id;
}

Term::Kind Term::kind() const { return node_->kind; }
const std::string& Term::input_name() const { return node_->name; }
int Term::literal_value() const { return node_->literal; }
VarToken Term::token_value() const { return node_->token; }
const OpDescriptor& Term::op() const { return *node_->op; }
std::span<const MergeArg> Term::args() const { return node_->args; }
int Term::weight() const { return node_->weight; }
FunctionType Term::type() const { return node_->type; }
std::size_t Term::hash() const { return node_->hash; }

std::span<const VarToken> Term::free_tokens() const {
  return {node_->free.data(), node_->num_free};
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const TermNode& x = *a.node_;
  const TermNode& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.weight != y.weight || x.type != y.type) return false;
  switch (x.kind) {
    case Term::Kind::Input:
      return x.name == y.name;
    case Term::Kind::Literal:
      return x.literal == y.literal;
    case Term::Kind::Token:
      return x.token == y.token;
    case Term::Kind::Identity:
      return true;
    case Term::Kind::Merge:
      return x.op == y.op && x.args == y.args;
  }
  return false;
}

std::optional<ConstructionError::Code> check_slot(const FunctionType& slot, const Term& child,
                                                  const VarTuple& vars) {
  using Code = ConstructionError::Code;
  if (child.is_token()) {
    if (!vars.empty()) return Code::TokenWithVars;
    if (slot.result != BaseType::Int) return Code::TypeMismatch;
    const VarToken t = child.token_value();
    if (is_u(t) && token_index(t) > slot.arity) return Code::EscapingToken;
    return std::nullopt;
  }
  if (static_cast<int>(vars.size()) != child.arity()) return Code::VarCountMismatch;
  if (child.type().result != slot.result) return Code::TypeMismatch;
  for (VarToken t : vars)
    if (is_u(t) && token_index(t) > slot.arity) return Code::EscapingToken;
  return std::nullopt;
}

Term make_merge_node(const OpDescriptor& op, std::vector<MergeArg> args, int arity) {
  auto node = std::make_shared<TermNode>();
  node->kind = Term::Kind::Merge;
  node->op = &op;
  node->type = {arity, op.result};
  int weight = 1;
  std::size_t h = mix(0x55, static_cast<std::size_t>(op.id));
  for (const MergeArg& a : args) {
    weight += a.child.weight() + static_cast<int>(a.vars.size());
    h = mix(h, a.child.hash());
    h = mix(h, 0x66 + a.vars.size());
    for (VarToken t : a.vars) h = mix(h, static_cast<std::size_t>(t));
  }
  node->weight = weight;
  node->hash = h;
  node->args = std::move(args);
  return Term(std::move(node));
}

std::optional<Term> try_merge(const OpDescriptor& op, std::span<const MergeArg> args,
                              ConstructionError::Code* why) {
  auto fail = [why](ConstructionError::Code c) -> std::optional<Term> {
    if (why) *why = c;
    return std::nullopt;
  };
  if (args.size() != static_cast<std::size_t>(op.arity)) return fail(ConstructionError::Code::ArityMismatch);
  for (std::size_t k = 0; k < args.size(); ++k)
    if (auto e = check_slot(op.slots[k], args[k].child, args[k].vars)) return fail(*e);

  // Rename v-tokens by first occurrence in left-to-right slot order. Canonical
  // children use all of their parameters in order, so this equals the first
  // occurrence order in the expanded body.
  std::array<int, 3> rename = {0, 0, 0};
  int next = 1;
  auto see = [&](VarToken t) {
    if (is_v(t) && rename[static_cast<std::size_t>(token_index(t))] == 0)
      rename[static_cast<std::size_t>(token_index(t))] = next++;
  };
  for (const MergeArg& a : args) {
    if (a.child.is_token()) see(a.child.token_value());
    for (VarToken t : a.vars) see(t);
  }
  auto renamed = [&](VarToken t) {
    return is_v(t) ? v_token(rename[static_cast<std::size_t>(token_index(t))]) : t;
  };
  const bool identity_map = rename[1] <= 1 && rename[2] != 1;

  std::vector<MergeArg> out;
  out.reserve(args.size());
  for (const MergeArg& a : args) {
    if (identity_map) {
      out.push_back(a);
      continue;
    }
    MergeArg b{a.child, {}};
    if (a.child.is_token() && is_v(a.child.token_value())) {
      b.child = Term::token(renamed(a.child.token_value()));
    }
    for (VarToken t : a.vars) b.vars.push_back(renamed(t));
    out.push_back(std::move(b));
  }
  return make_merge_node(op, std::move(out), next - 1);
}

Term merge(const OpDescriptor& op, std::span<const MergeArg> args) {
  ConstructionError::Code why{};
  if (auto t = try_merge(op, args, &why)) return *t;
  std::string msg = "merge rejected for " + std::string(op.name) + ": ";
  switch (why) {
    case ConstructionError::Code::ArityMismatch:
      msg += "expected " + std::to_string(op.arity) + " arguments, got " + std::to_string(args.size());
      break;
    case ConstructionError::Code::VarCountMismatch:
      msg += "variable tuple length differs from argument arity";
      break;
    case ConstructionError::Code::TypeMismatch:
      msg += "argument type does not match slot type";
      break;
    case ConstructionError::Code::EscapingToken:
      msg += "u-token not bound by the slot's lambda";
      break;
    case ConstructionError::Code::TokenWithVars:
      msg += "bare variable token takes an empty tuple";
      break;
  }
  throw ConstructionError(why, msg);
}

bool typecheck(const Term& t) {
  if (t.kind() != Term::Kind::Merge) return true;
  const OpDescriptor& op = t.op();
  if (t.args().size() != static_cast<std::size_t>(op.arity)) return false;
  int next = 1;
  std::array<bool, 3> seen = {false, false, false};
  int weight = 1;
  for (std::size_t k = 0; k < t.args().size(); ++k) {
    const MergeArg& a = t.args()[k];
    if (check_slot(op.slots[k], a.child, a.vars)) return false;
    if (!typecheck(a.child)) return false;
    weight += a.child.weight() + static_cast<int>(a.vars.size());
    auto see = [&](VarToken tok) {
      if (!is_v(tok)) return true;
      const auto i = static_cast<std::size_t>(token_index(tok));
      if (seen[i]) return true;
      if (token_index(tok) != next) return false;  // non-canonical order
      seen[i] = true;
      ++next;
      return true;
    };
    if (a.child.is_token() && !see(a.child.token_value())) return false;
    for (VarToken tok : a.vars)
      if (!see(tok)) return false;
  }
  return t.arity() == next - 1 && t.weight() == weight && t.type().result == op.result;
}

bool uses_lambda(const Term& t) {
  if (t.kind() == Term::Kind::Identity) return true;
  if (t.kind() != Term::Kind::Merge) return false;
  if (t.arity() > 0) return true;
  for (std::size_t k = 0; k < t.args().size(); ++k) {
    const MergeArg& a = t.args()[k];
    if (t.op().slot_arity(static_cast<int>(k)) > 0 || !a.vars.empty()) return true;
    if (uses_lambda(a.child)) return true;
  }
  return false;
}

}  // namespace lamsynth
