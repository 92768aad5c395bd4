#include "lamsynth/source.hpp"

#include <algorithm>
#include <vector>

#include "lexer.hpp"

namespace lamsynth {
namespace {

using detail::Lexer;
using detail::Token;

void append_params(std::string& out, std::string_view family, int n) {
  out += "lambda ";
  for (int i = 1; i <= n; ++i) {
    if (i > 1) out += ", ";
    out += family;
    out += std::to_string(i);
  }
  out += ": ";
}

void print(const Term& t, std::string& out);

void print_body(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Input:
      out += t.input_name();
      return;
    case Term::Kind::Literal:
      out += std::to_string(t.literal_value());
      return;
    case Term::Kind::Token:
      out += token_name(t.token_value());
      return;
    case Term::Kind::Identity:
      out += "v1";
      return;
    case Term::Kind::Merge:
      break;
  }
  out += t.op().name;
  out += '(';
  for (std::size_t k = 0; k < t.args().size(); ++k) {
    const MergeArg& a = t.args()[k];
    if (k) out += ", ";
    const int l = t.op().slot_arity(static_cast<int>(k));
    if (l > 0) append_params(out, "u", l);
    if (a.vars.empty()) {
      print_body(a.child, out);
      continue;
    }
    out += '(';
    print(a.child, out);
    out += ")(";
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
      if (i) out += ", ";
      out += token_name(a.vars[i]);
    }
    out += ')';
  }
  out += ')';
}

void print(const Term& t, std::string& out) {
  if (t.arity() > 0) append_params(out, "v", t.arity());
  print_body(t, out);
}

std::string code_message(ConstructionError::Code c) {
  switch (c) {
    case ConstructionError::Code::ArityMismatch:
      return "wrong number of arguments";
    case ConstructionError::Code::VarCountMismatch:
      return "variable tuple length differs from the argument's arity";
    case ConstructionError::Code::TypeMismatch:
      return "argument type does not match the slot";
    case ConstructionError::Code::EscapingToken:
      return "u-variable not bound by this slot";
    case ConstructionError::Code::TokenWithVars:
      return "variable applied to arguments";
  }
  return "invalid merge";
}

class Parser {
 public:
  Parser(std::string_view text, const InputTypes& inputs) : lex_(text), inputs_(inputs) {}

  Term parse() {
    Term t = term();
    if (lex_.peek().kind != Token::Kind::End)
      lex_.fail("expected end of input, found " + detail::describe(lex_.peek()));
    return t;
  }

 private:
  // Variables visible while parsing a body: the enclosing lambda's v-params
  // and the current slot's u-params.
  struct Scope {
    int num_v = 0;
    int num_u = 0;
  };

  Term term() {
    if (!lex_.at_keyword("lambda")) return body(Scope{});
    const std::size_t start = lex_.next().pos;
    const int n = binders("v");
    lex_.expect(Token::Kind::Colon, "':'");
    if (n == 1 && lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "v1") {
      lex_.next();
      return Term::identity();
    }
    const Term t = body(Scope{n, 0});
    if (t.kind() != Term::Kind::Merge || t.arity() != n)
      lex_.fail_at(start, "lambda parameters are not exactly the body's variables");
    return t;
  }

  // Parses "f1, f2, ..." requiring names family1..familyN in order.
  int binders(std::string_view family) {
    int n = 0;
    do {
      const Token tok = lex_.expect(Token::Kind::Ident, "a variable name");
      const std::string want = std::string(family) + std::to_string(n + 1);
      if (tok.text != want) lex_.fail_at(tok.pos, "expected binder '" + want + "'");
      ++n;
    } while (lex_.accept(Token::Kind::Comma));
    if (n > 2) lex_.fail("at most two lambda parameters are supported");
    return n;
  }

  VarToken variable(const Token& tok, const Scope& scope) {
    const auto v = parse_token(tok.text);
    if (!v) lex_.fail_at(tok.pos, "expected a variable, found " + detail::describe(tok));
    const int bound = is_u(*v) ? scope.num_u : scope.num_v;
    if (token_index(*v) > bound) lex_.fail_at(tok.pos, "unbound variable " + std::string(tok.text));
    return *v;
  }

  Term atom(const Token& tok, const Scope& scope) {
    if (tok.kind == Token::Kind::Int) {
      if (!is_literal(tok.number)) lex_.fail_at(tok.pos, "integer " + std::string(tok.text) + " is not a DSL literal");
      return Term::literal(static_cast<int>(tok.number));
    }
    if (tok.kind != Token::Kind::Ident) lex_.fail_at(tok.pos, "expected an expression, found " + detail::describe(tok));
    if (parse_token(tok.text)) return Term::token(variable(tok, scope));
    auto it = inputs_.find(tok.text);
    if (it == inputs_.end()) lex_.fail_at(tok.pos, "unknown identifier '" + std::string(tok.text) + "'");
    return Term::input(it->first, it->second);
  }

  Term body(const Scope& scope) {
    const Token head = lex_.next();
    if (head.kind != Token::Kind::Ident || lex_.peek().kind != Token::Kind::LParen) return atom(head, scope);
    const auto id = find_op(head.text);
    if (!id) lex_.fail_at(head.pos, "unknown operation '" + std::string(head.text) + "'");
    const OpDescriptor& op = descriptor(*id);
    lex_.expect(Token::Kind::LParen, "'('");
    std::vector<MergeArg> args;
    for (int k = 0; k < op.arity; ++k) {
      if (k) lex_.expect(Token::Kind::Comma, "','");
      args.push_back(slot(op.slot_arity(k), scope));
    }
    lex_.expect(Token::Kind::RParen, "')'");
    check_order(args, head.pos);
    ConstructionError::Code why{};
    auto t = try_merge(op, args, &why);
    if (!t) lex_.fail_at(head.pos, std::string(op.name) + ": " + code_message(why));
    return *t;
  }

  MergeArg slot(int arity, const Scope& outer) {
    Scope scope{outer.num_v, 0};
    if (arity > 0) {
      if (!lex_.at_keyword("lambda")) lex_.fail("expected 'lambda' for a function argument");
      lex_.next();
      const std::size_t pos = lex_.peek().pos;
      scope.num_u = binders("u");
      if (scope.num_u != arity) lex_.fail_at(pos, "expected " + std::to_string(arity) + " parameters");
      lex_.expect(Token::Kind::Colon, "':'");
    }
    if (!lex_.accept(Token::Kind::LParen)) {
      // Closed child applied to the empty tuple, or a bare variable.
      const Token& p = lex_.peek();
      if (p.kind == Token::Kind::Ident && parse_token(p.text)) return {atom(lex_.next(), scope), {}};
      return {body(Scope{}), {}};
    }
    const Term child = term();
    lex_.expect(Token::Kind::RParen, "')'");
    lex_.expect(Token::Kind::LParen, "'('");
    MergeArg arg{child, {}};
    do {
      const Token tok = lex_.expect(Token::Kind::Ident, "a variable");
      if (arg.vars.size() == VarTuple::kCapacity) lex_.fail_at(tok.pos, "too many variables");
      arg.vars.push_back(variable(tok, scope));
    } while (lex_.accept(Token::Kind::Comma));
    lex_.expect(Token::Kind::RParen, "')'");
    return arg;
  }

  // Outer binders must be numbered by first occurrence.
  void check_order(std::span<const MergeArg> args, std::size_t pos) {
    int next = 1;
    auto see = [&](VarToken t) {
      if (!is_v(t) || token_index(t) < next) return;
      if (token_index(t) != next) lex_.fail_at(pos, "variables are not in canonical order");
      ++next;
    };
    for (const MergeArg& a : args) {
      if (a.child.is_token()) see(a.child.token_value());
      for (VarToken t : a.vars) see(t);
    }
  }

  Lexer lex_;
  const InputTypes& inputs_;
};

}  // namespace

ParseError::ParseError(std::size_t pos, const std::string& message)
    : std::runtime_error("parse error at offset " + std::to_string(pos) + ": " + message),
      pos_(pos),
      message_(message) {}

std::string to_source(const Term& t) {
  std::string out;
  print(t, out);
  return out;
}

Term parse_term(std::string_view text, const InputTypes& inputs) { return Parser(text, inputs).parse(); }

}  // namespace lamsynth
