#include "lamsynth/lambda_term.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <unordered_map>

#include "lexer.hpp"

namespace lamsynth {
namespace {

std::shared_ptr<LcNode> node(LcNode::Kind kind) {
  auto n = std::make_shared<LcNode>();
  n->kind = kind;
  return n;
}

// Ids for expanded bare tokens, which stay free.
int token_var(VarToken t) { return -1 - static_cast<int>(t); }

void collect_free(const LcTerm& t, std::vector<int>& bound, std::vector<int>& out) {
  switch (t->kind) {
    case LcNode::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t->var) == bound.end() &&
          std::find(out.begin(), out.end(), t->var) == out.end())
        out.push_back(t->var);
      return;
    case LcNode::Kind::Lambda: {
      const std::size_t mark = bound.size();
      bound.insert(bound.end(), t->params.begin(), t->params.end());
      collect_free(t->body(), bound, out);
      bound.resize(mark);
      return;
    }
    case LcNode::Kind::Prim:
      for (const LcTerm& c : t->children) collect_free(c, bound, out);
      return;
    default:
      return;
  }
}

LcTerm substitute(const LcTerm& t, const std::unordered_map<int, LcTerm>& sub) {
  switch (t->kind) {
    case LcNode::Kind::Var: {
      auto it = sub.find(t->var);
      return it == sub.end() ? t : it->second;
    }
    case LcNode::Kind::Lambda:
      return lc_lambda(t->params, substitute(t->body(), sub));
    case LcNode::Kind::Prim: {
      std::vector<LcTerm> args;
      for (const LcTerm& c : t->children) args.push_back(substitute(c, sub));
      return lc_prim(*t->op, std::move(args));
    }
    default:
      return t;
  }
}

// Variable environment of expand: token -> variable id.
using TokenEnv = std::array<int, 4>;

LcTerm expand_body(const Term& t, const TokenEnv& env);

// Returns the expansion of t with its own outer lambda, using fresh ids.
LcTerm expand_closed(const Term& t) {
  if (t.kind() == Term::Kind::Identity) {
    const int v = fresh_var();
    return lc_lambda({v}, lc_var(v));
  }
  TokenEnv env{};
  for (VarToken tok : kAllTokens) env[static_cast<std::size_t>(tok)] = token_var(tok);
  if (t.arity() == 0) return expand_body(t, env);
  std::vector<int> params;
  for (int i = 1; i <= t.arity(); ++i) {
    params.push_back(fresh_var());
    env[static_cast<std::size_t>(v_token(i))] = params.back();
  }
  return lc_lambda(params, expand_body(t, env));
}

LcTerm expand_body(const Term& t, const TokenEnv& env) {
  switch (t.kind()) {
    case Term::Kind::Input:
      return lc_input(t.input_name(), t.type().result);
    case Term::Kind::Literal:
      return lc_const(t.literal_value());
    case Term::Kind::Token:
      return lc_var(env[static_cast<std::size_t>(t.token_value())]);
    case Term::Kind::Identity:
      return expand_closed(t);
    case Term::Kind::Merge:
      break;
  }
  std::vector<LcTerm> slots;
  for (std::size_t k = 0; k < t.args().size(); ++k) {
    const MergeArg& a = t.args()[k];
    const int l = t.op().slot_arity(static_cast<int>(k));
    TokenEnv inner = env;
    std::vector<int> uparams;
    for (int j = 1; j <= l; ++j) {
      uparams.push_back(fresh_var());
      inner[static_cast<std::size_t>(u_token(j))] = uparams.back();
    }
    LcTerm r;
    if (a.vars.empty()) {
      r = a.child.is_token() ? expand_body(a.child, inner) : expand_closed(a.child);
    } else {
      const LcTerm f = expand_closed(a.child);
      std::unordered_map<int, LcTerm> sub;
      for (std::size_t i = 0; i < a.vars.size(); ++i)
        sub[f->params[i]] = lc_var(inner[static_cast<std::size_t>(a.vars[i])]);
      r = substitute(f->body(), sub);
    }
    slots.push_back(l > 0 ? lc_lambda(uparams, r) : r);
  }
  return lc_prim(t.op(), std::move(slots));
}

// Binders are numbered in visiting order; `names` is scoped to each body.
void key(const LcTerm& t, std::map<int, int>& names, int& binders, std::string& out) {
  switch (t->kind) {
    case LcNode::Kind::Input:
      out += t->name;
      return;
    case LcNode::Kind::Const:
      out += std::to_string(t->value);
      return;
    case LcNode::Kind::Var: {
      auto it = names.find(t->var);
      out += it == names.end() ? "$" + std::to_string(t->var) : "#" + std::to_string(it->second);
      return;
    }
    case LcNode::Kind::Lambda: {
      std::map<int, int> inner = names;
      out += "\\";
      for (int p : t->params) {
        const int id = binders++;
        inner[p] = id;
        out += "#" + std::to_string(id) + ' ';
      }
      out += '.';
      key(t->body(), inner, binders, out);
      return;
    }
    case LcNode::Kind::Prim:
      out += t->op->name;
      out += '(';
      for (std::size_t i = 0; i < t->children.size(); ++i) {
        if (i) out += ',';
        key(t->children[i], names, binders, out);
      }
      out += ')';
      return;
  }
}

struct Printer {
  std::vector<std::pair<int, std::string>> scope;
  std::string out;

  const std::string* lookup(int id) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == id) return &it->second;
    return nullptr;
  }

  bool captured(const std::string& name, const std::vector<int>& free) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->second == name) return std::find(free.begin(), free.end(), it->first) != free.end();
    return false;
  }

  void lambda(const LcTerm& t, char family) {
    const std::vector<int> free = free_vars(t->body());
    std::vector<std::string> chosen;
    int fallback = static_cast<int>(t->params.size());
    for (std::size_t i = 0; i < t->params.size(); ++i) {
      std::string name = family + std::to_string(i + 1);
      while (captured(name, free) || std::find(chosen.begin(), chosen.end(), name) != chosen.end())
        name = family + std::to_string(++fallback);
      chosen.push_back(name);
    }
    out += "lambda ";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i) out += ", ";
      out += chosen[i];
    }
    out += ": ";
    const std::size_t mark = scope.size();
    for (std::size_t i = 0; i < chosen.size(); ++i) scope.emplace_back(t->params[i], chosen[i]);
    expr(t->body(), 'v');
    scope.resize(mark);
  }

  void expr(const LcTerm& t, char family) {
    switch (t->kind) {
      case LcNode::Kind::Input:
        out += t->name;
        return;
      case LcNode::Kind::Const:
        out += std::to_string(t->value);
        return;
      case LcNode::Kind::Var: {
        if (const std::string* n = lookup(t->var)) {
          out += *n;
        } else if (t->var < 0 && t->var >= -4) {
          out += token_name(static_cast<VarToken>(-1 - t->var));
        } else {
          out += "_" + std::to_string(t->var);
        }
        return;
      }
      case LcNode::Kind::Lambda:
        lambda(t, family);
        return;
      case LcNode::Kind::Prim:
        out += t->op->name;
        out += '(';
        for (std::size_t i = 0; i < t->children.size(); ++i) {
          if (i) out += ", ";
          expr(t->children[i], 'u');
        }
        out += ')';
        return;
    }
  }
};

class LambdaParser {
 public:
  LambdaParser(std::string_view text, const InputTypes& inputs) : lex_(text), inputs_(inputs) {}

  LcTerm parse() {
    LcTerm t = expr();
    if (lex_.peek().kind != detail::Token::Kind::End)
      lex_.fail("expected end of input, found " + detail::describe(lex_.peek()));
    return t;
  }

 private:
  using Token = detail::Token;

  LcTerm expr() {
    if (!lex_.at_keyword("lambda")) return application();
    lex_.next();
    std::vector<int> params;
    const std::size_t mark = scope_.size();
    do {
      const Token tok = lex_.expect(Token::Kind::Ident, "a parameter name");
      if (tok.text == "lambda" || find_op(tok.text)) lex_.fail_at(tok.pos, "invalid parameter name");
      params.push_back(fresh_var());
      scope_.emplace_back(std::string(tok.text), params.back());
    } while (lex_.accept(Token::Kind::Comma));
    lex_.expect(Token::Kind::Colon, "':'");
    LcTerm body = expr();
    scope_.resize(mark);
    return lc_lambda(std::move(params), std::move(body));
  }

  LcTerm application() {
    const std::size_t pos = lex_.peek().pos;
    LcTerm f = primary();
    while (lex_.peek().kind == Token::Kind::LParen) {
      if (f->kind != LcNode::Kind::Lambda) lex_.fail("only lambdas can be applied");
      lex_.next();
      std::vector<LcTerm> args;
      do {
        args.push_back(expr());
        if (!lc_atomic(args.back())) lex_.fail_at(pos, "lambda arguments must be variables or constants");
      } while (lex_.accept(Token::Kind::Comma));
      lex_.expect(Token::Kind::RParen, "')'");
      if (args.size() != f->params.size())
        lex_.fail_at(pos, "lambda expects " + std::to_string(f->params.size()) + " arguments");
      std::unordered_map<int, LcTerm> sub;
      for (std::size_t i = 0; i < args.size(); ++i) sub[f->params[i]] = args[i];
      f = substitute(f->body(), sub);
    }
    return f;
  }

  LcTerm primary() {
    const Token tok = lex_.next();
    if (tok.kind == Token::Kind::LParen) {
      LcTerm t = expr();
      lex_.expect(Token::Kind::RParen, "')'");
      return t;
    }
    if (tok.kind == Token::Kind::Int) {
      if (!is_literal(tok.number)) lex_.fail_at(tok.pos, "integer " + std::string(tok.text) + " is not a DSL literal");
      return lc_const(static_cast<int>(tok.number));
    }
    if (tok.kind != Token::Kind::Ident) lex_.fail_at(tok.pos, "expected an expression, found " + detail::describe(tok));
    if (lex_.peek().kind == Token::Kind::LParen && find_op(tok.text)) {
      const OpDescriptor& op = descriptor(*find_op(tok.text));
      lex_.next();
      std::vector<LcTerm> args;
      for (int k = 0; k < op.arity; ++k) {
        if (k) lex_.expect(Token::Kind::Comma, "','");
        args.push_back(expr());
      }
      lex_.expect(Token::Kind::RParen, "')'");
      return lc_prim(op, std::move(args));
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == tok.text) return lc_var(it->second);
    auto in = inputs_.find(tok.text);
    if (in == inputs_.end()) lex_.fail_at(tok.pos, "unknown identifier '" + std::string(tok.text) + "'");
    return lc_input(in->first, in->second);
  }

  detail::Lexer lex_;
  const InputTypes& inputs_;
  std::vector<std::pair<std::string, int>> scope_;
};

struct Env {
  std::span<const InputBinding> inputs;
  std::vector<std::pair<int, int>> vars;
};

Value eval(const LcTerm& t, Env& env) {
  switch (t->kind) {
    case LcNode::Kind::Input:
      for (const InputBinding& b : env.inputs)
        if (b.name == t->name) return b.value;
      return Value::err();
    case LcNode::Kind::Const:
      return Value::integer(t->value);
    case LcNode::Kind::Var:
      for (auto it = env.vars.rbegin(); it != env.vars.rend(); ++it)
        if (it->first == t->var) return Value::integer(it->second);
      return Value::err();
    case LcNode::Kind::Lambda:
      return Value::err();
    case LcNode::Kind::Prim:
      break;
  }
  const OpDescriptor& op = *t->op;
  std::array<Value, kMaxOpArity> values{};
  std::array<OpArg, kMaxOpArity> args{};
  // At most one function slot per operation.
  const LcTerm* fn = nullptr;
  auto call = [&](std::span<const int> xs) -> Value {
    const LcNode& lam = **fn;
    const std::size_t mark = env.vars.size();
    for (std::size_t i = 0; i < xs.size() && i < lam.params.size(); ++i) env.vars.emplace_back(lam.params[i], xs[i]);
    Value r = eval(lam.body(), env);
    env.vars.resize(mark);
    return r;
  };
  Callback cb(call);
  for (int k = 0; k < op.arity; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (op.slot_arity(k) > 0) {
      if (t->children[i]->kind != LcNode::Kind::Lambda) return Value::err();
      fn = &t->children[i];
      args[i].fn = &cb;
    } else {
      values[i] = eval(t->children[i], env);
      if (values[i].is_err()) return Value::err();
      args[i].value = &values[i];
    }
  }
  return apply_op(op, std::span<const OpArg>(args.data(), static_cast<std::size_t>(op.arity)));
}

class Decomposer {
 public:
  Trace trace;

  std::size_t term(const LcTerm& s) {
    switch (s->kind) {
      case LcNode::Kind::Input:
        return atom(Term::input(s->name, s->input_type));
      case LcNode::Kind::Const:
        if (!is_literal(s->value)) throw DecomposeError("constant is not a DSL literal");
        return atom(Term::literal(s->value));
      case LcNode::Kind::Var:
        throw DecomposeError("a bare variable has no exact lambda variables");
      case LcNode::Kind::Lambda:
        break;
      case LcNode::Kind::Prim:
        if (!free_vars(s).empty()) throw DecomposeError("term has free variables");
        return prim(*s, {});
    }
    const LcTerm& body = s->body();
    if (body->kind == LcNode::Kind::Var && s->params.size() == 1 && body->var == s->params[0])
      return atom(Term::identity());
    if (body->kind != LcNode::Kind::Prim) throw DecomposeError("lambda body is not an application");
    if (s->params.size() > 2) throw DecomposeError("more than two lambda parameters");
    if (free_vars(body) != s->params)
      throw DecomposeError("lambda parameters are not the body's free variables in first-occurrence order");
    std::unordered_map<int, VarToken> tokens;
    for (std::size_t i = 0; i < s->params.size(); ++i) tokens[s->params[i]] = v_token(static_cast<int>(i) + 1);
    return prim(*body, tokens);
  }

 private:
  std::size_t atom(Term t) {
    TraceStep step;
    step.atom = std::move(t);
    trace.steps.push_back(std::move(step));
    return trace.steps.size() - 1;
  }

  std::size_t prim(const LcNode& f, std::unordered_map<int, VarToken> tokens) {
    const OpDescriptor& op = *f.op;
    TraceStep step;
    step.kind = TraceStep::Kind::Merge;
    step.op = &op;
    for (int k = 0; k < op.arity; ++k) {
      LcTerm r = f.children[static_cast<std::size_t>(k)];
      auto scope = tokens;
      const int l = op.slot_arity(k);
      if (l > 0) {
        if (r->kind != LcNode::Kind::Lambda || static_cast<int>(r->params.size()) != l)
          throw DecomposeError(std::string(op.name) + " expects a lambda of arity " + std::to_string(l));
        for (int j = 0; j < l; ++j) scope[r->params[static_cast<std::size_t>(j)]] = u_token(j + 1);
        r = r->body();
      }
      if (r->kind == LcNode::Kind::Lambda) throw DecomposeError("unexpected lambda argument");
      if (r->kind == LcNode::Kind::Var) {
        auto it = scope.find(r->var);
        if (it == scope.end()) throw DecomposeError("unbound variable");
        step.args.emplace_back(atom(Term::token(it->second)), VarTuple{});
        continue;
      }
      if (r->kind != LcNode::Kind::Prim) {
        step.args.emplace_back(term(r), VarTuple{});
        continue;
      }
      const std::vector<int> fv = free_vars(r);
      if (fv.size() > VarTuple::kCapacity) throw DecomposeError("argument has more than two free variables");
      VarTuple vars;
      for (int v : fv) {
        auto it = scope.find(v);
        if (it == scope.end()) throw DecomposeError("unbound variable");
        vars.push_back(it->second);
      }
      const std::size_t child = term(fv.empty() ? r : lc_lambda(fv, r));
      step.args.emplace_back(child, vars);
    }
    trace.steps.push_back(std::move(step));
    return trace.steps.size() - 1;
  }
};

}  // namespace

int fresh_var() {
  static std::atomic<int> next{1};
  return next.fetch_add(1, std::memory_order_relaxed);
}

LcTerm lc_input(std::string name, BaseType type) {
  auto n = node(LcNode::Kind::Input);
  n->name = std::move(name);
  n->input_type = type;
  return n;
}

LcTerm lc_const(int value) {
  auto n = node(LcNode::Kind::Const);
  n->value = value;
  return n;
}

LcTerm lc_var(int id) {
  auto n = node(LcNode::Kind::Var);
  n->var = id;
  return n;
}

LcTerm lc_prim(const OpDescriptor& op, std::vector<LcTerm> args) {
  auto n = node(LcNode::Kind::Prim);
  n->op = &op;
  n->children = std::move(args);
  return n;
}

LcTerm lc_lambda(std::vector<int> params, LcTerm body) {
  auto n = node(LcNode::Kind::Lambda);
  n->params = std::move(params);
  n->children.push_back(std::move(body));
  return n;
}

bool lc_atomic(const LcTerm& t) {
  return t->kind == LcNode::Kind::Input || t->kind == LcNode::Kind::Const || t->kind == LcNode::Kind::Var;
}

std::vector<int> free_vars(const LcTerm& t) {
  std::vector<int> bound;
  std::vector<int> out;
  collect_free(t, bound, out);
  return out;
}

std::optional<FunctionType> lc_type(const LcTerm& t) {
  switch (t->kind) {
    case LcNode::Kind::Input:
      return FunctionType{0, t->input_type};
    case LcNode::Kind::Const:
    case LcNode::Kind::Var:
      return FunctionType{0, BaseType::Int};
    case LcNode::Kind::Lambda: {
      auto body = lc_type(t->body());
      if (!body || body->arity != 0 || t->params.empty() || t->params.size() > 2) return std::nullopt;
      return FunctionType{static_cast<int>(t->params.size()), body->result};
    }
    case LcNode::Kind::Prim: {
      const OpDescriptor& op = *t->op;
      if (t->children.size() != static_cast<std::size_t>(op.arity)) return std::nullopt;
      for (std::size_t k = 0; k < t->children.size(); ++k) {
        auto c = lc_type(t->children[k]);
        if (!c || *c != op.slots[k]) return std::nullopt;
      }
      return FunctionType{0, op.result};
    }
  }
  return std::nullopt;
}

bool has_exact_lambda_vars(const LcTerm& t) {
  if (t->kind != LcNode::Kind::Lambda) return free_vars(t).empty();
  std::vector<int> fv = free_vars(t->body());
  std::vector<int> params = t->params;
  std::sort(fv.begin(), fv.end());
  std::sort(params.begin(), params.end());
  return fv == params;
}

bool in_merge_domain(const LcTerm& t) { return lc_type(t).has_value() && has_exact_lambda_vars(t); }

int lc_weight(const LcTerm& t) {
  switch (t->kind) {
    case LcNode::Kind::Input:
    case LcNode::Kind::Const:
    case LcNode::Kind::Var:
      return 1;
    case LcNode::Kind::Lambda:
      return t->body()->kind == LcNode::Kind::Var ? 1 : lc_weight(t->body());
    case LcNode::Kind::Prim:
      break;
  }
  int w = 1;
  for (std::size_t k = 0; k < t->children.size(); ++k) {
    LcTerm r = t->children[k];
    if (t->op->slot_arity(static_cast<int>(k)) > 0 && r->kind == LcNode::Kind::Lambda) r = r->body();
    w += lc_atomic(r) ? 1 : lc_weight(r) + static_cast<int>(free_vars(r).size());
  }
  return w;
}

std::string canonical_key(const LcTerm& t) {
  std::map<int, int> names;
  int binders = 0;
  std::string out;
  key(t, names, binders, out);
  return out;
}

LcTerm expand(const Term& t) {
  if (t.is_token()) return lc_var(token_var(t.token_value()));
  return expand_closed(t);
}

std::string print_lambda(const LcTerm& t) {
  Printer p;
  p.expr(t, 'v');
  return p.out;
}

std::string simplify(const Term& t) { return print_lambda(expand(t)); }

LcTerm parse_lambda(std::string_view text, const InputTypes& inputs) { return LambdaParser(text, inputs).parse(); }

Value lc_evaluate(const LcTerm& t, std::span<const InputBinding> inputs) {
  Env env{inputs, {}};
  return eval(t, env);
}

Trace decompose(const LcTerm& s) {
  if (!in_merge_domain(s)) throw DecomposeError("term is not well typed with exact lambda variables");
  Decomposer d;
  d.term(s);
  return std::move(d.trace);
}

Term replay(const Trace& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("empty trace");
  std::vector<Term> built;
  built.reserve(trace.steps.size());
  for (const TraceStep& step : trace.steps) {
    if (step.kind == TraceStep::Kind::Atom) {
      built.push_back(*step.atom);
      continue;
    }
    std::vector<MergeArg> args;
    for (const auto& [index, vars] : step.args) args.push_back({built.at(index), vars});
    built.push_back(merge(*step.op, args));
  }
  return built.back();
}

Term parse_solution(std::string_view text, const InputTypes& inputs) {
  try {
    return parse_term(text, inputs);
  } catch (const ParseError&) {
  }
  const LcTerm s = parse_lambda(text, inputs);
  try {
    return replay(decompose(s));
  } catch (const DecomposeError& e) {
    throw ParseError(0, e.what());
  }
}

std::string to_string(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    out += "t" + std::to_string(i + 1) + " = ";
    if (s.kind == TraceStep::Kind::Atom) {
      out += to_source(*s.atom);
    } else {
      out += "Merge(" + std::string(s.op->name);
      for (const auto& [index, vars] : s.args) {
        out += ", t" + std::to_string(index + 1) + ", [";
        for (std::size_t j = 0; j < vars.size(); ++j) {
          if (j) out += ", ";
          out += token_name(vars[j]);
        }
        out += "]";
      }
      out += ")";
    }
    out += '\n';
  }
  return out;
}

}  // namespace lamsynth
