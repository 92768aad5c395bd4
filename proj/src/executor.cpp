#include "lamsynth/executor.hpp"

#include <cstdio>
#include <sstream>

namespace lamsynth {
namespace {

constexpr TupleTable kTuples = {
    {{{-3}, {-2}, {-1}, {0}, {1}, {2}, {3}, {4}, {5}, {-8}, {7}, {-17}, {23}, {-64}, {100}, {251}}},
    {{{0, 0},
      {0, 3},
      {2, 0},
      {1, 1},
      {-1, -1},
      {2, 5},
      {5, 2},
      {-3, 4},
      {4, -3},
      {3, 3},
      {-2, -7},
      {7, -1},
      {-5, -2},
      {10, 3},
      {6, -6},
      {-17, 23}}},
};

constexpr int kTableVersion = 1;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::span<const int> TupleTable::tuple(int arity, std::size_t i) const {
  if (arity == 1) return unary[i];
  return binary[i];
}

const TupleTable& canonical_tuples() { return kTuples; }

std::string export_tuple_table(const TupleTable& table) {
  std::ostringstream out;
  out << "# canonical argument tuples for lambda probing\n";
  out << "version " << kTableVersion << "\n";
  out << "arity 1 count " << TupleTable::kCount << "\n";
  for (const auto& t : table.unary) out << t[0] << "\n";
  out << "arity 2 count " << TupleTable::kCount << "\n";
  for (const auto& t : table.binary) out << t[0] << " " << t[1] << "\n";
  return out.str();
}

TupleTable parse_tuple_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  TupleTable table{};
  int arity = 0;
  std::size_t row = 0;
  bool versioned = false;
  auto fail = [](const std::string& m) -> void { throw std::invalid_argument("tuple table: " + m); };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "version") {
      int v = 0;
      ls >> v;
      if (v != kTableVersion) fail("unsupported version");
      versioned = true;
      continue;
    }
    if (word == "arity") {
      std::string count_word;
      std::size_t count = 0;
      ls >> arity >> count_word >> count;
      if ((arity != 1 && arity != 2) || count != TupleTable::kCount) fail("bad section header");
      row = 0;
      continue;
    }
    if (arity == 0 || row >= TupleTable::kCount) fail("unexpected row");
    std::istringstream rs(line);
    if (arity == 1) {
      if (!(rs >> table.unary[row][0])) fail("bad row");
    } else if (!(rs >> table.binary[row][0] >> table.binary[row][1])) {
      fail("bad row");
    }
    ++row;
  }
  if (!versioned) fail("missing version");
  return table;
}

std::string tuple_table_hash(const TupleTable& table) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(export_tuple_table(table))));
  return buf;
}

ExecutionKey make_key(const Term& t, std::vector<Value> values) {
  ExecutionKey k;
  k.arity = static_cast<std::int8_t>(t.arity());
  k.result = t.type().result;
  if (t.is_token()) k.token = static_cast<std::int8_t>(t.token_value());
  k.values = std::move(values);
  k.hash = hash_values(k.values, (static_cast<std::size_t>(k.arity) << 8) ^
                                     (static_cast<std::size_t>(k.result) << 4) ^
                                     static_cast<std::size_t>(k.token + 1));
  return k;
}

Executor::Executor(const Task& task, const TupleTable& tuples) : task_(&task), tuples_(&tuples) {}

Value Executor::slot_value(const MergeArg& a, std::size_t example, const Env& env) const {
  if (a.child.is_token()) return Value::integer(env[static_cast<std::size_t>(a.child.token_value())]);
  if (a.vars.empty()) return eval(a.child, example, Env{});
  std::array<int, 2> args{};
  for (std::size_t i = 0; i < a.vars.size(); ++i) args[i] = env[static_cast<std::size_t>(a.vars[i])];
  return apply(a.child, example, std::span<const int>(args.data(), a.vars.size()));
}

Value Executor::apply(const Term& t, std::size_t example, std::span<const int> args) const {
  if (t.kind() == Term::Kind::Identity) return Value::integer(args[0]);
  Env env{};
  for (std::size_t i = 0; i < args.size(); ++i) env[i] = args[i];  // V1, V2 come first
  return eval(t, example, env);
}

Value Executor::eval(const Term& t, std::size_t example, const Env& env) const {
  switch (t.kind()) {
    case Term::Kind::Input: {
      auto it = cache_.find(t.node());
      if (it != cache_.end()) return it->second[example];
      const auto i = task_->input_index(t.input_name());
      if (!i) throw ConfigError("unknown input variable '" + t.input_name() + "'");
      return task_->inputs[*i][example];
    }
    case Term::Kind::Literal:
      return Value::integer(t.literal_value());
    case Term::Kind::Token:
      return Value::integer(env[static_cast<std::size_t>(t.token_value())]);
    case Term::Kind::Identity:
      return Value::err();
    case Term::Kind::Merge:
      break;
  }
  if (t.arity() == 0) {
    auto it = cache_.find(t.node());
    if (it != cache_.end()) return it->second[example];
  }
  const OpDescriptor& op = t.op();
  std::array<Value, kMaxOpArity> values{};
  std::array<OpArg, kMaxOpArity> args{};
  // The only higher-order slot is always the first one.
  const MergeArg* fn_arg = nullptr;
  auto call = [&](std::span<const int> xs) -> Value {
    Env inner = env;
    for (std::size_t j = 0; j < xs.size(); ++j) inner[static_cast<std::size_t>(u_token(static_cast<int>(j) + 1))] = xs[j];
    return slot_value(*fn_arg, example, inner);
  };
  const Callback cb(call);
  for (int k = 0; k < op.arity; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const MergeArg& a = t.args()[i];
    if (op.slot_arity(k) > 0) {
      fn_arg = &a;
      args[i].fn = &cb;
      continue;
    }
    values[i] = slot_value(a, example, env);
    if (values[i].is_err()) return Value::err();
    args[i].value = &values[i];
  }
  return apply_op(op, std::span<const OpArg>(args.data(), static_cast<std::size_t>(op.arity)));
}

std::vector<Value> Executor::evaluate(const Term& t) const {
  std::vector<Value> out;
  out.reserve(num_examples());
  for (std::size_t e = 0; e < num_examples(); ++e) out.push_back(eval(t, e, Env{}));
  return out;
}

std::vector<Value> Executor::probe(const Term& t) const {
  std::vector<Value> out;
  out.reserve(TupleTable::kCount);
  for (std::size_t i = 0; i < TupleTable::kCount; ++i)
    out.push_back(apply(t, i % num_examples(), tuples_->tuple(t.arity(), i)));
  return out;
}

std::vector<ProbeRun> Executor::probe_runs(const Term& t) const {
  std::vector<ProbeRun> out;
  for (std::size_t i = 0; i < TupleTable::kCount; ++i) {
    const std::span<const int> args = tuples_->tuple(t.arity(), i);
    out.push_back({args, i % num_examples(), apply(t, i % num_examples(), args)});
  }
  return out;
}

std::vector<Value> Executor::behavior(const Term& t) const {
  if (t.is_token()) return {};
  return t.arity() == 0 ? evaluate(t) : probe(t);
}

ExecutionKey Executor::key(const Term& t) const { return make_key(t, behavior(t)); }

void Executor::remember(const Term& t, const std::vector<Value>& values) {
  if (t.arity() != 0 || t.is_token() || values.size() != num_examples()) return;
  cache_.insert_or_assign(t.node(), values.data());
}

}  // namespace lamsynth
