#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamsynth/task.hpp"
#include "lamsynth/term.hpp"

namespace lamsynth {

// Fixed probe inputs for lambdas: 16 tuples per arity.
struct TupleTable {
  static constexpr std::size_t kCount = 16;
  std::array<std::array<int, 1>, kCount> unary;
  std::array<std::array<int, 2>, kCount> binary;

  std::span<const int> tuple(int arity, std::size_t i) const;
};

const TupleTable& canonical_tuples();
// Versioned text export and its FNV-1a hash (hex).
std::string export_tuple_table(const TupleTable& table = canonical_tuples());
TupleTable parse_tuple_table(std::string_view text);
std::string tuple_table_hash(const TupleTable& table = canonical_tuples());

// Observational identity used to deduplicate the value pool: per-example
// results for arity 0, per-probe results for lambdas. Bare variable tokens
// are keyed by the token itself.
struct ExecutionKey {
  std::int8_t arity = 0;
  BaseType result = BaseType::Int;
  std::int8_t token = -1;
  std::vector<Value> values;
  std::size_t hash = 0;

  friend bool operator==(const ExecutionKey& a, const ExecutionKey& b) {
    return a.hash == b.hash && a.arity == b.arity && a.result == b.result && a.token == b.token &&
           a.values == b.values;
  }
};

struct ExecutionKeyHash {
  std::size_t operator()(const ExecutionKey& k) const { return k.hash; }
};

ExecutionKey make_key(const Term& t, std::vector<Value> values);

struct ProbeRun {
  std::span<const int> args;
  std::size_t example;
  Value result;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Environment-passing interpreter over Merge trees. Results of closed
// arity-0 subterms can be cached with remember(). The cache borrows: the
// caller keeps the term and the value vector alive until forget().
class Executor {
 public:
  explicit Executor(const Task& task, const TupleTable& tuples = canonical_tuples());

  const Task& task() const { return *task_; }
  std::size_t num_examples() const { return task_->num_examples(); }

  // Arity-0 term: one result per example. Throws ConfigError on unknown inputs.
  std::vector<Value> evaluate(const Term& t) const;
  // Lambda: one result per canonical tuple, run i using example i mod N.
  std::vector<Value> probe(const Term& t) const;
  std::vector<ProbeRun> probe_runs(const Term& t) const;
  // evaluate or probe depending on arity; tokens yield an empty vector.
  std::vector<Value> behavior(const Term& t) const;
  ExecutionKey key(const Term& t) const;

  // Applies a term of arity |args| on one example.
  Value apply(const Term& t, std::size_t example, std::span<const int> args) const;

  void remember(const Term& t, const std::vector<Value>& values);
  void forget(const Term& t) { cache_.erase(t.node()); }
  void forget_all() { cache_.clear(); }

 private:
  using Env = std::array<int, 4>;
  Value eval(const Term& t, std::size_t example, const Env& env) const;
  Value slot_value(const MergeArg& a, std::size_t example, const Env& env) const;

  const Task* task_;
  const TupleTable* tuples_;
  std::unordered_map<const TermNode*, const Value*> cache_;
};

}  // namespace lamsynth
