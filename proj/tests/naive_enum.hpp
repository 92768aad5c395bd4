#pragma once

// Brute-force reference for the enumerator: every term up to a weight, with
// no deduplication and validity decided by merge alone. Shares only the
// executor and the pruning rule with the engine.

#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "lamsynth/executor.hpp"
#include "lamsynth/pool.hpp"
#include "lamsynth/search.hpp"

namespace naive {

using namespace lamsynth;

inline bool pruned(const Term& t, const std::vector<Value>& values) {
  if (t.is_token()) return false;
  std::size_t errs = 0;
  for (const Value& v : values) errs += v.is_err();
  return t.arity() == 0 ? errs > 0 : errs == values.size();
}

// Distinct keys per minimal weight.
inline std::map<int, std::size_t> key_counts(const Task& task, int max_weight) {
  const Executor ex(task);
  std::vector<std::vector<Term>> by_weight(static_cast<std::size_t>(max_weight) + 1);
  std::unordered_map<ExecutionKey, int, ExecutionKeyHash> best;
  auto keep = [&](const Term& t) {
    auto values = ex.behavior(t);
    if (pruned(t, values)) return;
    by_weight[static_cast<std::size_t>(t.weight())].push_back(t);
    auto [it, fresh] = best.emplace(make_key(t, std::move(values)), t.weight());
    if (!fresh) it->second = std::min(it->second, t.weight());
  };
  for (const Term& t : initial_terms(task)) keep(t);

  const std::vector<std::vector<VarToken>> tuples[3] = {
      {{}},
      {{VarToken::V1}, {VarToken::V2}, {VarToken::U1}, {VarToken::U2}},
      [] {
        std::vector<std::vector<VarToken>> out;
        for (VarToken a : kAllTokens)
          for (VarToken b : kAllTokens) out.push_back({a, b});
        return out;
      }()};

  for (int w = 2; w <= max_weight; ++w) {
    for (const OpDescriptor& op : op_table()) {
      std::vector<MergeArg> args;
      auto rec = [&](auto&& self, int k, int used) -> void {
        if (k == op.arity) {
          auto t = try_merge(op, args);
          if (t && t->weight() == w) keep(*t);
          return;
        }
        for (int cw = 1; used + cw <= w - 1; ++cw)
          for (const Term& child : by_weight[static_cast<std::size_t>(cw)]) {
            if (child.arity() > 2) continue;
            for (const auto& vars : tuples[child.arity()]) {
              VarTuple vt;
              for (VarToken v : vars) vt.push_back(v);
              args.push_back({child, vt});
              self(self, k + 1, used + cw + static_cast<int>(vars.size()));
              args.pop_back();
            }
          }
      };
      rec(rec, 0, 0);
    }
  }
  std::map<int, std::size_t> counts;
  for (const auto& [key, w] : best) ++counts[w];
  return counts;
}

inline std::map<int, std::size_t> enumerator_counts(const Task& task, int max_weight) {
  std::map<int, std::size_t> counts;
  SearchConfig c;
  c.max_weight = max_weight;
  c.stop_on_solution = false;
  enumerate(task, c, [&](const ValueEntry& e) {
    ++counts[e.weight()];
    return true;
  });
  return counts;
}

inline Task random_task(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> el(-6, 6);
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_int_distribution<int> inputs(1, 2);
  Task t;
  const int n = inputs(rng);
  const std::size_t examples = 3;
  for (int i = 0; i < n; ++i) {
    const bool list = i == 0 || rng() % 2;
    t.input_names.push_back("x" + std::to_string(i + 1));
    t.input_types.push_back(list ? BaseType::List : BaseType::Int);
    std::vector<Value> column;
    for (std::size_t e = 0; e < examples; ++e) {
      if (!list) {
        column.push_back(Value::integer(el(rng)));
        continue;
      }
      std::vector<std::int64_t> xs(static_cast<std::size_t>(len(rng)));
      for (auto& x : xs) x = el(rng);
      column.push_back(Value::list(xs));
    }
    t.inputs.push_back(std::move(column));
  }
  for (std::size_t e = 0; e < examples; ++e) t.outputs.push_back(Value::integer(el(rng)));
  return t;
}

}  // namespace naive
