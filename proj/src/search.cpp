#include "lamsynth/search.hpp"

#include <chrono>
#include <ostream>
#include <random>

#include <json.hpp>

#include "lamsynth/sampler.hpp"
#include "lamsynth/signature.hpp"

namespace lamsynth {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::size_t type_slot(BaseType t) { return static_cast<std::size_t>(t); }

// Evaluates, prunes and deduplicates candidate terms into a pool.
class Explorer {
 public:
  Explorer(const Task& task, bool signatures) : task_(task), exec_(task), signatures_(signatures) {}

  ValuePool& pool() { return pool_; }
  const ValuePool& pool() const { return pool_; }
  const std::optional<Term>& solution() const { return solution_; }

  // With `retain` false a novel value is only checked as a solution.
  Outcome add(const Term& t, std::size_t* index, bool retain = true) {
    std::vector<Value> values = exec_.behavior(t);
    if (!t.is_token()) {
      const auto errs = std::count_if(values.begin(), values.end(), [](const Value& v) { return v.is_err(); });
      // Any error on an example poisons every use of a closed value; a lambda
      // failing on all probes is useless.
      if (t.arity() == 0 ? errs > 0 : errs == static_cast<std::ptrdiff_t>(values.size())) return Outcome::Pruned;
    }
    ValueEntry entry{t, make_key(t, std::move(values)), std::nullopt};
    if (!retain) {
      if (pool_.find(entry.key)) return Outcome::Duplicate;
      if (!solution_ && is_solution(entry)) solution_ = t;
      return Outcome::Accepted;
    }
    std::optional<Term> displaced;
    std::size_t i = 0;
    const auto r = pool_.insert(std::move(entry), &i, &displaced);
    if (index) *index = i;
    if (r == ValuePool::Insert::Duplicate) return Outcome::Duplicate;
    ValueEntry& e = pool_.at(i);
    if (r == ValuePool::Insert::Improved) {
      exec_.forget(*displaced);
      exec_.remember(e.term, e.key.values);
      updated_.push_back(i);
      return Outcome::Improved;
    }
    exec_.remember(e.term, e.key.values);
    if (signatures_ && !e.is_token()) {
      if (e.term.arity() == 0) {
        e.signature = value_signature(e.key.values, task_);
      } else {
        std::vector<ProbeRun> runs;
        runs.reserve(e.key.values.size());
        for (std::size_t j = 0; j < e.key.values.size(); ++j)
          runs.push_back({canonical_tuples().tuple(e.term.arity(), j), j % task_.num_examples(), e.key.values[j]});
        e.signature = lambda_signature(runs, e.term.arity(), task_);
      }
    }
    updated_.push_back(i);
    if (!solution_ && is_solution(e)) solution_ = e.term;
    return Outcome::Accepted;
  }

  bool is_solution(const ValueEntry& e) const {
    return e.term.arity() == 0 && !e.is_token() && e.key.values == task_.outputs;
  }

  // Rough heap footprint of a stored entry, including index and cache nodes.
  static std::size_t footprint(const ValueEntry& e) {
    return sizeof(ValueEntry) + e.key.values.capacity() * sizeof(Value) + sizeof(TermNode) +
           e.term.args().size() * sizeof(MergeArg) + 128;
  }

  // Indices added or improved since the last call.
  std::vector<std::size_t> take_updates() { return std::exchange(updated_, {}); }

 private:
  const Task& task_;
  Executor exec_;
  ValuePool pool_;
  bool signatures_;
  std::optional<Term> solution_;
  std::vector<std::size_t> updated_;
};

}  // namespace

void SearchConfig::validate() const {
  if (!(restart_interval_s > 0)) throw ConfigError("restart interval must be positive");
  if (!(timeout_s >= restart_interval_s)) throw ConfigError("timeout must be at least the restart interval");
  if (max_weight < 1) throw ConfigError("max weight must be at least 1");
  if (samples_per_op < 1) throw ConfigError("samples per op must be at least 1");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Accepted:
      return "accepted";
    case Outcome::Improved:
      return "improved";
    case Outcome::Duplicate:
      return "duplicate";
    case Outcome::Pruned:
      return "pruned";
    case Outcome::Error:
      return "error";
  }
  return "?";
}

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Solved:
      return "solved";
    case SearchStatus::Timeout:
      return "timeout";
    case SearchStatus::Exhausted:
      return "exhausted";
    case SearchStatus::PolicyFailure:
      return "policy_error";
  }
  return "?";
}

void EventLog::record(const SearchEvent& e) {
  nlohmann::ordered_json j;
  j["restart"] = e.restart;
  j["iteration"] = e.iteration;
  j["op"] = e.op ? e.op->name : "";
  j["sequence"] = e.sequence;
  j["outcome"] = to_string(e.outcome);
  j["pool_size"] = e.pool_size;
  if (timing_)
    j["elapsed_ms"] = e.elapsed_ms;
  else
    j["elapsed_ms"] = nullptr;
  *out_ << j.dump() << '\n';
  ++count_;
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
  candidates += o.candidates;
  accepted += o.accepted;
  improved += o.improved;
  duplicates += o.duplicates;
  pruned += o.pruned;
  errors += o.errors;
  iterations += o.iterations;
  pool_size = o.pool_size;
  pool_frozen = pool_frozen || o.pool_frozen;
  weight_reached = std::max(weight_reached, o.weight_reached);
  elapsed_s += o.elapsed_s;
  return *this;
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0x5eed0000ull + restart));
}

namespace {

void count(SearchStats& s, Outcome o) {
  ++s.candidates;
  switch (o) {
    case Outcome::Accepted:
      ++s.accepted;
      break;
    case Outcome::Improved:
      ++s.improved;
      break;
    case Outcome::Duplicate:
      ++s.duplicates;
      break;
    case Outcome::Pruned:
      ++s.pruned;
      break;
    case Outcome::Error:
      ++s.errors;
      break;
  }
}

class Enumerator {
 public:
  Enumerator(const Task& task, const SearchConfig& config, const EntryCallback& cb)
      : task_(task), config_(config), cb_(cb), explorer_(task, false) {
    for (auto& by_arity : levels_)
      for (auto& by_weight : by_arity) by_weight.resize(static_cast<std::size_t>(config.max_weight) + 1);
  }

  SearchResult run() {
    t0_ = Clock::now();
    for (const Term& t : initial_terms(task_)) {
      if (!consider(t)) return finish();
    }
    stats_.weight_reached = 1;
    for (int w = 2; w <= config_.max_weight; ++w) {
      for (const OpDescriptor& op : op_table()) {
        op_ = &op;
        args_.clear();
        if (!fill(0, w - 1, 0)) return finish();
      }
      stats_.weight_reached = w;
    }
    status_ = SearchStatus::Exhausted;
    return finish();
  }

 private:
  SearchResult finish() {
    SearchResult r;
    if (explorer_.solution() && config_.stop_on_solution) status_ = SearchStatus::Solved;
    r.status = status_;
    r.solution = explorer_.solution();
    stats_.pool_size = explorer_.pool().size();
    stats_.elapsed_s = seconds_since(t0_);
    r.stats = stats_;
    return r;
  }

  // False stops the enumeration.
  bool consider(const Term& t) {
    std::size_t i = 0;
    const Outcome o = explorer_.add(t, &i, !stats_.pool_frozen);
    count(stats_, o);
    if (o == Outcome::Accepted && stats_.pool_frozen) {
      if (explorer_.solution() && config_.stop_on_solution) return false;
    } else if (o == Outcome::Accepted) {
      bytes_ += Explorer::footprint(explorer_.pool()[i]);
      if (bytes_ > config_.memory_budget_mb << 20) stats_.pool_frozen = true;
      const ValueEntry& e = explorer_.pool()[i];
      if (e.is_token()) {
        tokens_[static_cast<std::size_t>(e.term.token_value())] = i;
      } else {
        auto& list = levels_[type_slot(e.type().result)][static_cast<std::size_t>(e.term.arity())];
        list[static_cast<std::size_t>(e.weight())].push_back(i);
      }
      if (cb_ && !cb_(e)) {
        status_ = SearchStatus::Exhausted;
        return false;
      }
      if (explorer_.solution() && config_.stop_on_solution) return false;
    }
    if ((stats_.candidates & 1023) == 0 && seconds_since(t0_) >= config_.timeout_s) {
      status_ = SearchStatus::Timeout;
      return false;
    }
    return true;
  }

  // Chooses the argument of slot k with total remaining cost `budget`;
  // `seen_v` counts distinct v-tokens used so far, which enforces the
  // canonical first-occurrence order.
  bool fill(int k, int budget, int seen_v) {
    const OpDescriptor& op = *op_;
    if (k == op.arity) {
      if (budget != 0) return true;
      auto t = try_merge(op, args_);
      if (!t) {
        count(stats_, Outcome::Error);
        return true;
      }
      return consider(*t);
    }
    const int rest = op.arity - k - 1;  // each later slot costs at least 1
    const FunctionType slot = op.slots[static_cast<std::size_t>(k)];
    const int lo = rest == 0 ? budget : 1;
    const int hi = budget - rest;
    for (int c = lo; c <= hi; ++c) {
      if (c == 1 && slot.result == BaseType::Int) {
        for (VarToken t : kAllTokens) {
          const int next = next_seen(t, seen_v);
          if (next < 0 || (is_u(t) && token_index(t) > slot.arity)) continue;
          args_.push_back({explorer_.pool()[tokens_[static_cast<std::size_t>(t)]].term, {}});
          const bool go = fill(k + 1, budget - c, next);
          args_.pop_back();
          if (!go) return false;
        }
      }
      for (int a = 0; a <= 2 && a < c; ++a) {
        const auto& list = levels_[type_slot(slot.result)][static_cast<std::size_t>(a)][static_cast<std::size_t>(c - a)];
        if (list.empty()) continue;
        for (std::size_t n = 0; n < list.size(); ++n) {
          const Term child = explorer_.pool()[list[n]].term;
          if (!choose_vars(k, budget - c, seen_v, child, a, slot, VarTuple{})) return false;
        }
      }
    }
    return true;
  }

  bool choose_vars(int k, int rest_budget, int seen_v, const Term& child, int need, FunctionType slot,
                   VarTuple vars) {
    if (static_cast<int>(vars.size()) == need) {
      args_.push_back({child, vars});
      const bool go = fill(k + 1, rest_budget, seen_v);
      args_.pop_back();
      return go;
    }
    for (VarToken t : kAllTokens) {
      const int next = next_seen(t, seen_v);
      if (next < 0 || (is_u(t) && token_index(t) > slot.arity)) continue;
      VarTuple v = vars;
      v.push_back(t);
      if (!choose_vars(k, rest_budget, next, child, need, slot, v)) return false;
    }
    return true;
  }

  static int next_seen(VarToken t, int seen_v) {
    if (is_u(t)) return seen_v;
    const int i = token_index(t);
    if (i > seen_v + 1) return -1;
    return std::max(seen_v, i);
  }

  const Task& task_;
  const SearchConfig& config_;
  const EntryCallback& cb_;
  Explorer explorer_;
  // levels_[result type][arity][weight] -> pool indices
  std::array<std::array<std::vector<std::vector<std::size_t>>, 3>, 3> levels_;
  std::array<std::size_t, 4> tokens_{};
  std::size_t bytes_ = 0;
  const OpDescriptor* op_ = nullptr;
  std::vector<MergeArg> args_;
  SearchStats stats_;
  SearchStatus status_ = SearchStatus::Timeout;
  Clock::time_point t0_;
};

}  // namespace

SearchResult enumerate(const Task& task, const SearchConfig& config, const EntryCallback& on_entry) {
  if (config.max_weight < 1) throw ConfigError("max weight must be at least 1");
  return Enumerator(task, config, on_entry).run();
}

namespace {

// Masks and scores for the argument sequence of one op during one sampling
// phase. `limit` freezes the pool size seen by the phase.
class ArgumentModel final : public SequenceModel {
 public:
  ArgumentModel(const OpDescriptor& op, const ValuePool& pool, const std::array<std::vector<std::size_t>, 3>& by_type,
                Policy& policy)
      : op_(op), pool_(pool), by_type_(by_type), policy_(policy) {}

  bool complete(std::span<const int> prefix) const override {
    const auto k = static_cast<std::size_t>(op_.arity);
    if (prefix.size() < k) return false;
    std::size_t total = k;
    for (std::size_t i = 0; i < k; ++i) total += static_cast<std::size_t>(pool_[static_cast<std::size_t>(prefix[i])].term.arity());
    return prefix.size() == total;
  }

  void expand(std::span<const int> prefix, std::vector<int>& tokens, std::vector<double>& scores) override {
    StepContext ctx;
    valid(prefix, tokens, ctx);
    if (tokens.empty()) return;
    policy_.score(ctx, tokens, scores);
    if (scores.size() != tokens.size()) throw PolicyError("policy returned the wrong number of scores");
    for (double s : scores)
      if (!std::isfinite(s) || s < 0) throw PolicyError("policy returned a negative or non-finite score");
  }

  // Valid tokens after `prefix`, in ascending order of pool index or, for
  // variable positions, v1 v2 u1 u2.
  void valid(std::span<const int> prefix, std::vector<int>& out, StepContext& ctx) {
    out.clear();
    ctx.op = &op_;
    ctx.prefix = prefix;
    const auto k = static_cast<std::size_t>(op_.arity);
    if (prefix.size() < k) {
      ctx.slot = static_cast<int>(prefix.size());
      ctx.variable = false;
      const std::vector<int>& args = arguments(prefix.size());
      out.assign(args.begin(), args.end());
      return;
    }
    std::size_t pos = k;
    for (std::size_t s = 0; s < k; ++s) {
      const auto a = static_cast<std::size_t>(pool_[static_cast<std::size_t>(prefix[s])].term.arity());
      if (prefix.size() < pos + a) {
        ctx.slot = static_cast<int>(s);
        ctx.variable = true;
        for (VarToken t : kAllTokens)
          if (is_v(t) || token_index(t) <= op_.slot_arity(static_cast<int>(s))) out.push_back(encode_var(t));
        return;
      }
      pos += a;
    }
  }

  // Whether a complete sequence obeys every mask.
  bool admissible(std::span<const int> seq) {
    std::vector<int> allowed;
    StepContext ctx;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (complete(seq.first(i))) return false;
      valid(seq.first(i), allowed, ctx);
      if (!std::binary_search(allowed.begin(), allowed.end(), seq[i], [&](int a, int b) {
            return ctx.variable ? a > b : a < b;
          }))
        return false;
    }
    return complete(seq);
  }

 private:
  const std::vector<int>& arguments(std::size_t slot) {
    auto& cached = args_[slot];
    if (cached) return *cached;
    cached.emplace();
    const FunctionType type = op_.slots[slot];
    for (std::size_t i : by_type_[type_slot(type.result)]) {
      const Term& t = pool_[i].term;
      if (t.is_token() && is_u(t.token_value()) && token_index(t.token_value()) > type.arity) continue;
      cached->push_back(static_cast<int>(i));
    }
    return *cached;
  }

  const OpDescriptor& op_;
  const ValuePool& pool_;
  const std::array<std::vector<std::size_t>, 3>& by_type_;
  Policy& policy_;
  std::array<std::optional<std::vector<int>>, kMaxOpArity> args_;
};

std::vector<MergeArg> decode(const OpDescriptor& op, const ValuePool& pool, std::span<const int> seq) {
  std::vector<MergeArg> args;
  const auto k = static_cast<std::size_t>(op.arity);
  std::size_t pos = k;
  for (std::size_t s = 0; s < k; ++s) {
    MergeArg a{pool[static_cast<std::size_t>(seq[s])].term, {}};
    for (int j = 0; j < a.child.arity(); ++j) a.vars.push_back(*decode_var(seq[pos++]));
    args.push_back(std::move(a));
  }
  return args;
}

}  // namespace

SearchResult policy_search(const Task& task, Policy& policy, const SearchConfig& config, double budget_s,
                           std::uint64_t seed, EventLog* log, std::size_t restart) {
  const auto t0 = Clock::now();
  SearchResult result;
  SearchStats& st = result.stats;
  std::mt19937_64 rng(seed);
  Explorer ex(task, policy.wants_signatures());
  // Non-token and token pool indices by result type, ascending.
  std::array<std::vector<std::size_t>, 3> by_type;
  std::size_t known = 0;

  auto sync = [&] {
    const std::vector<std::size_t> updates = ex.take_updates();
    for (; known < ex.pool().size(); ++known) {
      const ValueEntry& e = ex.pool()[known];
      by_type[type_slot(e.type().result)].push_back(known);
    }
    policy.observe(ex.pool(), updates);
  };
  auto done = [&](SearchStatus s) {
    result.status = s;
    result.solution = ex.solution();
    st.pool_size = ex.pool().size();
    st.elapsed_s = seconds_since(t0);
    policy.end();
    return result;
  };
  auto out_of_budget = [&] {
    if (seconds_since(t0) >= budget_s) return true;
    return config.restart_iterations != 0 && st.iterations >= config.restart_iterations;
  };

  try {
    for (const Term& t : initial_terms(task)) count(st, ex.add(t, nullptr));
    if (ex.solution()) return done(SearchStatus::Solved);
    policy.begin(task, io_signature(task));
    sync();

    std::vector<int> seq;
    while (!out_of_budget()) {
      for (const OpDescriptor& op : op_table()) {
        if (seconds_since(t0) >= budget_s) return done(SearchStatus::Timeout);
        ArgumentModel model(op, ex.pool(), by_type, policy);
        std::vector<std::vector<int>> batch;
        const auto n = static_cast<std::size_t>(config.samples_per_op);
        if (policy.proposes()) {
          batch = policy.propose(op, n);
          if (batch.size() > n) throw PolicyError("policy proposed more sequences than requested");
          for (const auto& s : batch)
            if (!model.admissible(s)) throw PolicyError("policy proposed a sequence violating the masks");
        } else {
          SamplerTrie trie;
          batch = sample_unique(trie, model, n, rng);
        }
        for (const auto& s : batch) {
          Outcome o = Outcome::Error;
          if (auto t = try_merge(op, decode(op, ex.pool(), s))) o = ex.add(*t, nullptr);
          count(st, o);
          if (log) {
            log->record({restart, st.iterations, &op, s, o, ex.pool().size(), 1000.0 * seconds_since(t0)});
          }
          if (ex.solution()) {
            ++st.iterations;
            return done(SearchStatus::Solved);
          }
        }
        sync();
      }
      ++st.iterations;
    }
    return done(SearchStatus::Timeout);
  } catch (const PolicyError& e) {
    result.message = e.what();
    return done(SearchStatus::PolicyFailure);
  }
}

SearchResult restart_loop(const Task& task, Policy& policy, const SearchConfig& config, EventLog* log) {
  config.validate();
  const auto t0 = Clock::now();
  SearchResult total;
  for (std::size_t k = 0; config.max_restarts == 0 || k < config.max_restarts; ++k) {
    const double remaining = config.timeout_s - seconds_since(t0);
    if (remaining <= 0) break;
    const double budget = config.restart_iterations ? remaining : std::min(config.restart_interval_s, remaining);
    const std::uint64_t seed = restart_seed(config.seed, k);
    SearchResult r = policy_search(task, policy, config, budget, seed, log, k);
    total.stats += r.stats;
    total.restarts.push_back({k, seed, r.stats, r.status == SearchStatus::Solved});
    if (r.status == SearchStatus::Solved || r.status == SearchStatus::PolicyFailure) {
      total.status = r.status;
      total.solution = r.solution;
      total.message = r.message;
      total.stats.elapsed_s = seconds_since(t0);
      return total;
    }
  }
  total.status = SearchStatus::Timeout;
  total.stats.elapsed_s = seconds_since(t0);
  return total;
}

bool verify(const Term& t, const Task& task) {
  if (t.arity() != 0 || t.is_token()) return false;
  try {
    return Executor(task).evaluate(t) == task.outputs;
  } catch (const ConfigError&) {
    return false;
  }
}

bool check_held_out(const Term& t, const Task& task) {
  if (task.held_out.empty()) return true;
  return verify(t, task.held_out_task());
}

}  // namespace lamsynth
