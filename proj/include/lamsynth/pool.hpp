#pragma once

#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

#include "lamsynth/executor.hpp"
#include "lamsynth/signature.hpp"
#include "lamsynth/term.hpp"

namespace lamsynth {

struct ValueEntry {
  Term term;
  ExecutionKey key;  // key.values: per-example results or probe results
  std::optional<ReducedSignature> signature;  // filled on demand

  int weight() const { return term.weight(); }
  FunctionType type() const { return term.type(); }
  bool is_token() const { return term.is_token(); }
};

// Deduplicated store of explored values, in discovery order.
class ValuePool {
 public:
  enum class Insert { Added, Improved, Duplicate };

  // Adds the entry unless an equivalent one exists. A strictly lighter
  // equivalent replaces the stored term in place (keeping its index); the old
  // term is handed back through `displaced`.
  Insert insert(ValueEntry entry, std::size_t* index = nullptr, std::optional<Term>* displaced = nullptr);

  std::size_t size() const { return entries_.size(); }
  const ValueEntry& operator[](std::size_t i) const { return entries_[i]; }
  ValueEntry& at(std::size_t i) { return entries_[i]; }
  std::optional<std::size_t> find(const ExecutionKey& key) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  // The index stores entry positions only; kProbe stands for the key being
  // looked up, so keys are never duplicated in memory.
  static constexpr std::size_t kProbe = static_cast<std::size_t>(-1);
  const ExecutionKey& key_of(std::size_t i) const { return i == kProbe ? *probe_ : entries_[i].key; }

  struct Hash {
    const ValuePool* pool;
    std::size_t operator()(std::size_t i) const { return pool->key_of(i).hash; }
  };
  struct Eq {
    const ValuePool* pool;
    bool operator()(std::size_t a, std::size_t b) const { return pool->key_of(a) == pool->key_of(b); }
  };

  std::deque<ValueEntry> entries_;
  mutable const ExecutionKey* probe_ = nullptr;
  std::unordered_set<std::size_t, Hash, Eq> index_{64, Hash{this}, Eq{this}};

 public:
  ValuePool() = default;
  ValuePool(const ValuePool&) = delete;
  ValuePool& operator=(const ValuePool&) = delete;
};

// Inputs, literals, variable tokens and the identity lambda.
std::vector<Term> initial_terms(const Task& task);

}  // namespace lamsynth
