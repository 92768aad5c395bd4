#include "lamsynth/pool.hpp"

namespace lamsynth {

ValuePool::Insert ValuePool::insert(ValueEntry entry, std::size_t* index, std::optional<Term>* displaced) {
  probe_ = &entry.key;
  auto it = index_.find(kProbe);
  if (it != index_.end()) {
    if (index) *index = *it;
    ValueEntry& old = entries_[*it];
    if (entry.weight() < old.weight()) {
      std::swap(old.term, entry.term);
      if (displaced) *displaced = std::move(entry.term);
      return Insert::Improved;
    }
    return Insert::Duplicate;
  }
  const std::size_t i = entries_.size();
  entries_.push_back(std::move(entry));
  index_.insert(i);
  if (index) *index = i;
  return Insert::Added;
}

std::optional<std::size_t> ValuePool::find(const ExecutionKey& key) const {
  probe_ = &key;
  auto it = index_.find(kProbe);
  if (it == index_.end()) return std::nullopt;
  return *it;
}

std::vector<Term> initial_terms(const Task& task) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < task.num_inputs(); ++i) out.push_back(Term::input(task.input_names[i], task.input_types[i]));
  for (int c : kLiterals) out.push_back(Term::literal(c));
  for (VarToken t : kAllTokens) out.push_back(Term::token(t));
  out.push_back(Term::identity());
  return out;
}

}  // namespace lamsynth
