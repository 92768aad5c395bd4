#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace lamsynth {

// Autoregressive model over integer tokens. expand() fills the tokens valid
// after `prefix` and their nonnegative unnormalised scores; an empty token
// set on an incomplete prefix is a dead end.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual bool complete(std::span<const int> prefix) const = 0;
  virtual void expand(std::span<const int> prefix, std::vector<int>& tokens, std::vector<double>& scores) = 0;
};

// Trie for sampling sequences without replacement. Each node keeps the
// probability mass not yet consumed below it; drawn leaves are removed.
class SamplerTrie {
 public:
  SamplerTrie();
  ~SamplerTrie();
  SamplerTrie(SamplerTrie&&) noexcept;
  SamplerTrie& operator=(SamplerTrie&&) noexcept;

  // Draws one unseen sequence, or returns false when none remain.
  bool sample(SequenceModel& model, std::mt19937_64& rng, std::vector<int>& out);
  bool exhausted() const;
  // Probability mass that has not been drawn yet.
  double remaining_mass() const;
  std::size_t model_calls() const { return model_calls_; }

 private:
  struct Node;
  std::unique_ptr<Node> root_;
  std::size_t model_calls_ = 0;
};

std::vector<std::vector<int>> sample_unique(SamplerTrie& trie, SequenceModel& model, std::size_t n,
                                            std::mt19937_64& rng);

}  // namespace lamsynth
