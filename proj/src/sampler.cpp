#include "lamsynth/sampler.hpp"

#include <numeric>

namespace lamsynth {

// Children are materialised lazily; per-child arrays hold the unconsumed
// absolute probability mass and whether the subtree is used up.
struct SamplerTrie::Node {
  bool expanded = false;
  std::vector<int> tokens;
  std::vector<double> mass;
  std::vector<std::uint8_t> dead;
  std::vector<std::unique_ptr<Node>> child;
  std::size_t live = 0;
};

SamplerTrie::SamplerTrie() : root_(std::make_unique<Node>()) {}
SamplerTrie::~SamplerTrie() = default;
SamplerTrie::SamplerTrie(SamplerTrie&&) noexcept = default;
SamplerTrie& SamplerTrie::operator=(SamplerTrie&&) noexcept = default;

bool SamplerTrie::exhausted() const { return root_->expanded && root_->live == 0; }

double SamplerTrie::remaining_mass() const {
  if (!root_->expanded) return 1.0;
  double m = 0;
  for (std::size_t i = 0; i < root_->mass.size(); ++i)
    if (!root_->dead[i]) m += root_->mass[i];
  return m;
}

bool SamplerTrie::sample(SequenceModel& model, std::mt19937_64& rng, std::vector<int>& out) {
  std::vector<std::pair<Node*, std::size_t>> path;
  std::vector<double> scores;
  std::vector<double> weights;
  if (exhausted()) return false;
  while (true) {
    out.clear();
    path.clear();
    Node* node = root_.get();
    double node_mass = 1.0;
    bool leaf = false;
    while (true) {
      if (!node->expanded) {
        node->expanded = true;
        if (model.complete(out)) {
          leaf = true;
          break;
        }
        ++model_calls_;
        scores.clear();
        node->tokens.clear();
        model.expand(out, node->tokens, scores);
        const std::size_t n = node->tokens.size();
        const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
        node->mass.resize(n);
        for (std::size_t i = 0; i < n; ++i)
          node->mass[i] = node_mass * (total > 0 ? scores[i] / total : 1.0 / static_cast<double>(n));
        node->dead.assign(n, 0);
        node->child.resize(n);
        node->live = n;
      } else if (node->tokens.empty()) {
        leaf = model.complete(out);
        break;
      }
      if (node->live == 0) break;  // dead end
      weights.resize(node->tokens.size());
      double total = 0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = node->dead[i] ? 0.0 : std::max(node->mass[i], 0.0);
        total += weights[i];
      }
      // Live children whose mass underflowed: fall back to uniform.
      if (total <= 0)
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = node->dead[i] ? 0.0 : 1.0;
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      const std::size_t i = pick(rng);
      path.emplace_back(node, i);
      out.push_back(node->tokens[i]);
      node_mass = node->mass[i];
      if (!node->child[i]) node->child[i] = std::make_unique<Node>();
      node = node->child[i].get();
    }
    // Only the empty sequence (or nothing at all) remains at the root.
    if (path.empty()) return leaf;
    // Remove the drawn (or dead-end) subtree's mass from every ancestor.
    const double consumed = path.back().first->mass[path.back().second];
    bool kill = true;
    for (std::size_t d = path.size(); d-- > 0;) {
      auto [p, i] = path[d];
      p->mass[i] -= consumed;
      if (kill && !p->dead[i]) {
        p->dead[i] = 1;
        --p->live;
        p->child[i].reset();
        kill = p->live == 0;
      } else {
        kill = false;
      }
    }
    if (leaf) return true;
    if (exhausted()) return false;
  }
}

std::vector<std::vector<int>> sample_unique(SamplerTrie& trie, SequenceModel& model, std::size_t n,
                                            std::mt19937_64& rng) {
  std::vector<std::vector<int>> out;
  std::vector<int> seq;
  while (out.size() < n && trie.sample(model, rng, seq)) out.push_back(seq);
  return out;
}

}  // namespace lamsynth
