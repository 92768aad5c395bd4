#include "lamsynth/policy.hpp"

#include <algorithm>
#include <cmath>

namespace lamsynth {

std::optional<VarToken> decode_var(int token) {
  if (token >= 0 || token < -4) return std::nullopt;
  return static_cast<VarToken>(-1 - token);
}

void UniformPolicy::score(const StepContext&, std::span<const int> valid, std::vector<double>& scores) {
  scores.assign(valid.size(), valid.empty() ? 0.0 : 1.0 / static_cast<double>(valid.size()));
}

double signature_distance(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) d += std::fabs(static_cast<double>(a[i]) - b[i]);
  return d;
}

void HeuristicPolicy::begin(const Task& task, const ReducedSignature&) {
  target_ = value_signature(task.outputs, task);
  log_scores_.clear();
  is_token_.clear();
}

void HeuristicPolicy::observe(const ValuePool& pool, std::span<const std::size_t> updated) {
  if (log_scores_.size() < pool.size()) {
    log_scores_.resize(pool.size(), 0.0);
    is_token_.resize(pool.size(), false);
  }
  for (std::size_t i : updated) {
    const ValueEntry& e = pool[i];
    is_token_[i] = e.is_token();
    const double penalty = config_.weight_penalty * e.weight();
    if (!e.signature) {
      log_scores_[i] = -penalty;
      continue;
    }
    log_scores_[i] = -signature_distance(*e.signature, target_) / config_.temperature - penalty;
  }
}

void HeuristicPolicy::score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) {
  scores.assign(valid.size(), 1.0);
  if (ctx.variable || valid.empty()) return;
  auto is_value = [&](int t) {
    const auto i = static_cast<std::size_t>(t);
    return t >= 0 && i < log_scores_.size() && !is_token_[i];
  };
  std::size_t tokens = 0;
  double best = -INFINITY;
  for (int t : valid) {
    if (is_value(t))
      best = std::max(best, log_scores_[static_cast<std::size_t>(t)]);
    else
      ++tokens;
  }
  const double token_mass = config_.token_prior * static_cast<double>(tokens);
  if (tokens == valid.size() || token_mass >= 1.0) {
    for (std::size_t i = 0; i < valid.size(); ++i) scores[i] = is_value(valid[i]) ? 0.0 : 1.0;
    return;
  }
  double total = 0;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!is_value(valid[i])) continue;
    scores[i] = std::exp(log_scores_[static_cast<std::size_t>(valid[i])] - best);
    total += scores[i];
  }
  const double scale = (1.0 - token_mass) / total;
  for (std::size_t i = 0; i < valid.size(); ++i)
    scores[i] = is_value(valid[i]) ? scores[i] * scale : config_.token_prior;
}

std::unique_ptr<Policy> make_policy(std::string_view id, const HeuristicConfig& config) {
  if (id == "uniform") return std::make_unique<UniformPolicy>();
  if (id == "heuristic") return std::make_unique<HeuristicPolicy>(config);
  return nullptr;
}

}  // namespace lamsynth
