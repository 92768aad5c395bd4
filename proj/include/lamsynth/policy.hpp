#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lamsynth/dsl.hpp"
#include "lamsynth/pool.hpp"
#include "lamsynth/signature.hpp"
#include "lamsynth/task.hpp"
#include "lamsynth/term.hpp"

namespace lamsynth {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument sequences for an op of arity K: K pool indices, then for each slot
// in order as many variable tokens as that argument's arity. Pool indices are
// nonnegative; variable tokens are v1 = -1, v2 = -2, u1 = -3, u2 = -4.
constexpr int encode_var(VarToken t) { return -1 - static_cast<int>(t); }
std::optional<VarToken> decode_var(int token);

struct StepContext {
  const OpDescriptor* op = nullptr;
  std::span<const int> prefix;
  int slot = 0;           // slot fed by the next token
  bool variable = false;  // next token is a variable token, not an argument
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual bool wants_signatures() const { return false; }

  // Start of a search (every restart). `io` is the task's IO signature.
  virtual void begin(const Task& /*task*/, const ReducedSignature& /*io*/) {}
  // Entries added or improved since the last call, in index order.
  virtual void observe(const ValuePool& /*pool*/, std::span<const std::size_t> /*updated*/) {}
  // Nonnegative finite scores, one per valid token.
  virtual void score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) = 0;

  // Whole-sequence mode: the policy returns up to n sequences itself.
  virtual bool proposes() const { return false; }
  virtual std::vector<std::vector<int>> propose(const OpDescriptor& /*op*/, std::size_t /*n*/) { return {}; }
  virtual void end() {}
};

class UniformPolicy final : public Policy {
 public:
  std::string_view name() const override { return "uniform"; }
  void score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) override;
};

struct HeuristicConfig {
  double temperature = 1.0;
  double weight_penalty = 0.05;
  // Probability given to each variable token offered at an argument position.
  double token_prior = 0.1;
};

// Ranks pool values by how close their signature is to that of the expected
// outputs: score = exp(-L1 / temperature - weight_penalty * weight).
class HeuristicPolicy final : public Policy {
 public:
  explicit HeuristicPolicy(HeuristicConfig config = {}) : config_(config) {}

  std::string_view name() const override { return "heuristic"; }
  bool wants_signatures() const override { return true; }
  void begin(const Task& task, const ReducedSignature& io) override;
  void observe(const ValuePool& pool, std::span<const std::size_t> updated) override;
  void score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) override;

  // Log-score of a pool entry (without the token prior).
  double log_score(std::size_t index) const { return log_scores_.at(index); }

 private:
  HeuristicConfig config_;
  ReducedSignature target_;
  std::vector<double> log_scores_;
  std::vector<bool> is_token_;
};

// Shared slots between a value or lambda signature and the target.
double signature_distance(std::span<const float> a, std::span<const float> b);

// "uniform" or "heuristic"; external policies are created by the wire client.
std::unique_ptr<Policy> make_policy(std::string_view id, const HeuristicConfig& config = {});

}  // namespace lamsynth
