#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lamsynth/executor.hpp"
#include "lamsynth/task.hpp"
#include "lamsynth/value.hpp"

namespace lamsynth {

enum class TriState : std::uint8_t { False = 0, True = 1, NA = 2 };

using Signature = std::vector<TriState>;
// Interleaved (fraction applicable, fraction true) per tri-state slot.
using ReducedSignature = std::vector<float>;

inline constexpr std::size_t kMaxInputs = 3;
inline constexpr std::size_t kTypeProperties = 5;
inline constexpr std::size_t kBasicProperties = 20;
inline constexpr std::size_t kComparisonProperties = 24;

// What a signature describes: a runtime value or a lambda.
struct SigObject {
  bool lambda = false;
  Value value;

  static SigObject of(const Value& v) { return {false, v}; }
  static SigObject of_lambda() { return {true, Value::err()}; }
};

Signature type_properties(const SigObject& x);
Signature basic_properties(const Value& x);
Signature comparison_properties(const Value& x, const Value& y);
// Ints and bools map to themselves; lists to themselves plus length,
// number of distinct elements, max, min, range, sum, first and last
// (each 0 for the empty list).
std::vector<Value> relevant(const Value& x);

Signature object_signature(const SigObject& x);
Signature comparison_signature(const Value& x, const Value& y);

enum class SignatureKind { Object, Comparison, IO, Value, LambdaValue };

std::size_t signature_length(SignatureKind kind);
// Human-readable description of every slot, in layout order.
const std::vector<std::string>& layout(SignatureKind kind);
std::string layout_manifest();
std::string layout_hash();

class SignatureReducer {
 public:
  explicit SignatureReducer(std::size_t length) : applicable_(length, 0), truths_(length, 0) {}
  void add(std::span<const TriState> sig);
  ReducedSignature reduce() const;
  std::size_t runs() const { return runs_; }

 private:
  std::vector<std::uint32_t> applicable_;
  std::vector<std::uint32_t> truths_;
  std::size_t runs_ = 0;
};

ReducedSignature io_signature(const Task& task);
// Arity-0 value: per example object_signature(r) ++ comparison_signature(r, O).
ReducedSignature value_signature(std::span<const Value> results, const Task& task);
// Lambda: per probe run additionally comparison_signature(t_ij, r_i), j <= 2.
ReducedSignature lambda_signature(std::span<const ProbeRun> runs, int arity, const Task& task);

}  // namespace lamsynth
