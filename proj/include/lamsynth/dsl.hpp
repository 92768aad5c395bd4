#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>

#include "lamsynth/value.hpp"

namespace lamsynth {

enum class OpId : std::uint8_t {
  // first-order
  Add,
  Subtract,
  Multiply,
  IntDivide,
  Square,
  Min,
  Max,
  Greater,
  Less,
  Equal,
  IsEven,
  IsOdd,
  If,
  Head,
  Last,
  Take,
  Drop,
  Access,
  Minimum,
  Maximum,
  Reverse,
  Sort,
  Sum,
  // higher-order
  Map,
  Filter,
  Count,
  ZipWith,
  Scanl1,
};

inline constexpr std::size_t kNumOps = 28;
inline constexpr std::size_t kMaxOpArity = 3;

struct OpDescriptor {
  OpId id;
  std::string_view name;
  int arity;
  // Slot k expects a value of type slots[k]; slots[k].arity is the number of
  // Int parameters of the callback the slot receives (0 for plain values).
  std::array<FunctionType, kMaxOpArity> slots;
  BaseType result;

  bool higher_order() const;
  int slot_arity(int k) const { return slots[static_cast<std::size_t>(k)].arity; }
  std::span<const FunctionType> slot_types() const {
    return {slots.data(), static_cast<std::size_t>(arity)};
  }
};

// All 28 operations in a fixed order: the 23 first-order ops followed by the 5
// higher-order ones.
std::span<const OpDescriptor> op_table();
const OpDescriptor& descriptor(OpId id);
std::optional<OpId> find_op(std::string_view name);

// The integer literal atoms.
inline constexpr std::array<int, 6> kLiterals = {-1, 0, 1, 2, 3, 4};
bool is_literal(std::int64_t v);

// Non-owning reference to a callable used for function-valued op arguments.
// A callback returning Err makes the whole application Err.
class Callback {
 public:
  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, Callback>)
  Callback(F& f)  // NOLINT(google-explicit-constructor)
      : obj_(static_cast<void*>(&f)), call_([](void* o, std::span<const int> args) {
          return (*static_cast<F*>(o))(args);
        }) {}

  Value operator()(std::span<const int> args) const { return call_(obj_, args); }

 private:
  void* obj_;
  Value (*call_)(void*, std::span<const int>);
};

// One argument to apply_op: a plain value, or a callback for function slots.
struct OpArg {
  const Value* value = nullptr;
  const Callback* fn = nullptr;
};

// Reference semantics of every operation. Never throws: any runtime failure
// (empty list access, bad index, division by zero, callback error) or a result
// outside the range policy yields Err.
Value apply_op(const OpDescriptor& op, std::span<const OpArg> args);

}  // namespace lamsynth
