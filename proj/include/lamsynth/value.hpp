#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lamsynth {

enum class BaseType : std::uint8_t { Int, Bool, List };

std::string_view to_string(BaseType type);

// Type of a term or of an operation slot. Lambda parameters are always Int,
// so a function type is fully described by its arity and result type.
struct FunctionType {
  int arity = 0;
  BaseType result = BaseType::Int;

  bool operator==(const FunctionType&) const = default;
};

std::string to_string(const FunctionType& type);

// A runtime result: Int, Bool, List of ints, or the error sentinel.
//
// Admissible values satisfy the DSL range policy: integers in [-256, 255] and
// lists of length at most 10. Constructors that receive out-of-range data
// return Err instead, so an admissible-looking Value never escapes the range.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, List, Err };

  static constexpr int kMinInt = -256;
  static constexpr int kMaxInt = 255;
  static constexpr std::size_t kMaxListLength = 10;

  Value() = default;  // Err

  static Value err() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t v);
  static Value list(std::span<const std::int64_t> items);
  static Value list(std::initializer_list<std::int64_t> items);

  static bool in_range(std::int64_t v) { return v >= kMinInt && v <= kMaxInt; }

  Kind kind() const { return kind_; }
  bool is_err() const { return kind_ == Kind::Err; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_list() const { return kind_ == Kind::List; }
  bool has_type(BaseType t) const;

  int as_int() const { return scalar_; }
  bool as_bool() const { return scalar_ != 0; }
  std::size_t size() const { return size_; }
  int at(std::size_t i) const { return items_[i]; }
  std::vector<std::int64_t> items() const;

  std::size_t hash() const;
  // Python-like rendering: 7, True, [1, 2], None.
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::Err;
  std::uint8_t size_ = 0;
  std::int16_t scalar_ = 0;
  std::array<std::int16_t, kMaxListLength> items_{};
};

std::size_t hash_values(std::span<const Value> values, std::size_t seed = 0);

}  // namespace lamsynth
