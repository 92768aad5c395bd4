#include "lamsynth/value.hpp"

#include <algorithm>

namespace lamsynth {

std::string_view to_string(BaseType type) {
  switch (type) {
    case BaseType::Int:
      return "int";
    case BaseType::Bool:
      return "bool";
    case BaseType::List:
      return "list";
  }
  return "?";
}

std::string to_string(const FunctionType& type) {
  if (type.arity == 0) return std::string(to_string(type.result));
  std::string out = "(";
  for (int i = 0; i < type.arity; ++i) out += i ? ", int" : "int";
  out += ") -> ";
  out += to_string(type.result);
  return out;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.scalar_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t x) {
  if (!in_range(x)) return err();
  Value v;
  v.kind_ = Kind::Int;
  v.scalar_ = static_cast<std::int16_t>(x);
  return v;
}

Value Value::list(std::span<const std::int64_t> items) {
  if (items.size() > kMaxListLength) return err();
  Value v;
  v.kind_ = Kind::List;
  v.size_ = static_cast<std::uint8_t>(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!in_range(items[i])) return err();
    v.items_[i] = static_cast<std::int16_t>(items[i]);
  }
  return v;
}

Value Value::list(std::initializer_list<std::int64_t> items) {
  return list(std::span<const std::int64_t>(items.begin(), items.size()));
}

bool Value::has_type(BaseType t) const {
  switch (t) {
    case BaseType::Int:
      return is_int();
    case BaseType::Bool:
      return is_bool();
    case BaseType::List:
      return is_list();
  }
  return false;
}

std::vector<std::int64_t> Value::items() const {
  return std::vector<std::int64_t>(items_.begin(), items_.begin() + size_);
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Err:
      return true;
    case Value::Kind::Int:
    case Value::Kind::Bool:
      return a.scalar_ == b.scalar_;
    case Value::Kind::List:
      return a.size_ == b.size_ &&
             std::equal(a.items_.begin(), a.items_.begin() + a.size_, b.items_.begin());
  }
  return false;
}

std::size_t Value::hash() const {
  // FNV-1a over the logical payload.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(kind_));
  if (kind_ == Kind::List) {
    mix(size_);
    for (std::size_t i = 0; i < size_; ++i) mix(static_cast<std::uint16_t>(items_[i]));
  } else if (kind_ != Kind::Err) {
    mix(static_cast<std::uint16_t>(scalar_));
  }
  return static_cast<std::size_t>(h);
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Err:
      return "None";
    case Kind::Bool:
      return scalar_ ? "True" : "False";
    case Kind::Int:
      return std::to_string(scalar_);
    case Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < size_; ++i) {
        if (i) out += ", ";
        out += std::to_string(items_[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

std::size_t hash_values(std::span<const Value> values, std::size_t seed) {
  std::size_t h = seed ^ 0x9e3779b97f4a7c15ull;
  for (const Value& v : values) h = (h ^ v.hash()) * 0x100000001b3ull + (h >> 29);
  return h;
}

}  // namespace lamsynth
