#include "lamsynth/dsl.hpp"

#include <algorithm>

namespace lamsynth {
namespace {

constexpr FunctionType kInt{0, BaseType::Int};
constexpr FunctionType kBool{0, BaseType::Bool};
constexpr FunctionType kList{0, BaseType::List};
constexpr FunctionType kIntToInt{1, BaseType::Int};
constexpr FunctionType kIntToBool{1, BaseType::Bool};
constexpr FunctionType kIntIntToInt{2, BaseType::Int};

constexpr std::array<OpDescriptor, kNumOps> kOps = {{
    {OpId::Add, "Add", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::Subtract, "Subtract", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::Multiply, "Multiply", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::IntDivide, "IntDivide", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::Square, "Square", 1, {kInt, {}, {}}, BaseType::Int},
    {OpId::Min, "Min", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::Max, "Max", 2, {kInt, kInt, {}}, BaseType::Int},
    {OpId::Greater, "Greater", 2, {kInt, kInt, {}}, BaseType::Bool},
    {OpId::Less, "Less", 2, {kInt, kInt, {}}, BaseType::Bool},
    {OpId::Equal, "Equal", 2, {kInt, kInt, {}}, BaseType::Bool},
    {OpId::IsEven, "IsEven", 1, {kInt, {}, {}}, BaseType::Bool},
    {OpId::IsOdd, "IsOdd", 1, {kInt, {}, {}}, BaseType::Bool},
    {OpId::If, "If", 3, {kBool, kInt, kInt}, BaseType::Int},
    {OpId::Head, "Head", 1, {kList, {}, {}}, BaseType::Int},
    {OpId::Last, "Last", 1, {kList, {}, {}}, BaseType::Int},
    {OpId::Take, "Take", 2, {kInt, kList, {}}, BaseType::List},
    {OpId::Drop, "Drop", 2, {kInt, kList, {}}, BaseType::List},
    {OpId::Access, "Access", 2, {kInt, kList, {}}, BaseType::Int},
    {OpId::Minimum, "Minimum", 1, {kList, {}, {}}, BaseType::Int},
    {OpId::Maximum, "Maximum", 1, {kList, {}, {}}, BaseType::Int},
    {OpId::Reverse, "Reverse", 1, {kList, {}, {}}, BaseType::List},
    {OpId::Sort, "Sort", 1, {kList, {}, {}}, BaseType::List},
    {OpId::Sum, "Sum", 1, {kList, {}, {}}, BaseType::Int},
    {OpId::Map, "Map", 2, {kIntToInt, kList, {}}, BaseType::List},
    {OpId::Filter, "Filter", 2, {kIntToBool, kList, {}}, BaseType::List},
    {OpId::Count, "Count", 2, {kIntToBool, kList, {}}, BaseType::Int},
    {OpId::ZipWith, "ZipWith", 3, {kIntIntToInt, kList, kList}, BaseType::List},
    {OpId::Scanl1, "Scanl1", 2, {kIntIntToInt, kList, {}}, BaseType::List},
}};

// Python floor division and modulo.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t py_mod(std::int64_t a, std::int64_t b) { return a - b * floor_div(a, b); }

// Python slice bound normalisation for xs[:n] / xs[n:].
std::size_t slice_bound(std::int64_t n, std::size_t len) {
  const auto l = static_cast<std::int64_t>(len);
  if (n < 0) n += l;
  return static_cast<std::size_t>(std::clamp<std::int64_t>(n, 0, l));
}

class ListBuf {
 public:
  void push(std::int64_t v) { items_[size_++] = v; }
  Value value() const { return Value::list(std::span<const std::int64_t>(items_.data(), size_)); }

 private:
  std::array<std::int64_t, Value::kMaxListLength> items_{};
  std::size_t size_ = 0;
};

}  // namespace

bool OpDescriptor::higher_order() const {
  return std::any_of(slots.begin(), slots.begin() + arity, [](const FunctionType& t) { return t.arity > 0; });
}

std::span<const OpDescriptor> op_table() { return kOps; }

const OpDescriptor& descriptor(OpId id) { return kOps[static_cast<std::size_t>(id)]; }

std::optional<OpId> find_op(std::string_view name) {
  for (const auto& op : kOps)
    if (op.name == name) return op.id;
  return std::nullopt;
}

bool is_literal(std::int64_t v) {
  return std::find(kLiterals.begin(), kLiterals.end(), v) != kLiterals.end();
}

Value apply_op(const OpDescriptor& op, std::span<const OpArg> args) {
  if (args.size() != static_cast<std::size_t>(op.arity)) return Value::err();
  for (int k = 0; k < op.arity; ++k) {
    const FunctionType& slot = op.slots[static_cast<std::size_t>(k)];
    const OpArg& a = args[static_cast<std::size_t>(k)];
    if (slot.arity > 0) {
      if (a.fn == nullptr) return Value::err();
    } else if (a.value == nullptr || !a.value->has_type(slot.result)) {
      return Value::err();
    }
  }
  auto int_arg = [&](std::size_t k) -> std::int64_t { return args[k].value->as_int(); };
  auto list_arg = [&](std::size_t k) -> const Value& { return *args[k].value; };

  switch (op.id) {
    case OpId::Add:
      return Value::integer(int_arg(0) + int_arg(1));
    case OpId::Subtract:
      return Value::integer(int_arg(0) - int_arg(1));
    case OpId::Multiply:
      return Value::integer(int_arg(0) * int_arg(1));
    case OpId::IntDivide:
      if (int_arg(1) == 0) return Value::err();
      return Value::integer(floor_div(int_arg(0), int_arg(1)));
    case OpId::Square:
      return Value::integer(int_arg(0) * int_arg(0));
    case OpId::Min:
      return Value::integer(std::min(int_arg(0), int_arg(1)));
    case OpId::Max:
      return Value::integer(std::max(int_arg(0), int_arg(1)));
    case OpId::Greater:
      return Value::boolean(int_arg(0) > int_arg(1));
    case OpId::Less:
      return Value::boolean(int_arg(0) < int_arg(1));
    case OpId::Equal:
      return Value::boolean(int_arg(0) == int_arg(1));
    case OpId::IsEven:
      return Value::boolean(py_mod(int_arg(0), 2) == 0);
    case OpId::IsOdd:
      return Value::boolean(py_mod(int_arg(0), 2) == 1);
    case OpId::If:
      return args[0].value->as_bool() ? *args[1].value : *args[2].value;
    case OpId::Head: {
      const Value& xs = list_arg(0);
      return xs.size() == 0 ? Value::err() : Value::integer(xs.at(0));
    }
    case OpId::Last: {
      const Value& xs = list_arg(0);
      return xs.size() == 0 ? Value::err() : Value::integer(xs.at(xs.size() - 1));
    }
    case OpId::Take: {
      const Value& xs = list_arg(1);
      const std::size_t end = slice_bound(int_arg(0), xs.size());
      ListBuf out;
      for (std::size_t i = 0; i < end; ++i) out.push(xs.at(i));
      return out.value();
    }
    case OpId::Drop: {
      const Value& xs = list_arg(1);
      const std::size_t begin = slice_bound(int_arg(0), xs.size());
      ListBuf out;
      for (std::size_t i = begin; i < xs.size(); ++i) out.push(xs.at(i));
      return out.value();
    }
    case OpId::Access: {
      const Value& xs = list_arg(1);
      std::int64_t n = int_arg(0);
      const auto len = static_cast<std::int64_t>(xs.size());
      if (n < 0) n += len;
      if (n < 0 || n >= len) return Value::err();
      return Value::integer(xs.at(static_cast<std::size_t>(n)));
    }
    case OpId::Minimum:
    case OpId::Maximum: {
      const Value& xs = list_arg(0);
      if (xs.size() == 0) return Value::err();
      int best = xs.at(0);
      for (std::size_t i = 1; i < xs.size(); ++i)
        best = op.id == OpId::Minimum ? std::min(best, xs.at(i)) : std::max(best, xs.at(i));
      return Value::integer(best);
    }
    case OpId::Reverse: {
      const Value& xs = list_arg(0);
      ListBuf out;
      for (std::size_t i = xs.size(); i-- > 0;) out.push(xs.at(i));
      return out.value();
    }
    case OpId::Sort: {
      auto items = list_arg(0).items();
      std::sort(items.begin(), items.end());
      return Value::list(items);
    }
    case OpId::Sum: {
      const Value& xs = list_arg(0);
      std::int64_t s = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) s += xs.at(i);
      return Value::integer(s);
    }
    case OpId::Map: {
      const Value& xs = list_arg(1);
      ListBuf out;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const int arg = xs.at(i);
        const Value r = (*args[0].fn)(std::span<const int>(&arg, 1));
        if (!r.is_int()) return Value::err();
        out.push(r.as_int());
      }
      return out.value();
    }
    case OpId::Filter:
    case OpId::Count: {
      const Value& xs = list_arg(1);
      ListBuf out;
      std::int64_t count = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const int arg = xs.at(i);
        const Value r = (*args[0].fn)(std::span<const int>(&arg, 1));
        if (!r.is_bool()) return Value::err();
        if (r.as_bool()) {
          out.push(arg);
          ++count;
        }
      }
      return op.id == OpId::Filter ? out.value() : Value::integer(count);
    }
    case OpId::ZipWith: {
      const Value& xs = list_arg(1);
      const Value& ys = list_arg(2);
      ListBuf out;
      const std::size_t n = std::min(xs.size(), ys.size());
      for (std::size_t i = 0; i < n; ++i) {
        const std::array<int, 2> pair = {xs.at(i), ys.at(i)};
        const Value r = (*args[0].fn)(pair);
        if (!r.is_int()) return Value::err();
        out.push(r.as_int());
      }
      return out.value();
    }
    case OpId::Scanl1: {
      const Value& xs = list_arg(1);
      if (xs.size() == 0) return Value::err();
      ListBuf out;
      int acc = xs.at(0);
      out.push(acc);
      for (std::size_t i = 1; i < xs.size(); ++i) {
        const std::array<int, 2> pair = {acc, xs.at(i)};
        const Value r = (*args[0].fn)(pair);
        if (!r.is_int()) return Value::err();
        acc = r.as_int();
        out.push(acc);
      }
      return out.value();
    }
  }
  return Value::err();
}

}  // namespace lamsynth
