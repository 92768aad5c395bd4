#pragma once

// Transliteration of the reference Python semantics, kept independent of the
// engine: Python ints, slicing and exceptions, with the range policy applied
// to the final result only.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lamsynth/dsl.hpp"
#include "lamsynth/value.hpp"

namespace oracle {

using List = std::vector<long long>;
using Obj = std::variant<long long, bool, List>;

struct PyError : std::runtime_error {
  PyError() : std::runtime_error("python exception") {}
};

using Fn1 = std::function<Obj(long long)>;
using Fn2 = std::function<Obj(long long, long long)>;

inline long long floordiv(long long a, long long b) {
  if (b == 0) throw PyError();
  long long q = a / b;
  if (q * b != a && ((a < 0) ^ (b < 0))) q -= 1;
  return q;
}

inline long long pymod(long long a, long long b) { return a - b * floordiv(a, b); }

// Python's xs[start:stop] with a step of one.
inline List slice(const List& xs, std::optional<long long> start, std::optional<long long> stop) {
  const long long n = static_cast<long long>(xs.size());
  auto norm = [n](long long i) {
    if (i < 0) i += n;
    return i < 0 ? 0 : (i > n ? n : i);
  };
  const long long a = start ? norm(*start) : 0;
  const long long b = stop ? norm(*stop) : n;
  List out;
  for (long long i = a; i < b; ++i) out.push_back(xs[static_cast<std::size_t>(i)]);
  return out;
}

inline long long index(const List& xs, long long i) {
  const long long n = static_cast<long long>(xs.size());
  if (i < -n || i >= n) throw PyError();
  return xs[static_cast<std::size_t>(i < 0 ? i + n : i)];
}

inline long long as_int(const Obj& o) { return std::get<long long>(o); }
inline bool as_bool(const Obj& o) { return std::get<bool>(o); }

struct Args {
  std::vector<Obj> values;  // plain slots in order
  Fn1 f1;
  Fn2 f2;
};

// Raises PyError for runtime exceptions.
inline Obj run(lamsynth::OpId op, const Args& a) {
  using lamsynth::OpId;
  auto i = [&](std::size_t k) { return as_int(a.values[k]); };
  auto l = [&](std::size_t k) -> const List& { return std::get<List>(a.values[k]); };
  switch (op) {
    case OpId::Add: return i(0) + i(1);
    case OpId::Subtract: return i(0) - i(1);
    case OpId::Multiply: return i(0) * i(1);
    case OpId::IntDivide: return floordiv(i(0), i(1));
    case OpId::Square: return i(0) * i(0);
    case OpId::Min: return i(0) < i(1) ? i(0) : i(1);
    case OpId::Max: return i(0) > i(1) ? i(0) : i(1);
    case OpId::Greater: return i(0) > i(1);
    case OpId::Less: return i(0) < i(1);
    case OpId::Equal: return i(0) == i(1);
    case OpId::IsEven: return pymod(i(0), 2) == 0;
    case OpId::IsOdd: return pymod(i(0), 2) == 1;
    case OpId::If: return as_bool(a.values[0]) ? i(1) : i(2);
    case OpId::Head: return index(l(0), 0);
    case OpId::Last: return index(l(0), -1);
    case OpId::Take: return slice(l(1), std::nullopt, i(0));
    case OpId::Drop: return slice(l(1), i(0), std::nullopt);
    case OpId::Access: return index(l(1), i(0));
    case OpId::Minimum:
    case OpId::Maximum: {
      const List& xs = l(0);
      if (xs.empty()) throw PyError();
      long long m = xs[0];
      for (long long x : xs) m = op == OpId::Minimum ? (x < m ? x : m) : (x > m ? x : m);
      return m;
    }
    case OpId::Reverse: return List(l(0).rbegin(), l(0).rend());
    case OpId::Sort: {
      List xs = l(0);
      // insertion sort, to stay clear of the engine's std::sort
      for (std::size_t p = 1; p < xs.size(); ++p)
        for (std::size_t q = p; q > 0 && xs[q - 1] > xs[q]; --q) std::swap(xs[q - 1], xs[q]);
      return xs;
    }
    case OpId::Sum: {
      long long s = 0;
      for (long long x : l(0)) s += x;
      return s;
    }
    case OpId::Map: {
      List out;
      for (long long x : l(0)) out.push_back(as_int(a.f1(x)));
      return out;
    }
    case OpId::Filter: {
      List out;
      for (long long x : l(0))
        if (as_bool(a.f1(x))) out.push_back(x);
      return out;
    }
    case OpId::Count: {
      long long n = 0;
      for (long long x : l(0))
        if (as_bool(a.f1(x))) ++n;
      return n;
    }
    case OpId::ZipWith: {
      List out;
      const List& xs = l(0);
      const List& ys = l(1);
      for (std::size_t k = 0; k < xs.size() && k < ys.size(); ++k) out.push_back(as_int(a.f2(xs[k], ys[k])));
      return out;
    }
    case OpId::Scanl1: {
      const List& xs = l(0);
      List ys{index(xs, 0)};
      for (std::size_t n = 1; n < xs.size(); ++n) ys.push_back(as_int(a.f2(ys[n - 1], xs[n])));
      return ys;
    }
  }
  throw std::logic_error("unknown op");
}

inline bool admissible(long long x) { return x >= -256 && x <= 255; }

// Result as an engine value: exceptions and range violations become Err.
inline lamsynth::Value evaluate(lamsynth::OpId op, const Args& a) {
  Obj r;
  try {
    r = run(op, a);
  } catch (const PyError&) {
    return lamsynth::Value::err();
  }
  if (auto* b = std::get_if<bool>(&r)) return lamsynth::Value::boolean(*b);
  if (auto* x = std::get_if<long long>(&r)) return admissible(*x) ? lamsynth::Value::integer(*x) : lamsynth::Value::err();
  const List& xs = std::get<List>(r);
  if (xs.size() > 10) return lamsynth::Value::err();
  for (long long x : xs)
    if (!admissible(x)) return lamsynth::Value::err();
  const std::vector<std::int64_t> items(xs.begin(), xs.end());
  return lamsynth::Value::list(items);
}

}  // namespace oracle
