#include "lamsynth/signature.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <set>

namespace lamsynth {
namespace {

// Relevant-object slots of the fixed union layout.
enum class Rel { Bool, Int, List, Length, Distinct, Max, Min, Range, Sum, First, Last };
constexpr std::array<Rel, 11> kRelSlots = {Rel::Bool,     Rel::Int, Rel::List, Rel::Length, Rel::Distinct, Rel::Max,
                                           Rel::Min,      Rel::Range, Rel::Sum, Rel::First,  Rel::Last};
constexpr std::array<Rel, 8> kDerivedSlots = {Rel::Length, Rel::Distinct, Rel::Max,   Rel::Min,
                                              Rel::Range,  Rel::Sum,      Rel::First, Rel::Last};

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::Bool:
      return "x as bool";
    case Rel::Int:
      return "x as int";
    case Rel::List:
      return "x as list";
    case Rel::Length:
      return "len(x)";
    case Rel::Distinct:
      return "distinct(x)";
    case Rel::Max:
      return "max(x)";
    case Rel::Min:
      return "min(x)";
    case Rel::Range:
      return "range(x)";
    case Rel::Sum:
      return "sum(x)";
    case Rel::First:
      return "first(x)";
    case Rel::Last:
      return "last(x)";
  }
  return "?";
}

// Plain data view of a value; derived integers may exceed the DSL range.
struct Obj {
  enum class Type { None, Bool, Int, List } type = Type::None;
  long long scalar = 0;
  std::array<int, Value::kMaxListLength> items{};
  std::size_t size = 0;
};

Obj obj_of(const Value& v) {
  Obj o;
  switch (v.kind()) {
    case Value::Kind::Bool:
      o.type = Obj::Type::Bool;
      o.scalar = v.as_bool();
      break;
    case Value::Kind::Int:
      o.type = Obj::Type::Int;
      o.scalar = v.as_int();
      break;
    case Value::Kind::List:
      o.type = Obj::Type::List;
      o.size = v.size();
      for (std::size_t i = 0; i < v.size(); ++i) o.items[i] = v.at(i);
      break;
    case Value::Kind::Err:
      break;
  }
  return o;
}

Obj int_obj(long long x) {
  Obj o;
  o.type = Obj::Type::Int;
  o.scalar = x;
  return o;
}

long long py_mod(long long a, long long b) {
  const long long r = a % b;
  return r < 0 ? r + b : r;
}

// The object in slot r of x's relevant list, if x provides it.
std::optional<Obj> relevant_slot(const Obj& x, Rel r) {
  switch (r) {
    case Rel::Bool:
      return x.type == Obj::Type::Bool ? std::optional(x) : std::nullopt;
    case Rel::Int:
      return x.type == Obj::Type::Int ? std::optional(x) : std::nullopt;
    case Rel::List:
      return x.type == Obj::Type::List ? std::optional(x) : std::nullopt;
    default:
      break;
  }
  if (x.type != Obj::Type::List) return std::nullopt;
  const auto b = x.items.begin();
  const auto e = x.items.begin() + static_cast<std::ptrdiff_t>(x.size);
  const bool empty = x.size == 0;
  switch (r) {
    case Rel::Length:
      return int_obj(static_cast<long long>(x.size));
    case Rel::Distinct:
      return int_obj(static_cast<long long>(std::set<int>(b, e).size()));
    case Rel::Max:
      return int_obj(empty ? 0 : *std::max_element(b, e));
    case Rel::Min:
      return int_obj(empty ? 0 : *std::min_element(b, e));
    case Rel::Range:
      return int_obj(empty ? 0 : *std::max_element(b, e) - *std::min_element(b, e));
    case Rel::Sum: {
      long long s = 0;
      for (auto it = b; it != e; ++it) s += *it;
      return int_obj(s);
    }
    case Rel::First:
      return int_obj(empty ? 0 : x.items[0]);
    case Rel::Last:
      return int_obj(empty ? 0 : x.items[x.size - 1]);
    default:
      return std::nullopt;
  }
}

Obj::Type slot_type(Rel r) {
  if (r == Rel::Bool) return Obj::Type::Bool;
  if (r == Rel::List) return Obj::Type::List;
  return Obj::Type::Int;
}

// Property name, with an optional numeric suffix.
struct Name {
  const char* text;
  int num = kNoNum;
  static constexpr int kNoNum = -1000000;

  Name(const char* t) : text(t) {}  // NOLINT(google-explicit-constructor)
  Name(const char* t, int n) : text(t), num(n) {}
  std::string str() const { return num == kNoNum ? text : text + std::to_string(num); }
};

// Writers let one traversal produce either tri-states or slot descriptions,
// so the manifest can never drift from the evaluation code. Prefixes are
// passed as callables so the value writer never builds strings.
struct ValueWriter {
  Signature* out;
  template <class F>
  void prop(bool applicable, Name, F&& f) {
    out->push_back(applicable ? (f() ? TriState::True : TriState::False) : TriState::NA);
  }
  template <class P>
  void prefix(P&&) {}
  void pop() {}
};

struct DescWriter {
  std::vector<std::string>* out;
  std::vector<std::string> ctx;
  template <class F>
  void prop(bool, Name name, F&&) {
    std::string s;
    for (const std::string& c : ctx) s += c + " | ";
    out->push_back(s + name.str());
  }
  template <class P>
  void prefix(P&& p) {
    ctx.push_back(p());
  }
  void pop() { ctx.pop_back(); }
};

template <class W>
void write_type(W& w, const SigObject& x) {
  const Value& v = x.value;
  w.prop(true, "type is lambda", [&] { return x.lambda; });
  w.prop(true, "type is bool", [&] { return !x.lambda && v.is_bool(); });
  w.prop(true, "type is int", [&] { return !x.lambda && v.is_int(); });
  w.prop(true, "type is list", [&] { return !x.lambda && v.is_list(); });
  w.prop(true, "type is error", [&] { return !x.lambda && v.is_err(); });
}

template <class W>
void write_basic_bool(W& w, const std::optional<Obj>& x) {
  w.prop(x.has_value(), "bool: x", [&] { return x->scalar != 0; });
}

template <class W>
void write_basic_int(W& w, const std::optional<Obj>& x) {
  const bool a = x.has_value();
  auto v = [&] { return x->scalar; };
  for (int c : {-1, 0, 1, 2}) w.prop(a, Name("int: x == ", c), [&] { return v() == c; });
  w.prop(a, "int: x > 0", [&] { return v() > 0; });
  w.prop(a, "int: x < 0", [&] { return v() < 0; });
  w.prop(a, "int: x even", [&] { return py_mod(v(), 2) == 0; });
  w.prop(a, "int: x % 3 == 0", [&] { return py_mod(v(), 3) == 0; });
  w.prop(a, "int: x % 3 == 1", [&] { return py_mod(v(), 3) == 1; });
  for (int c : {5, 10, 20, 35, 50, 75, 100})
    w.prop(a, Name("int: |x| < ", c), [&] { return (v() < 0 ? -v() : v()) < c; });
}

template <class W>
void write_basic_list(W& w, const std::optional<Obj>& x) {
  const bool a = x.has_value();
  auto span = [&] { return std::span<const int>(x->items.data(), x->size); };
  w.prop(a, "list: sorted", [&] { return std::is_sorted(span().begin(), span().end()); });
  w.prop(a, "list: sorted in reverse",
         [&] { return std::is_sorted(span().rbegin(), span().rend()); });
  w.prop(a, "list: all unique", [&] {
    return std::set<int>(span().begin(), span().end()).size() == x->size;
  });
}

template <class W>
void write_basic(W& w, const std::optional<Obj>& x, Obj::Type type) {
  auto only = [&](Obj::Type t) { return x && x->type == t ? x : std::nullopt; };
  if (type == Obj::Type::None || type == Obj::Type::Bool) write_basic_bool(w, only(Obj::Type::Bool));
  if (type == Obj::Type::None || type == Obj::Type::Int) write_basic_int(w, only(Obj::Type::Int));
  if (type == Obj::Type::None || type == Obj::Type::List) write_basic_list(w, only(Obj::Type::List));
}

bool factor(long long a, long long b) { return a == 0 ? b == 0 : b % a == 0; }

template <class W>
void write_cmp_bool(W& w, const std::optional<Obj>& x, const std::optional<Obj>& y) {
  w.prop(x && y, "bool: x == y", [&] { return x->scalar == y->scalar; });
}

template <class W>
void write_cmp_int(W& w, const std::optional<Obj>& x, const std::optional<Obj>& y) {
  const bool a = x && y;
  auto d = [&] { return x->scalar > y->scalar ? x->scalar - y->scalar : y->scalar - x->scalar; };
  w.prop(a, "int: x == y", [&] { return x->scalar == y->scalar; });
  w.prop(a, "int: x < y", [&] { return x->scalar < y->scalar; });
  w.prop(a, "int: x > y", [&] { return x->scalar > y->scalar; });
  w.prop(a, "int: x is a factor of y", [&] { return factor(x->scalar, y->scalar); });
  w.prop(a, "int: y is a factor of x", [&] { return factor(y->scalar, x->scalar); });
  for (int c : {2, 5, 10, 20}) w.prop(a, Name("int: |x - y| < ", c), [&] { return d() < c; });
}

template <class W>
void write_cmp_list(W& w, const std::optional<Obj>& x, const std::optional<Obj>& y) {
  const bool a = x && y;
  auto xs = [&] { return std::span<const int>(x->items.data(), x->size); };
  auto ys = [&] { return std::span<const int>(y->items.data(), y->size); };
  auto zip_all = [&](auto cmp) {
    const std::size_t n = std::min(x->size, y->size);
    for (std::size_t i = 0; i < n; ++i)
      if (!cmp(x->items[i], y->items[i])) return false;
    return true;
  };
  auto subset = [](std::span<const int> p, std::span<const int> q) {
    const std::set<int> qs(q.begin(), q.end());
    return std::all_of(p.begin(), p.end(), [&](int e) { return qs.count(e) > 0; });
  };
  w.prop(a, "list: x == y", [&] { return std::equal(xs().begin(), xs().end(), ys().begin(), ys().end()); });
  w.prop(a, "list: x longer", [&] { return x->size > y->size; });
  w.prop(a, "list: x shorter", [&] { return x->size < y->size; });
  w.prop(a, "list: same length", [&] { return x->size == y->size; });
  w.prop(a, "list: lengths differ by at most 1",
         [&] { return (x->size > y->size ? x->size - y->size : y->size - x->size) <= 1; });
  w.prop(a, "list: all x_i < y_i", [&] { return zip_all([](int p, int q) { return p < q; }); });
  w.prop(a, "list: all x_i <= y_i", [&] { return zip_all([](int p, int q) { return p <= q; }); });
  w.prop(a, "list: all x_i > y_i", [&] { return zip_all([](int p, int q) { return p > q; }); });
  w.prop(a, "list: all x_i >= y_i", [&] { return zip_all([](int p, int q) { return p >= q; }); });
  w.prop(a, "list: all x_i == y_i", [&] { return zip_all([](int p, int q) { return p == q; }); });
  w.prop(a, "list: all x_i != y_i", [&] { return zip_all([](int p, int q) { return p != q; }); });
  w.prop(a, "list: same element set", [&] { return subset(xs(), ys()) && subset(ys(), xs()); });
  w.prop(a, "list: elements of x within y", [&] { return subset(xs(), ys()); });
  w.prop(a, "list: elements of y within x", [&] { return subset(ys(), xs()); });
}

template <class W>
void write_cmp(W& w, const std::optional<Obj>& x, const std::optional<Obj>& y, Obj::Type type) {
  auto only = [](const std::optional<Obj>& o, Obj::Type t) { return o && o->type == t ? o : std::nullopt; };
  if (type == Obj::Type::None || type == Obj::Type::Bool)
    write_cmp_bool(w, only(x, Obj::Type::Bool), only(y, Obj::Type::Bool));
  if (type == Obj::Type::None || type == Obj::Type::Int)
    write_cmp_int(w, only(x, Obj::Type::Int), only(y, Obj::Type::Int));
  if (type == Obj::Type::None || type == Obj::Type::List)
    write_cmp_list(w, only(x, Obj::Type::List), only(y, Obj::Type::List));
}

std::optional<Obj> opt_obj(const Value& v) {
  if (v.is_err()) return std::nullopt;
  return obj_of(v);
}

template <class W>
void write_object(W& w, const SigObject& x) {
  write_type(w, x);
  const std::optional<Obj> o = x.lambda ? std::nullopt : opt_obj(x.value);
  for (Rel r : kRelSlots) {
    w.prefix([&] { return std::string(rel_name(r)); });
    write_basic(w, o ? relevant_slot(*o, r) : std::nullopt, slot_type(r));
    w.pop();
  }
}

// Relevant objects of x against y, then x against the derived objects of y.
// The self slots of y would repeat the first part, so they are left out.
template <class W>
void write_comparison(W& w, const std::optional<Obj>& x, const std::optional<Obj>& y) {
  for (Rel r : kRelSlots) {
    w.prefix([&] { return std::string(rel_name(r)) + " vs y"; });
    write_cmp(w, x ? relevant_slot(*x, r) : std::nullopt, y, slot_type(r));
    w.pop();
  }
  for (Rel r : kDerivedSlots) {
    w.prefix([&] {
      std::string name = rel_name(r);
      std::replace(name.begin(), name.end(), 'x', 'y');
      return "x vs " + name;
    });
    write_cmp(w, x, y ? relevant_slot(*y, r) : std::nullopt, Obj::Type::Int);
    w.pop();
  }
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> describe(SignatureKind kind) {
  std::vector<std::string> out;
  DescWriter w{&out, {}};
  const SigObject any;
  auto object = [&](const std::string& p) {
    w.prefix([&] { return p; });
    write_object(w, any);
    w.pop();
  };
  auto comparison = [&](const std::string& p) {
    w.prefix([&] { return p; });
    write_comparison(w, std::nullopt, std::nullopt);
    w.pop();
  };
  switch (kind) {
    case SignatureKind::Object:
      write_object(w, any);
      break;
    case SignatureKind::Comparison:
      write_comparison(w, std::nullopt, std::nullopt);
      break;
    case SignatureKind::IO:
      object("output");
      for (std::size_t i = 1; i <= kMaxInputs; ++i) {
        object("input " + std::to_string(i));
        comparison("input " + std::to_string(i) + " vs output");
      }
      break;
    case SignatureKind::Value:
      object("result");
      comparison("result vs output");
      break;
    case SignatureKind::LambdaValue:
      object("result");
      comparison("result vs output");
      comparison("argument 1 vs result");
      comparison("argument 2 vs result");
      break;
  }
  return out;
}

void append_object(Signature& s, const SigObject& x) {
  ValueWriter w{&s};
  write_object(w, x);
}

void append_comparison(Signature& s, const std::optional<Obj>& x, const std::optional<Obj>& y) {
  ValueWriter w{&s};
  write_comparison(w, x, y);
}

void append_na(Signature& s, std::size_t n) { s.insert(s.end(), n, TriState::NA); }

}  // namespace

Signature type_properties(const SigObject& x) {
  Signature s;
  ValueWriter w{&s};
  write_type(w, x);
  return s;
}

Signature basic_properties(const Value& x) {
  Signature s;
  ValueWriter w{&s};
  write_basic(w, opt_obj(x), Obj::Type::None);
  return s;
}

Signature comparison_properties(const Value& x, const Value& y) {
  Signature s;
  ValueWriter w{&s};
  write_cmp(w, opt_obj(x), opt_obj(y), Obj::Type::None);
  return s;
}

std::vector<Value> relevant(const Value& x) {
  if (!x.is_list()) return x.is_err() ? std::vector<Value>{} : std::vector<Value>{x};
  std::vector<Value> out{x};
  const Obj o = obj_of(x);
  for (Rel r : kDerivedSlots) {
    // Derived values are reported unclamped.
    const long long v = relevant_slot(o, r)->scalar;
    out.push_back(Value::in_range(v) ? Value::integer(v) : Value::err());
  }
  return out;
}

Signature object_signature(const SigObject& x) {
  Signature s;
  s.reserve(signature_length(SignatureKind::Object));
  append_object(s, x);
  return s;
}

Signature comparison_signature(const Value& x, const Value& y) {
  Signature s;
  s.reserve(signature_length(SignatureKind::Comparison));
  append_comparison(s, opt_obj(x), opt_obj(y));
  return s;
}

const std::vector<std::string>& layout(SignatureKind kind) {
  static const std::array<std::vector<std::string>, 5> layouts = {
      describe(SignatureKind::Object), describe(SignatureKind::Comparison), describe(SignatureKind::IO),
      describe(SignatureKind::Value), describe(SignatureKind::LambdaValue)};
  return layouts[static_cast<std::size_t>(kind)];
}

std::size_t signature_length(SignatureKind kind) { return layout(kind).size(); }

std::string layout_manifest() {
  static const std::string manifest = [] {
    std::string out = "# property signature layout\nversion 1\n";
    const std::array<std::pair<SignatureKind, const char*>, 5> kinds = {{{SignatureKind::Object, "object"},
                                                                          {SignatureKind::Comparison, "comparison"},
                                                                          {SignatureKind::IO, "io"},
                                                                          {SignatureKind::Value, "value"},
                                                                          {SignatureKind::LambdaValue, "lambda_value"}}};
    for (const auto& [kind, name] : kinds) {
      const auto& l = layout(kind);
      out += "layout " + std::string(name) + " length " + std::to_string(l.size()) + "\n";
      for (std::size_t i = 0; i < l.size(); ++i) out += std::to_string(i) + "\t" + l[i] + "\n";
    }
    return out;
  }();
  return manifest;
}

std::string layout_hash() {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : layout_manifest()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return hex64(h);
}

void SignatureReducer::add(std::span<const TriState> sig) {
  if (sig.size() != applicable_.size()) throw std::invalid_argument("signature length mismatch");
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (sig[i] == TriState::NA) continue;
    ++applicable_[i];
    if (sig[i] == TriState::True) ++truths_[i];
  }
  ++runs_;
}

ReducedSignature SignatureReducer::reduce() const {
  ReducedSignature out(2 * applicable_.size());
  for (std::size_t i = 0; i < applicable_.size(); ++i) {
    const double n = static_cast<double>(runs_);
    out[2 * i] = runs_ ? static_cast<float>(applicable_[i] / n) : 0.0f;
    out[2 * i + 1] = applicable_[i] ? static_cast<float>(static_cast<double>(truths_[i]) / applicable_[i]) : 0.5f;
  }
  return out;
}

ReducedSignature io_signature(const Task& task) {
  const std::size_t len = signature_length(SignatureKind::IO);
  SignatureReducer red(len);
  Signature s;
  for (std::size_t e = 0; e < task.num_examples(); ++e) {
    s.clear();
    const Value& out = task.outputs[e];
    append_object(s, SigObject::of(out));
    for (std::size_t i = 0; i < kMaxInputs; ++i) {
      if (i < task.num_inputs()) {
        const Value& in = task.inputs[i][e];
        append_object(s, SigObject::of(in));
        append_comparison(s, opt_obj(in), opt_obj(out));
      } else {
        append_na(s, signature_length(SignatureKind::Object) + signature_length(SignatureKind::Comparison));
      }
    }
    red.add(s);
  }
  return red.reduce();
}

ReducedSignature value_signature(std::span<const Value> results, const Task& task) {
  SignatureReducer red(signature_length(SignatureKind::Value));
  Signature s;
  for (std::size_t e = 0; e < results.size() && e < task.num_examples(); ++e) {
    s.clear();
    append_object(s, SigObject::of(results[e]));
    append_comparison(s, opt_obj(results[e]), opt_obj(task.outputs[e]));
    red.add(s);
  }
  return red.reduce();
}

ReducedSignature lambda_signature(std::span<const ProbeRun> runs, int arity, const Task& task) {
  SignatureReducer red(signature_length(SignatureKind::LambdaValue));
  Signature s;
  const std::size_t cmp = signature_length(SignatureKind::Comparison);
  for (const ProbeRun& run : runs) {
    s.clear();
    const std::optional<Obj> r = opt_obj(run.result);
    append_object(s, SigObject::of(run.result));
    append_comparison(s, r, opt_obj(task.outputs[run.example]));
    for (int j = 0; j < 2; ++j) {
      if (j < arity && static_cast<std::size_t>(j) < run.args.size())
        append_comparison(s, int_obj(run.args[static_cast<std::size_t>(j)]), r);
      else
        append_na(s, cmp);
    }
    red.add(s);
  }
  return red.reduce();
}

}  // namespace lamsynth
