#include "lamsynth/taskgen.hpp"

#include <algorithm>
#include <map>

#include "lamsynth/lambda_term.hpp"
#include "lamsynth/search.hpp"
#include "lamsynth/source.hpp"

namespace lamsynth {
namespace {

struct Candidate {
  Term term;
  std::vector<Value> outputs;
};

// Uniform reservoir of at most `cap` candidates.
struct Reservoir {
  std::vector<Candidate> items;
  std::size_t seen = 0;

  void offer(const Candidate& c, std::size_t cap, std::mt19937_64& rng) {
    ++seen;
    if (items.size() < cap) {
      items.push_back(c);
      return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, seen - 1);
    const std::size_t j = pick(rng);
    if (j < cap) items[j] = c;
  }
};

Value random_value(BaseType type, const GenConfig& c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> element(c.min_element, c.max_element);
  if (type == BaseType::Int) return Value::integer(element(rng));
  std::uniform_int_distribution<std::size_t> length(c.min_list_length, c.max_list_length);
  std::vector<std::int64_t> xs(length(rng));
  for (auto& x : xs) x = element(rng);
  return Value::list(xs);
}

// Random input columns; outputs are placeholders that never match.
Task random_inputs(const GenConfig& c, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> inputs(1, c.max_inputs);
  std::uniform_int_distribution<std::size_t> examples(c.min_examples, c.max_examples);
  std::bernoulli_distribution is_list(0.5);
  Task t;
  const std::size_t n = inputs(rng);
  const std::size_t m = examples(rng);
  bool any_list = false;
  for (std::size_t i = 0; i < n; ++i) {
    // At least one list input: the DSL is list-centric.
    const BaseType type = (i + 1 == n && !any_list) || is_list(rng) ? BaseType::List : BaseType::Int;
    any_list = any_list || type == BaseType::List;
    t.input_names.push_back("x" + std::to_string(i + 1));
    t.input_types.push_back(type);
    std::vector<Value> column;
    for (std::size_t e = 0; e < m; ++e) column.push_back(random_value(type, c, rng));
    t.inputs.push_back(std::move(column));
  }
  t.outputs.assign(m, Value::err());
  return t;
}

std::string type_label(BaseType t) { return std::string(to_string(t)); }

}  // namespace

void GenConfig::validate() const {
  if (min_weight < 1 || max_weight < min_weight) throw ConfigError("bad weight range");
  if (lambda_fraction < 0 || lambda_fraction > 1) throw ConfigError("lambda fraction must lie in [0, 1]");
  if (max_inputs < 1 || max_inputs > 3) throw ConfigError("tasks take 1 to 3 inputs");
  if (min_examples < 1 || max_examples < min_examples) throw ConfigError("bad example count range");
  if (min_list_length > max_list_length || max_list_length > Value::kMaxListLength)
    throw ConfigError("bad list length range");
  if (min_element > max_element || !Value::in_range(min_element) || !Value::in_range(max_element))
    throw ConfigError("bad element range");
  if (tasks_per_search < 1) throw ConfigError("tasks per search must be positive");
  if (search_timeout_s <= 0) throw ConfigError("search timeout must be positive");
}

bool solution_uses_lambda(const Task& task) {
  if (!task.solution) return false;
  return uses_lambda(parse_solution(*task.solution, task.input_type_map()));
}

GenReport generate_tasks(const GenConfig& config) {
  config.validate();
  GenReport report;
  const auto weights = static_cast<std::size_t>(config.max_weight - config.min_weight + 1);
  // Remaining demand per weight (stratified) or in total.
  std::vector<std::size_t> want(weights, config.per_weight);
  std::size_t total_wanted = config.per_weight ? config.per_weight * weights : config.num_tasks;
  std::size_t lambdas = 0;
  std::size_t emitted = 0;

  std::mt19937_64 rng(config.seed);
  for (std::size_t s = 0; s < config.max_searches && emitted < total_wanted; ++s) {
    ++report.searches;
    std::mt19937_64 search_rng(restart_seed(config.seed, s));
    Task probe = random_inputs(config, search_rng);

    // [weight offset][uses lambda]
    std::vector<std::array<Reservoir, 2>> strata(weights);
    SearchConfig sc;
    sc.timeout_s = config.search_timeout_s;
    sc.max_weight = config.max_weight;
    sc.memory_budget_mb = config.memory_budget_mb;
    sc.stop_on_solution = false;
    enumerate(probe, sc, [&](const ValueEntry& e) {
      if (e.term.arity() != 0 || e.is_token() || e.type().result == BaseType::Bool) return true;
      if (e.weight() < config.min_weight || e.weight() > config.max_weight) return true;
      auto& r = strata[static_cast<std::size_t>(e.weight() - config.min_weight)][uses_lambda(e.term) ? 1 : 0];
      r.offer({e.term, e.key.values}, config.tasks_per_search, search_rng);
      return true;
    });

    // Round-robin over weights that still need tasks; each pick follows the
    // lambda quota when both kinds are available.
    std::size_t taken = 0;
    bool progress = true;
    while (progress && taken < config.tasks_per_search && emitted < total_wanted) {
      progress = false;
      for (std::size_t w = 0; w < weights && taken < config.tasks_per_search && emitted < total_wanted; ++w) {
        if (config.per_weight && want[w] == 0) continue;
        auto& pair = strata[w];
        const bool quota_lambda =
            static_cast<double>(lambdas) < config.lambda_fraction * static_cast<double>(emitted + 1) - 0.5;
        int kind = quota_lambda ? 1 : 0;
        if (pair[static_cast<std::size_t>(kind)].items.empty()) kind = 1 - kind;
        auto& bucket = pair[static_cast<std::size_t>(kind)].items;
        if (bucket.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
        const std::size_t j = pick(search_rng);
        Candidate c = std::move(bucket[j]);
        bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(j));

        Task t = probe;
        t.outputs = c.outputs;
        t.solution = to_source(c.term);
        t.name = "synthetic:weight_" + std::to_string(c.term.weight()) + "_function_" + std::to_string(emitted);
        if (config.held_out) t.held_out = generate_held_out(t, rng(), config, config.held_out);
        report.tasks.push_back(std::move(t));
        if (kind == 1) ++lambdas;
        ++emitted;
        ++taken;
        if (config.per_weight) --want[w];
        progress = true;
      }
    }
  }
  if (emitted < total_wanted) {
    if (config.per_weight) {
      for (std::size_t w = 0; w < weights; ++w)
        if (want[w])
          report.warnings.push_back("weight " + std::to_string(config.min_weight + static_cast<int>(w)) + ": " +
                                    std::to_string(want[w]) + " tasks missing");
    } else {
      report.warnings.push_back(std::to_string(total_wanted - emitted) + " tasks missing");
    }
  }
  return report;
}

std::vector<HeldOutCase> generate_held_out(const Task& task, std::uint64_t seed, const GenConfig& config,
                                           std::size_t count) {
  if (!task.solution) throw TaskFormatError("task '" + task.name + "' has no reference solution");
  const Term solution = parse_solution(*task.solution, task.input_type_map());
  std::mt19937_64 rng(seed);
  std::vector<HeldOutCase> out;
  for (int attempt = 0; attempt < 10000 && out.size() < count; ++attempt) {
    Task one;
    one.input_names = task.input_names;
    one.input_types = task.input_types;
    for (BaseType type : task.input_types) one.inputs.push_back({random_value(type, config, rng)});
    one.outputs.assign(1, Value::err());
    const Value r = Executor(one).evaluate(solution)[0];
    if (r.is_err()) continue;
    HeldOutCase c;
    for (const auto& column : one.inputs) c.inputs.push_back(column[0]);
    c.output = r;
    out.push_back(std::move(c));
  }
  if (out.size() < count)
    throw TaskFormatError("could not find " + std::to_string(count) + " held-out inputs for '" + task.name + "' (" +
                          type_label(solution.type().result) + " solution)");
  return out;
}

std::vector<Task> dedup_against_eval(const std::vector<Task>& train, const std::vector<Task>& eval) {
  std::vector<Task> kept;
  for (const Task& t : train) {
    bool solves = false;
    if (t.solution) {
      for (const Task& e : eval) {
        try {
          if (verify(parse_solution(*t.solution, e.input_type_map()), e)) {
            solves = true;
            break;
          }
        } catch (const ParseError&) {
          // Mentions inputs the eval task does not have.
        }
      }
    }
    if (!solves) kept.push_back(t);
  }
  return kept;
}

}  // namespace lamsynth
