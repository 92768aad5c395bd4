#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lamsynth/bench.hpp"
#include "lamsynth/executor.hpp"
#include "lamsynth/lambda_term.hpp"
#include "lamsynth/search.hpp"
#include "lamsynth/signature.hpp"
#include "lamsynth/source.hpp"
#include "lamsynth/taskgen.hpp"
#include "lamsynth/wire.hpp"

namespace fs = std::filesystem;
using namespace lamsynth;

namespace {

enum Exit { kOk = 0, kTimeout = 2, kConfig = 3, kPolicy = 4, kIo = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchFlags {
  std::string method = "enumerate";
  std::string policy = "heuristic";
  std::string endpoint;
  double timeout = 600;
  double restart_interval = 6;
  int samples = 10;
  int max_weight = 20;
  std::uint64_t seed = 0;
  std::size_t memory_mb = 2048;
  std::uint64_t restart_iterations = 0;
  std::size_t max_restarts = 0;
  double temperature = 1.0;
  double weight_penalty = 0.05;
  double token_prior = 0.1;
  double policy_timeout = 30;

  void add_to(CLI::App& app) {
    app.add_option("--method", method, "enumerate or policy")->check(CLI::IsMember({"enumerate", "policy"}));
    app.add_option("--policy", policy, "uniform, heuristic or external")
        ->check(CLI::IsMember({"uniform", "heuristic", "external"}));
    app.add_option("--endpoint", endpoint, "host:port of an external policy server")
        ->envname("LAMSYNTH_POLICY_ENDPOINT");
    app.add_option("--timeout", timeout, "wall-clock limit per task in seconds");
    app.add_option("--restart-interval", restart_interval, "seconds between restarts (policy method)");
    app.add_option("--samples", samples, "argument lists sampled per op and iteration");
    app.add_option("--max-weight", max_weight, "enumeration weight limit");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--memory-mb", memory_mb, "estimated pool size at which enumeration stops storing values");
    app.add_option("--restart-iterations", restart_iterations,
                   "iterations per restart instead of the interval (0: use the interval)");
    app.add_option("--max-restarts", max_restarts, "restart limit (0: until timeout)");
    app.add_option("--temperature", temperature, "heuristic policy temperature");
    app.add_option("--weight-penalty", weight_penalty, "heuristic policy penalty per weight unit");
    app.add_option("--token-prior", token_prior, "heuristic policy probability of each bare variable token");
    app.add_option("--policy-timeout", policy_timeout, "seconds to wait for an external policy reply");
  }

  SearchConfig config() const {
    SearchConfig c;
    c.timeout_s = timeout;
    c.restart_interval_s = restart_interval;
    c.samples_per_op = samples;
    c.max_weight = max_weight;
    c.seed = seed;
    c.policy_id = policy;
    c.memory_budget_mb = memory_mb;
    c.restart_iterations = restart_iterations;
    c.max_restarts = max_restarts;
    c.validate();
    if (c.timeout_s <= 0) throw ConfigError("timeout must be positive");
    return c;
  }

  HeuristicConfig heuristic() const {
    if (!(temperature > 0)) throw ConfigError("temperature must be positive");
    return {temperature, weight_penalty, token_prior};
  }

  std::unique_ptr<Policy> make() const {
    if (policy == "external") {
      if (endpoint.empty()) throw ConfigError("external policy needs --endpoint or LAMSYNTH_POLICY_ENDPOINT");
      return std::make_unique<ExternalPolicy>(Endpoint::parse(endpoint), policy_timeout);
    }
    return make_policy(policy, heuristic());
  }
};

std::vector<Task> read_tasks(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file or directory: " + path);
  try {
    return load_tasks(path);
  } catch (const TaskFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// "x:list,f:int"
InputTypes parse_input_types(const std::string& text) {
  InputTypes out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("input types look like name:type, got '" + item + "'");
    const std::string name = item.substr(0, colon);
    const std::string type = item.substr(colon + 1);
    if (type == "int")
      out[name] = BaseType::Int;
    else if (type == "list")
      out[name] = BaseType::List;
    else if (type == "bool")
      out[name] = BaseType::Bool;
    else
      throw ConfigError("unknown type '" + type + "'");
  }
  return out;
}

// "3..6" or "5"
std::pair<int, int> parse_range(const std::string& text) {
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      const int w = std::stoi(text);
      return {w, w};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError("weight range looks like 3..6, got '" + text + "'");
  }
}

std::string seconds(double s, bool redact) {
  if (redact) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

int cmd_solve(const std::string& task_path, const SearchFlags& flags, const std::string& events_path,
              bool redact) {
  const SearchConfig config = flags.config();
  std::vector<Task> tasks = read_tasks(task_path);
  if (tasks.size() != 1) throw ConfigError("solve takes exactly one task file");
  const Task& task = tasks.front();

  std::ofstream events_file;
  std::optional<EventLog> log;
  if (!events_path.empty()) {
    events_file.open(events_path);
    if (!events_file) throw IoError("cannot write " + events_path);
    log.emplace(events_file, !redact);
  }

  SearchResult r;
  if (flags.method == "enumerate") {
    r = enumerate(task, config);
  } else {
    std::unique_ptr<Policy> policy = flags.make();
    r = restart_loop(task, *policy, config, log ? &*log : nullptr);
  }
  std::cout << "task: " << task.name << "\n";
  std::cout << "status: " << to_string(r.status) << "\n";
  std::cout << "elapsed_s: " << seconds(r.stats.elapsed_s, redact) << "\n";
  std::cout << "candidates: " << r.stats.candidates << "\n";
  std::cout << "pool_size: " << r.stats.pool_size << "\n";
  if (flags.method == "policy") std::cout << "restarts: " << r.restarts.size() << "\n";
  if (r.status == SearchStatus::PolicyFailure) {
    std::cerr << "policy error: " << r.message << "\n";
    return kPolicy;
  }
  if (r.status != SearchStatus::Solved || !r.solution) return kTimeout;
  std::cout << "solution: " << to_source(*r.solution) << "\n";
  std::cout << "simplified: " << simplify(*r.solution) << "\n";
  std::cout << "weight: " << r.solution->weight() << "\n";
  if (!task.held_out.empty())
    std::cout << "held_out: " << (check_held_out(*r.solution, task) ? "pass" : "fail") << "\n";
  return kOk;
}

int cmd_gen_data(GenConfig config, const std::string& weights, const std::string& out_dir,
                 const std::string& eval_path) {
  const auto [lo, hi] = parse_range(weights);
  config.min_weight = lo;
  config.max_weight = hi;
  config.validate();
  std::vector<Task> eval;
  if (!eval_path.empty()) eval = read_tasks(eval_path);
  ensure_dir(out_dir);
  GenReport report = generate_tasks(config);
  std::vector<Task> tasks = eval.empty() ? report.tasks : dedup_against_eval(report.tasks, eval);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "task_%05zu.json", i);
    write_file(fs::path(out_dir) / name, task_to_json(tasks[i]));
  }
  std::size_t lambdas = 0;
  for (const Task& t : tasks) lambdas += solution_uses_lambda(t);
  std::cout << "tasks: " << tasks.size() << "\n";
  std::cout << "dropped_by_dedup: " << report.tasks.size() - tasks.size() << "\n";
  std::cout << "with_lambda: " << lambdas << "\n";
  std::cout << "searches: " << report.searches << "\n";
  return kOk;
}

int cmd_bench(const std::string& task_path, const SearchFlags& flags, std::size_t trials, std::size_t workers,
              const std::string& out_dir, bool redact) {
  BenchConfig config;
  config.method = flags.method;
  config.search = flags.config();
  config.trials = trials;
  config.workers = workers;
  if (flags.method == "policy") {
    config.make_policy = [&flags] { return flags.make(); };
    // Fail fast on a bad policy configuration.
    flags.make();
  }
  const std::vector<Task> tasks = read_tasks(task_path);
  ensure_dir(out_dir);
  const BenchReport report = run_bench(tasks, config);
  std::ostringstream rows, summary, curve;
  write_rows(rows, report, !redact);
  write_summary(summary, report, !redact);
  write_curve(curve, report);
  write_file(fs::path(out_dir) / "rows.jsonl", rows.str());
  write_file(fs::path(out_dir) / "summary.json", summary.str());
  if (!redact) write_file(fs::path(out_dir) / "curve.csv", curve.str());
  std::size_t solved = 0;
  for (const BenchRow& r : report.rows) solved += r.solved;
  std::cout << "rows: " << report.rows.size() << "\n";
  std::cout << "solved: " << solved << "\n";
  std::cout << "true_positives: " << report.true_positives << "\n";
  std::cout << "false_positives: " << report.false_positives << "\n";
  return kOk;
}

InputTypes resolve_inputs(const std::string& task_path, const std::string& inputs) {
  if (!task_path.empty()) return read_tasks(task_path).front().input_type_map();
  if (!inputs.empty()) return parse_input_types(inputs);
  throw ConfigError("give --task or --inputs to declare input variables");
}

int cmd_simplify(const std::string& text, const std::string& task_path, const std::string& inputs) {
  const Term t = parse_solution(text, resolve_inputs(task_path, inputs));
  std::cout << simplify(t) << "\n";
  return kOk;
}

int cmd_inspect(const std::string& task_path, const std::string& expr) {
  const std::vector<Task> tasks = read_tasks(task_path);
  if (tasks.size() != 1) throw ConfigError("inspect-signature takes exactly one task file");
  const Task& task = tasks.front();
  ReducedSignature sig;
  SignatureKind kind = SignatureKind::IO;
  if (expr.empty()) {
    sig = io_signature(task);
  } else {
    const Term t = parse_solution(expr, task.input_type_map());
    if (t.is_token()) throw ConfigError("a bare variable token has no signature");
    Executor exec(task);
    if (t.arity() == 0) {
      kind = SignatureKind::Value;
      sig = value_signature(exec.evaluate(t), task);
    } else {
      kind = SignatureKind::LambdaValue;
      sig = lambda_signature(exec.probe_runs(t), t.arity(), task);
    }
  }
  const auto& names = layout(kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu\t%.4f\t%.4f\t", i, sig[2 * i], sig[2 * i + 1]);
    std::cout << buf << names[i] << "\n";
  }
  return kOk;
}

int cmd_export(const std::string& out_dir) {
  ensure_dir(out_dir);
  write_file(fs::path(out_dir) / "tuple_table.txt", export_tuple_table());
  write_file(fs::path(out_dir) / "layout_manifest.txt", layout_manifest());
  std::cout << "tuple_hash: " << tuple_table_hash() << "\n";
  std::cout << "layout_hash: " << layout_hash() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lamsynth: bottom-up synthesis of programs with lambdas from input/output examples"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SearchFlags flags;
  std::string task_path, events_path, out_dir, inputs, expr, text, weights = "3..8", eval_path;
  bool redact = false;
  std::size_t trials = 1;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  GenConfig gen;

  CLI::App* solve = app.add_subcommand("solve", "search for a program solving one task");
  solve->add_option("task", task_path, "task file")->required();
  flags.add_to(*solve);
  solve->add_option("--events", events_path, "write the search event log here (policy method)");
  solve->add_flag("--redact-timing", redact, "print no timings, for byte-comparable output");

  CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate synthetic tasks");
  gen_cmd->add_option("--out", out_dir, "output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--num-tasks", gen.num_tasks, "tasks to generate without --per-weight");
  gen_cmd->add_option("--per-weight", gen.per_weight, "exactly this many tasks per weight (0: off)");
  gen_cmd->add_option("--weights", weights, "weight range of reference solutions");
  gen_cmd->add_option("--lambda-fraction", gen.lambda_fraction, "target fraction of tasks using a lambda");
  gen_cmd->add_option("--max-inputs", gen.max_inputs, "inputs per task (1 to 3)");
  gen_cmd->add_option("--min-examples", gen.min_examples, "fewest examples per task");
  gen_cmd->add_option("--max-examples", gen.max_examples, "most examples per task");
  gen_cmd->add_option("--max-list-length", gen.max_list_length, "longest random input list");
  gen_cmd->add_option("--min-element", gen.min_element, "smallest random integer");
  gen_cmd->add_option("--max-element", gen.max_element, "largest random integer");
  gen_cmd->add_option("--search-timeout", gen.search_timeout_s, "seconds per exhaustive search");
  gen_cmd->add_option("--memory-mb", gen.memory_budget_mb, "pool size estimate per search");
  gen_cmd->add_option("--tasks-per-search", gen.tasks_per_search, "tasks taken from one search");
  gen_cmd->add_option("--held-out", gen.held_out, "held-out cases per task");
  gen_cmd->add_option("--dedup-against", eval_path, "drop tasks whose solution solves one of these tasks");

  CLI::App* bench = app.add_subcommand("bench", "run a method over a task set");
  bench->add_option("tasks", task_path, "task file or directory")->required();
  flags.add_to(*bench);
  bench->add_option("--trials", trials, "trials per task");
  bench->add_option("--workers", workers, "concurrent searches");
  bench->add_option("--out", out_dir, "output directory")->required();
  bench->add_flag("--redact-timing", redact, "write no timings, for byte-comparable reports");

  CLI::App* simp = app.add_subcommand("simplify", "resolve the variable renames of a solution");
  simp->add_option("expression", text, "solution in Merge or plain lambda form")->required();
  simp->add_option("--task", task_path, "take input variables from this task");
  simp->add_option("--inputs", inputs, "input variables, e.g. x:list,f:int");

  CLI::App* inspect = app.add_subcommand("inspect-signature", "print a property signature slot by slot");
  inspect->add_option("task", task_path, "task file")->required();
  inspect->add_option("--expr", expr, "expression to describe (default: the task's IO signature)");

  CLI::App* exp = app.add_subcommand("export-tables", "write the tuple table and the signature layout manifest");
  exp->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(task_path, flags, events_path, redact);
    if (*gen_cmd) return cmd_gen_data(gen, weights, out_dir, eval_path);
    if (*bench) return cmd_bench(task_path, flags, trials, workers, out_dir, redact);
    if (*simp) return cmd_simplify(text, task_path, inputs);
    if (*inspect) return cmd_inspect(task_path, expr);
    if (*exp) return cmd_export(out_dir);
  } catch (const PolicyError& e) {
    std::cerr << "policy error: " << e.what() << "\n";
    return kPolicy;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const TaskFormatError& e) {
    std::cerr << "task error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.position() << ": " << e.message() << "\n";
    return kConfig;
  } catch (const ConstructionError& e) {
    std::cerr << "invalid term: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
