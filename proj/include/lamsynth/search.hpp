#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lamsynth/executor.hpp"
#include "lamsynth/policy.hpp"
#include "lamsynth/pool.hpp"
#include "lamsynth/task.hpp"
#include "lamsynth/term.hpp"

namespace lamsynth {

struct SearchConfig {
  double timeout_s = 600;
  double restart_interval_s = 6;
  int samples_per_op = 10;
  int max_weight = 20;
  std::uint64_t seed = 0;
  std::string policy_id = "heuristic";
  // When nonzero, each restart lasts this many iterations instead of
  // restart_interval_s of wall-clock time, which makes runs reproducible.
  std::uint64_t restart_iterations = 0;
  std::size_t max_restarts = 0;  // 0: until timeout
  bool stop_on_solution = true;
  // Estimated pool footprint after which enumeration stops storing new
  // values; later candidates are still checked as solutions.
  std::size_t memory_budget_mb = 2048;

  // Throws ConfigError.
  void validate() const;
};

enum class Outcome : std::uint8_t { Accepted, Improved, Duplicate, Pruned, Error };
std::string_view to_string(Outcome o);

struct SearchEvent {
  std::size_t restart = 0;
  std::uint64_t iteration = 0;
  const OpDescriptor* op = nullptr;
  std::vector<int> sequence;
  Outcome outcome = Outcome::Error;
  std::size_t pool_size = 0;
  double elapsed_ms = 0;
};

// One JSON object per line. With timing off elapsed_ms is written as null so
// that logs of seeded runs compare byte for byte.
class EventLog {
 public:
  explicit EventLog(std::ostream& out, bool timing = true) : out_(&out), timing_(timing) {}
  void record(const SearchEvent& e);
  std::size_t size() const { return count_; }

 private:
  std::ostream* out_;
  bool timing_;
  std::size_t count_ = 0;
};

struct SearchStats {
  std::uint64_t candidates = 0;
  std::uint64_t accepted = 0;
  std::uint64_t improved = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t pruned = 0;
  std::uint64_t errors = 0;
  std::uint64_t iterations = 0;
  std::size_t pool_size = 0;
  int weight_reached = 0;
  bool pool_frozen = false;
  double elapsed_s = 0;

  SearchStats& operator+=(const SearchStats& o);
};

enum class SearchStatus { Solved, Timeout, Exhausted, PolicyFailure };
std::string_view to_string(SearchStatus s);

struct RestartRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  SearchStats stats;
  bool solved = false;
};

struct SearchResult {
  SearchStatus status = SearchStatus::Timeout;
  std::optional<Term> solution;
  SearchStats stats;
  std::vector<RestartRecord> restarts;
  std::string message;
};

// Called for every value entering the pool; returning false stops the search.
using EntryCallback = std::function<bool(const ValueEntry&)>;

// Exhaustive bottom-up enumeration in order of increasing weight.
SearchResult enumerate(const Task& task, const SearchConfig& config, const EntryCallback& on_entry = {});

// One policy-guided search from a fresh pool, for at most budget_s seconds
// (or config.restart_iterations iterations).
SearchResult policy_search(const Task& task, Policy& policy, const SearchConfig& config, double budget_s,
                           std::uint64_t seed, EventLog* log = nullptr, std::size_t restart = 0);

// policy_search repeated from scratch until solved or config.timeout_s.
SearchResult restart_loop(const Task& task, Policy& policy, const SearchConfig& config, EventLog* log = nullptr);

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart);

// Exact match on every visible example.
bool verify(const Term& t, const Task& task);
// Exact match on the held-out cases (vacuously true when there are none).
bool check_held_out(const Term& t, const Task& task);

}  // namespace lamsynth
