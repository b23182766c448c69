#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "expqbf/formula.hpp"

namespace expqbf::sat {

// Numeric values follow the SAT competition exit codes.
enum class Status : int { Unknown = 0, Sat = 10, Unsat = 20 };

struct Budget {
  std::optional<std::uint64_t> conflicts;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
  std::function<bool()> terminate;

  bool exhausted() const {
    if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) return true;
    if (deadline && std::chrono::steady_clock::now() >= *deadline) return true;
    return terminate && terminate();
  }
};

struct Stats {
  std::uint64_t solves = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  double seconds = 0.0;
};

struct TraceRecord {
  bool deletion = false;
  std::vector<int> literals;
};

struct SolveOutcome {
  Status status = Status::Unknown;
  std::vector<Value> model;  // indexed by variable; empty unless Sat
  std::vector<int> failed_assumptions;
};

// Incremental propositional solver. Variables are positive ints and are
// registered on first use; clauses are permanent.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual void add_clause(std::span<const int> lits) = 0;
  virtual Status solve(std::span<const int> assumptions, const Budget& budget = {}) = 0;

  // Valid after Sat: per-variable values, index 0 unused.
  virtual std::span<const Value> model() const = 0;
  // Valid after Unsat: subset of the assumptions sufficient for Unsat.
  virtual std::span<const int> failed_assumptions() const = 0;

  virtual int num_vars() const = 0;
  virtual std::size_t num_clauses() const = 0;
  virtual const Stats& stats() const = 0;

  // Clausal RUP trace of the last refutation; throws TraceUnavailable
  // unless the backend recorded one.
  virtual std::vector<TraceRecord> proof_trace() const;

  Value value(int var) const {
    const auto m = model();
    return var > 0 && static_cast<std::size_t>(var) < m.size() ? m[var] : Value::Unassigned;
  }
};

// Convenience wrapper that copies the result into a SolveOutcome.
SolveOutcome solve(Backend& backend, std::span<const int> assumptions = {}, const Budget& budget = {});

struct CdclOptions {
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  double random_decision_frequency = 0.01;
  bool record_trace = false;
  double var_decay = 0.95;
  double clause_decay = 0.999;
  std::uint64_t restart_first = 100;
  double restart_factor = 1.5;
};

struct BackendSpec {
  enum class Kind { Bundled, External };
  Kind kind = Kind::Bundled;
  std::filesystem::path external_path;
  CdclOptions cdcl;
};

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

}  // namespace expqbf::sat
