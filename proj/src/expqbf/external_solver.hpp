#pragma once

#include <filesystem>
#include <vector>

#include "expqbf/sat.hpp"

namespace expqbf::sat {

// Runs `<path> <file.cnf>` on a temporary DIMACS file and parses the
// competition-style answer. Throws SpawnFailure or ProtocolViolation.
SolveOutcome external_solve(const std::filesystem::path& solver, const std::vector<std::vector<int>>& cnf);

// Backend adapter over external_solve. Not incremental: every solve call
// re-runs the executable on all clauses so far, with assumptions appended
// as unit clauses. Failed assumptions are reported as the whole set.
class ExternalSolver final : public Backend {
 public:
  explicit ExternalSolver(std::filesystem::path solver) : solver_(std::move(solver)) {}

  void add_clause(std::span<const int> lits) override;
  Status solve(std::span<const int> assumptions, const Budget& budget = {}) override;

  std::span<const Value> model() const override { return model_; }
  std::span<const int> failed_assumptions() const override { return failed_; }
  int num_vars() const override { return num_vars_; }
  std::size_t num_clauses() const override { return clauses_.size(); }
  const Stats& stats() const override { return stats_; }

 private:
  std::filesystem::path solver_;
  std::vector<std::vector<int>> clauses_;
  int num_vars_ = 0;
  std::vector<Value> model_;
  std::vector<int> failed_;
  Stats stats_;
};

}  // namespace expqbf::sat
