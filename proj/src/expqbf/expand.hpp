#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "expqbf/annotate.hpp"
#include "expqbf/formula.hpp"
#include "expqbf/proof.hpp"
#include "expqbf/sat.hpp"

namespace expqbf {

enum class InitMode { PerBlock, SingleRandom, AllFalse, AllTrue };

enum class Verdict : int { Unknown = 0, True = 10, False = 20 };

const char* to_string(Verdict v);

struct ExpansionState;

struct SolveConfig {
  InitMode init_mode = InitMode::PerBlock;
  // When non-empty, used as A_0 instead of init_mode.
  std::vector<Assignment> initial_assignments;
  std::uint64_t seed = 0;
  std::uint64_t reset_period = 64;  // 0 = never
  std::uint64_t reset_memory_threshold = 2'000'000;  // live literals in psi_forall
  bool multi_extract = true;
  bool verify_invariants = false;
  bool rebuild_on_reset = false;
  std::optional<double> time_limit_seconds;
  std::optional<std::uint64_t> max_iterations;
  bool certificate = false;
  sat::BackendSpec backend;
  const std::atomic<bool>* cancel = nullptr;
  // Called after every non-terminal iteration. Returned clauses (over the
  // original variables) are conjoined to the matrix from then on.
  std::function<std::vector<Clause>(const ExpansionState&)> on_iteration;
};

// Insertion-ordered set of full assignments over one quantifier kind.
class AssignmentSet {
 public:
  static constexpr std::int64_t kInitial = -1;

  // True when `a` was not present.
  bool insert(const Assignment& a, std::int64_t origin);
  bool contains(const Assignment& a) const;
  void clear();

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Assignment& operator[](std::size_t i) const { return items_[i]; }
  std::int64_t origin(std::size_t i) const { return origins_[i]; }
  const std::vector<Assignment>& items() const { return items_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const;
  };
  static std::vector<std::uint64_t> key(const Assignment& a);

  std::vector<Assignment> items_;
  std::vector<std::int64_t> origins_;
  std::unordered_map<std::vector<std::uint64_t>, std::size_t, KeyHash> index_;
};

struct IterationStats {
  std::uint64_t iteration = 0;
  std::size_t a_size = 0;
  std::size_t s_size = 0;
  std::size_t new_a = 0;
  std::size_t new_s = 0;
  std::uint64_t forall_conflicts = 0;
  std::uint64_t exists_conflicts = 0;
  std::size_t forall_clauses = 0;
  std::size_t exists_clauses = 0;
  double forall_seconds = 0.0;
  double exists_seconds = 0.0;
  bool reset = false;
  Verdict terminal = Verdict::Unknown;  // set on the deciding iteration
};

struct SolveStats {
  std::vector<IterationStats> iterations;
  std::uint64_t resets = 0;
  std::uint64_t growth_violations = 0;
  std::uint64_t completion_violations = 0;
  std::uint64_t bound_violations = 0;
  double seconds = 0.0;
};

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  std::uint64_t iterations = 0;
  std::size_t a_size = 0;
  std::size_t s_size = 0;
  // TRUE: the existential assignments S. FALSE: the universal assignments
  // of the failed instantiation groups.
  std::vector<Assignment> witness;
  std::optional<Certificate> certificate;
  SolveStats stats;
};

struct CompletionReport {
  // alpha indices not completed by S, then sigma indices not completed by A.
  std::vector<std::size_t> uncompleted_alphas;
  std::vector<std::size_t> uncompleted_sigmas;

  bool ok() const { return uncompleted_alphas.empty() && uncompleted_sigmas.empty(); }
};

struct ExpansionState {
  explicit ExpansionState(const Qbf& q);

  Qbf qbf;  // working matrix, grows only through on_iteration
  AssignmentSet A;
  AssignmentSet S;
  std::unique_ptr<sat::Backend> forall_solver;
  std::unique_ptr<sat::Backend> exists_solver;
  InternTable forall_table{Side::Forall};
  InternTable exists_table{Side::Exists};
  std::vector<int> group_selectors;  // parallel to A
  std::uint64_t iteration = 0;
  std::size_t live_literals = 0;  // in active psi_forall groups
  bool matrix_extended = false;
  SolveStats stats;
};

AssignmentSet initialize_A(const Qbf& q, const SolveConfig& config);

// Strips one assignment per source from `model` and returns those not yet
// in `target`, in source order; only the first when multi_extract is off.
std::vector<Assignment> extract_new(std::span<const Value> model, const AssignmentSet& sources,
                                    const InternTable& table, const AssignmentSet& target, const Qbf& q,
                                    bool multi_extract);

// For every alpha in `alphas` some sigma in `sigmas` satisfies the matrix
// together with it, and for every sigma some alpha falsifies it.
CompletionReport check_completion(const Qbf& q, const AssignmentSet& alphas_completed_by_S,
                                  const AssignmentSet& sigmas, const AssignmentSet& alphas);

class Expander {
 public:
  Expander(const Qbf& q, SolveConfig config);

  SolveResult run();
  const ExpansionState& state() const { return state_; }

 private:
  void add_forall_group(const Assignment& alpha, std::int64_t origin);
  void add_exists_constraint(const Assignment& sigma, std::int64_t origin);
  void reset_A(std::span<const Value> rho);
  bool reset_due() const;
  sat::Budget budget() const;
  void extend_matrix(std::vector<Clause> extra);

  SolveConfig config_;
  ExpansionState state_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

SolveResult solve(const Qbf& q, const SolveConfig& config = {});

}  // namespace expqbf
