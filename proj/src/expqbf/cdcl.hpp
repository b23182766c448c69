#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "expqbf/sat.hpp"

namespace expqbf::sat {

// Conflict-driven clause learning solver: two watched literals, first-UIP
// learning with local minimization, VSIDS branching, geometric restarts,
// activity-based learnt clause reduction. Decisions always pick the
// negative phase so runs are reproducible.
class CdclSolver final : public Backend {
 public:
  explicit CdclSolver(CdclOptions options = {});

  void add_clause(std::span<const int> lits) override;
  Status solve(std::span<const int> assumptions, const Budget& budget = {}) override;

  std::span<const Value> model() const override { return model_; }
  std::span<const int> failed_assumptions() const override { return failed_; }

  int num_vars() const override { return static_cast<int>(assigns_.size()) - 1; }
  std::size_t num_clauses() const override { return num_original_; }
  std::size_t num_learnts() const { return learnts_.size(); }
  const Stats& stats() const override { return stats_; }

  std::vector<TraceRecord> proof_trace() const override;

  // Reports every learnt clause of at most `max_length` literals.
  void set_learn_callback(int max_length, std::function<void(std::span<const int>)> callback);

  // False once the clause set is known to be unsatisfiable.
  bool okay() const { return ok_; }

 private:
  using LitCode = std::uint32_t;
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = UINT32_MAX;
  static constexpr LitCode kNoLit = UINT32_MAX;

  struct ClauseRec {
    std::vector<LitCode> lits;
    double activity = 0.0;
    bool learnt = false;
    bool deleted = false;
  };

  struct Watcher {
    CRef cref;
    LitCode blocker;
  };

  enum class SearchResult { Sat, Unsat, Restart, Interrupted };

  static LitCode encode(int lit) {
    return lit > 0 ? static_cast<LitCode>(lit) << 1 : (static_cast<LitCode>(-lit) << 1) | 1U;
  }
  static int decode(LitCode p) { return (p & 1U) ? -static_cast<int>(p >> 1) : static_cast<int>(p >> 1); }
  static int var_of(LitCode p) { return static_cast<int>(p >> 1); }

  Value lit_value(LitCode p) const {
    const Value v = assigns_[p >> 1];
    if (v == Value::Unassigned) return v;
    return ((v == Value::True) != ((p & 1U) != 0)) ? Value::True : Value::False;
  }

  void ensure_var(int var);
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(LitCode p, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<LitCode>& learnt, int& backtrack_level);
  void analyze_final(LitCode falsified);
  void cancel_until(int level);
  LitCode pick_branch();
  SearchResult search(std::uint64_t conflict_limit, std::span<const LitCode> assumptions, const Budget& budget,
                      std::uint64_t conflicts_at_start);
  CRef attach_new(std::vector<LitCode> lits, bool learnt);
  bool locked(CRef cr) const;
  void reduce_learnts();
  void collect_garbage();
  void record(bool deletion, std::span<const LitCode> lits);
  void mark_unsat();

  void bump_var(int v);
  void bump_clause(ClauseRec& c);

  // Binary max-heap over variable activity; ties broken by smaller index.
  bool heap_less(int a, int b) const {
    return activity_[a] != activity_[b] ? activity_[a] > activity_[b] : a < b;
  }
  void heap_insert(int v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  int heap_pop();

  CdclOptions options_;
  bool ok_ = true;
  std::size_t num_original_ = 0;

  std::vector<ClauseRec> clauses_;
  std::vector<CRef> learnts_;
  std::size_t deleted_count_ = 0;
  std::vector<std::vector<Watcher>> watches_;  // by literal p: clauses watching ~p

  std::vector<Value> assigns_{Value::Unassigned};
  std::vector<int> level_{0};
  std::vector<CRef> reason_{kNoReason};
  std::vector<LitCode> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_{0.0};
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_{-1};
  std::vector<char> seen_{0};
  double max_learnts_ = 0.0;

  std::vector<Value> model_;
  std::vector<int> failed_;
  std::mt19937_64 rng_;

  std::vector<TraceRecord> trace_;
  int learn_max_length_ = 0;
  std::function<void(std::span<const int>)> learn_callback_;

  Stats stats_;
};

}  // namespace expqbf::sat
