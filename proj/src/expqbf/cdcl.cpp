#include "expqbf/cdcl.hpp"

#include <algorithm>
#include <cstdlib>

#include "expqbf/error.hpp"

namespace expqbf::sat {

CdclSolver::CdclSolver(CdclOptions options) : options_(options), rng_(options.seed) { watches_.resize(2); }

void CdclSolver::set_learn_callback(int max_length, std::function<void(std::span<const int>)> callback) {
  learn_max_length_ = max_length;
  learn_callback_ = std::move(callback);
}

void CdclSolver::ensure_var(int var) {
  while (num_vars() < var) {
    const int v = num_vars() + 1;
    assigns_.push_back(Value::Unassigned);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    watches_.resize(2 * static_cast<std::size_t>(v) + 2);
    heap_insert(v);
  }
}

void CdclSolver::record(bool deletion, std::span<const LitCode> lits) {
  if (!options_.record_trace) return;
  TraceRecord r{deletion, {}};
  r.literals.reserve(lits.size());
  for (LitCode p : lits) r.literals.push_back(decode(p));
  trace_.push_back(std::move(r));
}

void CdclSolver::mark_unsat() {
  if (!ok_) return;
  ok_ = false;
  record(false, {});
}

void CdclSolver::add_clause(std::span<const int> lits) {
  ++num_original_;
  if (!ok_) return;
  cancel_until(0);
  std::vector<LitCode> c;
  c.reserve(lits.size());
  for (int l : lits) {
    if (l == 0) continue;
    ensure_var(std::abs(l));
    c.push_back(encode(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());

  std::vector<LitCode> kept;
  bool shortened = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0 && c[i] == (c[i - 1] ^ 1U)) return;  // tautology
    const Value v = lit_value(c[i]);
    if (v == Value::True) return;
    if (v == Value::False) {
      shortened = true;
      continue;
    }
    kept.push_back(c[i]);
  }
  if (kept.empty()) {
    mark_unsat();
    return;
  }
  if (shortened) record(false, kept);
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) mark_unsat();
    return;
  }
  attach_new(std::move(kept), false);
}

CdclSolver::CRef CdclSolver::attach_new(std::vector<LitCode> lits, bool learnt) {
  const CRef cr = static_cast<CRef>(clauses_.size());
  watches_[lits[0] ^ 1U].push_back(Watcher{cr, lits[1]});
  watches_[lits[1] ^ 1U].push_back(Watcher{cr, lits[0]});
  clauses_.push_back(ClauseRec{std::move(lits), 0.0, learnt, false});
  if (learnt) learnts_.push_back(cr);
  return cr;
}

void CdclSolver::enqueue(LitCode p, CRef reason) {
  const int v = var_of(p);
  assigns_[v] = (p & 1U) ? Value::False : Value::True;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(p);
}

CdclSolver::CRef CdclSolver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const LitCode p = trail_[qhead_++];
    const LitCode false_lit = p ^ 1U;
    std::vector<Watcher>& ws = watches_[p];
    ++stats_.propagations;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (lit_value(w.blocker) == Value::True) {
        ws[j++] = ws[i++];
        continue;
      }
      ClauseRec& c = clauses_[w.cref];
      ++i;
      if (c.deleted) continue;
      auto& lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      const LitCode first = lits[0];
      const Watcher kept{w.cref, first};
      if (first != w.blocker && lit_value(first) == Value::True) {
        ws[j++] = kept;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (lit_value(lits[k]) != Value::False) {
          lits[1] = lits[k];
          lits[k] = false_lit;
          watches_[lits[1] ^ 1U].push_back(kept);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = kept;
      if (lit_value(first) == Value::False) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

void CdclSolver::analyze(CRef conflict, std::vector<LitCode>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(kNoLit);
  int pending = 0;
  LitCode p = kNoLit;
  std::size_t index = trail_.size();
  CRef cr = conflict;
  do {
    ClauseRec& c = clauses_[cr];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == kNoLit ? 0 : 1); k < c.lits.size(); ++k) {
      const LitCode q = c.lits[k];
      const int v = var_of(q);
      if (seen_[v] || level_[v] == 0) continue;
      bump_var(v);
      seen_[v] = 1;
      if (level_[v] >= decision_level()) {
        ++pending;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      --index;
    } while (!seen_[var_of(trail_[index])]);
    p = trail_[index];
    cr = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = p ^ 1U;

  // Drop literals whose reason is entirely covered by the clause.
  const std::vector<LitCode> marked(learnt.begin() + 1, learnt.end());
  std::size_t j = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const CRef r = reason_[var_of(learnt[i])];
    bool redundant = r != kNoReason;
    if (redundant) {
      const auto& rl = clauses_[r].lits;
      for (std::size_t k = 1; k < rl.size(); ++k) {
        const int v = var_of(rl[k]);
        if (!seen_[v] && level_[v] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant) learnt[j++] = learnt[i];
  }
  learnt.resize(j);
  for (LitCode q : marked) seen_[var_of(q)] = 0;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
    }
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[var_of(learnt[1])];
  }
}

void CdclSolver::analyze_final(LitCode falsified) {
  failed_.clear();
  failed_.push_back(decode(falsified));
  if (decision_level() == 0) return;
  seen_[var_of(falsified)] = 1;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[0];) {
    const int v = var_of(trail_[i]);
    if (!seen_[v]) continue;
    if (reason_[v] == kNoReason) {
      failed_.push_back(decode(trail_[i]));
    } else {
      const auto& rl = clauses_[reason_[v]].lits;
      for (std::size_t k = 1; k < rl.size(); ++k) {
        if (level_[var_of(rl[k])] > 0) seen_[var_of(rl[k])] = 1;
      }
    }
    seen_[v] = 0;
  }
  seen_[var_of(falsified)] = 0;
  std::sort(failed_.begin(), failed_.end());
  failed_.erase(std::unique(failed_.begin(), failed_.end()), failed_.end());
}

void CdclSolver::cancel_until(int level) {
  if (decision_level() <= level) return;
  const std::size_t bound = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t c = trail_.size(); c-- > bound;) {
    const int v = var_of(trail_[c]);
    assigns_[v] = Value::Unassigned;
    reason_[v] = kNoReason;
    heap_insert(v);
  }
  qhead_ = bound;
  trail_.resize(bound);
  trail_lim_.resize(static_cast<std::size_t>(level));
}

CdclSolver::LitCode CdclSolver::pick_branch() {
  int next = 0;
  if (options_.random_decision_frequency > 0.0 && !heap_.empty()) {
    const double r = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (r < options_.random_decision_frequency) next = heap_[rng_() % heap_.size()];
  }
  while (next == 0 || assigns_[next] != Value::Unassigned) {
    if (heap_.empty()) return kNoLit;
    next = heap_pop();
  }
  return encode(-next);
}

bool CdclSolver::locked(CRef cr) const {
  const ClauseRec& c = clauses_[cr];
  const int v = var_of(c.lits[0]);
  return reason_[v] == cr && lit_value(c.lits[0]) == Value::True;
}

void CdclSolver::reduce_learnts() {
  std::sort(learnts_.begin(), learnts_.end(), [this](CRef a, CRef b) {
    const double x = clauses_[a].activity;
    const double y = clauses_[b].activity;
    return x != y ? x < y : a < b;
  });
  const std::size_t half = learnts_.size() / 2;
  std::size_t j = 0;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    ClauseRec& c = clauses_[learnts_[i]];
    if (i < half && c.lits.size() > 2 && !locked(learnts_[i])) {
      c.deleted = true;
      ++deleted_count_;
      record(true, c.lits);
    } else {
      learnts_[j++] = learnts_[i];
    }
  }
  learnts_.resize(j);
  max_learnts_ *= 1.1;
  if (deleted_count_ * 2 > clauses_.size()) collect_garbage();
}

void CdclSolver::collect_garbage() {
  std::vector<CRef> remap(clauses_.size(), kNoReason);
  std::vector<ClauseRec> live;
  live.reserve(clauses_.size() - deleted_count_);
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (clauses_[i].deleted) continue;
    remap[i] = static_cast<CRef>(live.size());
    live.push_back(std::move(clauses_[i]));
  }
  clauses_ = std::move(live);
  deleted_count_ = 0;
  for (CRef& cr : learnts_) cr = remap[cr];
  for (LitCode p : trail_) {
    CRef& r = reason_[var_of(p)];
    if (r != kNoReason) r = remap[r];
  }
  for (auto& ws : watches_) ws.clear();
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const auto& lits = clauses_[i].lits;
    watches_[lits[0] ^ 1U].push_back(Watcher{static_cast<CRef>(i), lits[1]});
    watches_[lits[1] ^ 1U].push_back(Watcher{static_cast<CRef>(i), lits[0]});
  }
}

CdclSolver::SearchResult CdclSolver::search(std::uint64_t conflict_limit, std::span<const LitCode> assumptions,
                                            const Budget& budget, std::uint64_t conflicts_at_start) {
  std::uint64_t local_conflicts = 0;
  std::vector<LitCode> learnt;
  for (;;) {
    const CRef conflict = propagate();
    if (conflict != kNoReason) {
      ++stats_.conflicts;
      ++local_conflicts;
      if (decision_level() == 0) {
        mark_unsat();
        return SearchResult::Unsat;
      }
      int backtrack_level = 0;
      analyze(conflict, learnt, backtrack_level);
      cancel_until(backtrack_level);
      record(false, learnt);
      if (learn_callback_ && static_cast<int>(learnt.size()) <= learn_max_length_) {
        std::vector<int> ext;
        for (LitCode p : learnt) ext.push_back(decode(p));
        learn_callback_(ext);
      }
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const CRef cr = attach_new(learnt, true);
        bump_clause(clauses_[cr]);
        enqueue(learnt[0], cr);
      }
      var_inc_ /= options_.var_decay;
      cla_inc_ /= options_.clause_decay;
      if (budget.conflicts && stats_.conflicts - conflicts_at_start >= *budget.conflicts) {
        return SearchResult::Interrupted;
      }
      if (budget.exhausted()) return SearchResult::Interrupted;
      continue;
    }

    if (local_conflicts >= conflict_limit) {
      cancel_until(0);
      return SearchResult::Restart;
    }
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) {
      reduce_learnts();
    }

    LitCode next = kNoLit;
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const LitCode a = assumptions[static_cast<std::size_t>(decision_level())];
      const Value v = lit_value(a);
      if (v == Value::True) {
        trail_lim_.push_back(trail_.size());
      } else if (v == Value::False) {
        analyze_final(a);
        return SearchResult::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == kNoLit) {
      ++stats_.decisions;
      if ((stats_.decisions & 255U) == 0 && budget.exhausted()) return SearchResult::Interrupted;
      next = pick_branch();
      if (next == kNoLit) return SearchResult::Sat;
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

Status CdclSolver::solve(std::span<const int> assumptions, const Budget& budget) {
  const auto started = std::chrono::steady_clock::now();
  ++stats_.solves;
  model_.clear();
  failed_.clear();

  std::vector<LitCode> assumed;
  assumed.reserve(assumptions.size());
  for (int a : assumptions) {
    ensure_var(std::abs(a));
    assumed.push_back(encode(a));
  }

  Status result = Status::Unknown;
  if (!ok_) {
    result = Status::Unsat;
  } else {
    cancel_until(0);
    max_learnts_ = std::max({max_learnts_, static_cast<double>(num_original_) / 3.0, 2000.0});
    const std::uint64_t start = stats_.conflicts;
    double restart_limit = static_cast<double>(options_.restart_first);
    for (;;) {
      const SearchResult r = search(static_cast<std::uint64_t>(restart_limit), assumed, budget, start);
      if (r == SearchResult::Restart) {
        ++stats_.restarts;
        restart_limit *= options_.restart_factor;
        if (budget.exhausted()) break;
        continue;
      }
      if (r == SearchResult::Sat) {
        model_ = assigns_;
        result = Status::Sat;
      } else if (r == SearchResult::Unsat) {
        result = Status::Unsat;
      }
      break;
    }
  }
  cancel_until(0);
  stats_.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<TraceRecord> CdclSolver::proof_trace() const {
  if (!options_.record_trace) throw TraceUnavailable("proof trace recording was not enabled");
  if (ok_) throw TraceUnavailable("no refutation: the clause set has not been shown unsatisfiable");
  return trace_;
}

void CdclSolver::bump_var(int v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void CdclSolver::bump_clause(ClauseRec& c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (CRef cr : learnts_) clauses_[cr].activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void CdclSolver::heap_insert(int v) {
  if (heap_pos_[v] >= 0) return;
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void CdclSolver::heap_up(std::size_t i) {
  const int v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void CdclSolver::heap_down(std::size_t i) {
  const int v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

int CdclSolver::heap_pop() {
  const int top = heap_.front();
  heap_pos_[top] = -1;
  const int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace expqbf::sat

#include "expqbf/external_solver.hpp"

namespace expqbf::sat {

std::vector<TraceRecord> Backend::proof_trace() const {
  throw TraceUnavailable("this backend does not record proof traces");
}

SolveOutcome solve(Backend& backend, std::span<const int> assumptions, const Budget& budget) {
  SolveOutcome out;
  out.status = backend.solve(assumptions, budget);
  if (out.status == Status::Sat) {
    const auto m = backend.model();
    out.model.assign(m.begin(), m.end());
  } else if (out.status == Status::Unsat) {
    const auto f = backend.failed_assumptions();
    out.failed_assumptions.assign(f.begin(), f.end());
  }
  return out;
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::External) return std::make_unique<ExternalSolver>(spec.external_path);
  return std::make_unique<CdclSolver>(spec.cdcl);
}

}  // namespace expqbf::sat
