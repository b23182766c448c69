#include "expqbf/expand.hpp"

#include <algorithm>
#include <random>

#include "expqbf/error.hpp"

namespace expqbf {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "TRUE";
    case Verdict::False: return "FALSE";
    default: return "UNKNOWN";
  }
}

std::vector<std::uint64_t> AssignmentSet::key(const Assignment& a) {
  std::vector<std::uint64_t> k((a.size() + 63) / 64 + 1, 0);
  k.back() = a.size();
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a[p] == Value::True) k[p / 64] |= std::uint64_t{1} << (p % 64);
  }
  return k;
}

std::size_t AssignmentSet::KeyHash::operator()(const std::vector<std::uint64_t>& k) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t w : k) {
    w ^= w >> 31;
    w *= 0x7fb5d329728ea185ULL;
    h = (h ^ w) * 0x100000001b3ULL;
  }
  return h;
}

bool AssignmentSet::insert(const Assignment& a, std::int64_t origin) {
  auto [it, inserted] = index_.try_emplace(key(a), items_.size());
  if (!inserted) return false;
  items_.push_back(a);
  origins_.push_back(origin);
  return true;
}

bool AssignmentSet::contains(const Assignment& a) const { return index_.count(key(a)) != 0; }

void AssignmentSet::clear() {
  items_.clear();
  origins_.clear();
  index_.clear();
}

AssignmentSet initialize_A(const Qbf& q, const SolveConfig& config) {
  AssignmentSet out;
  const auto universals = q.universals();
  auto fill = [&](auto value_for) {
    Assignment a(q.num_vars(), Domain::Universal);
    for (int u : universals) a.assign(q, u, value_for(u));
    out.insert(a, AssignmentSet::kInitial);
  };
  if (universals.empty()) {
    out.insert(Assignment(q.num_vars(), Domain::Universal), AssignmentSet::kInitial);
    return out;
  }
  switch (config.init_mode) {
    case InitMode::PerBlock:
      for (std::size_t b = 0; b < q.prefix().size(); ++b) {
        if (q.prefix()[b].quantifier != Quantifier::Forall || q.prefix()[b].vars.empty()) continue;
        fill([&](int u) { return to_value(q.info(u).block != static_cast<int>(b)); });
      }
      break;
    case InitMode::SingleRandom: {
      std::mt19937_64 rng(config.seed);
      fill([&](int) { return to_value((rng() >> 63) != 0); });
      break;
    }
    case InitMode::AllFalse: fill([](int) { return Value::False; }); break;
    case InitMode::AllTrue: fill([](int) { return Value::True; }); break;
  }
  return out;
}

std::vector<Assignment> extract_new(std::span<const Value> model, const AssignmentSet& sources,
                                    const InternTable& table, const AssignmentSet& target, const Qbf& q,
                                    bool multi_extract) {
  std::vector<Assignment> out;
  AssignmentSet fresh;
  for (const Assignment& source : sources.items()) {
    Assignment candidate = strip(model, source, table, q);
    if (target.contains(candidate) || !fresh.insert(candidate, 0)) continue;
    out.push_back(std::move(candidate));
    if (!multi_extract) break;
  }
  return out;
}

CompletionReport check_completion(const Qbf& q, const AssignmentSet& alphas_completed_by_S,
                                  const AssignmentSet& sigmas, const AssignmentSet& alphas) {
  CompletionReport report;
  for (std::size_t i = 0; i < alphas_completed_by_S.size(); ++i) {
    const Assignment& alpha = alphas_completed_by_S[i];
    bool found = false;
    // The sigma extracted from alpha sits at the same offset among the
    // newest elements more often than not; scanning from the back finds it
    // quickly.
    for (std::size_t j = sigmas.size(); j-- > 0 && !found;) found = satisfies(q, alpha, sigmas[j]);
    if (!found) report.uncompleted_alphas.push_back(i);
  }
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    const Assignment& sigma = sigmas[j];
    bool found = false;
    for (std::size_t i = alphas.size(); i-- > 0 && !found;) found = !satisfies(q, alphas[i], sigma);
    if (!found) report.uncompleted_sigmas.push_back(j);
  }
  return report;
}

ExpansionState::ExpansionState(const Qbf& q) : qbf(q) {}

Expander::Expander(const Qbf& q, SolveConfig config) : config_(std::move(config)), state_(q) {
  if (config_.time_limit_seconds) {
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(*config_.time_limit_seconds));
  }
  state_.forall_solver = sat::make_backend(config_.backend);
  state_.exists_solver = sat::make_backend(config_.backend);
}

sat::Budget Expander::budget() const {
  sat::Budget b;
  b.deadline = deadline_;
  b.cancel = config_.cancel;
  return b;
}

void Expander::add_forall_group(const Assignment& alpha, std::int64_t origin) {
  state_.A.insert(alpha, origin);
  const int selector = state_.forall_table.fresh();
  state_.group_selectors.push_back(selector);
  const Instantiation inst = instantiate(state_.qbf, alpha, state_.forall_table);
  std::vector<int> clause;
  for (const InstantiatedClause& ic : inst.clauses) {
    if (ic.duplicate) continue;
    clause.assign(1, -selector);
    clause.insert(clause.end(), ic.literals.begin(), ic.literals.end());
    state_.forall_solver->add_clause(clause);
    state_.live_literals += clause.size();
  }
}

void Expander::add_exists_constraint(const Assignment& sigma, std::int64_t origin) {
  state_.S.insert(sigma, origin);
  const NegatedInstantiation neg = negate_instantiate(state_.qbf, sigma, state_.exists_table);
  if (neg.tautology) return;
  for (const auto& c : neg.implications) state_.exists_solver->add_clause(c);
  state_.exists_solver->add_clause(neg.selector_clause);
}

bool Expander::reset_due() const {
  if (config_.reset_period > 0 && state_.iteration % config_.reset_period == 0) return true;
  return config_.reset_memory_threshold > 0 && state_.live_literals > config_.reset_memory_threshold;
}

void Expander::reset_A(std::span<const Value> rho) {
  std::vector<Assignment> candidates;
  candidates.reserve(state_.S.size());
  for (const Assignment& sigma : state_.S.items()) candidates.push_back(strip(rho, sigma, state_.exists_table, state_.qbf));

  if (config_.rebuild_on_reset) {
    state_.forall_solver = sat::make_backend(config_.backend);
    state_.forall_table = InternTable(Side::Forall);
  } else {
    for (int selector : state_.group_selectors) {
      const int unit = -selector;
      state_.forall_solver->add_clause(std::span<const int>(&unit, 1));
    }
    state_.forall_table.forget_clauses();
  }
  state_.A.clear();
  state_.group_selectors.clear();
  state_.live_literals = 0;
  for (const Assignment& alpha : candidates) {
    if (!state_.A.contains(alpha)) add_forall_group(alpha, static_cast<std::int64_t>(state_.iteration));
  }
  ++state_.stats.resets;
}

void Expander::extend_matrix(std::vector<Clause> extra) {
  std::vector<Clause> matrix = state_.qbf.matrix();
  for (Clause& c : extra) matrix.push_back(std::move(c));
  Qbf extended(state_.qbf.prefix(), std::move(matrix));
  const std::size_t old_size = state_.qbf.matrix().size();
  state_.qbf = std::move(extended);
  state_.matrix_extended = true;
  // New clauses reach psi_forall for every alpha already in A; later
  // instantiations on both sides use the whole working matrix.
  std::vector<Clause> added(state_.qbf.matrix().begin() + static_cast<std::ptrdiff_t>(std::min(old_size, state_.qbf.matrix().size())),
                            state_.qbf.matrix().end());
  if (added.empty()) return;
  const Qbf only_new(state_.qbf.prefix(), std::move(added));
  std::vector<int> clause;
  for (std::size_t g = 0; g < state_.A.size(); ++g) {
    const Instantiation inst = instantiate(only_new, state_.A[g], state_.forall_table);
    for (const InstantiatedClause& ic : inst.clauses) {
      if (ic.duplicate) continue;
      clause.assign(1, -state_.group_selectors[g]);
      clause.insert(clause.end(), ic.literals.begin(), ic.literals.end());
      state_.forall_solver->add_clause(clause);
      state_.live_literals += clause.size();
    }
  }
}

namespace {

std::uint64_t iteration_bound(const Qbf& q) {
  const std::size_t bits = std::min(q.universals().size(), q.existentials().size());
  if (bits >= 63) return UINT64_MAX;
  return (std::uint64_t{1} << bits) + 1;
}

}  // namespace

SolveResult Expander::run() {
  const auto started = std::chrono::steady_clock::now();
  ExpansionState& st = state_;
  SolveResult result;
  const Qbf& q = st.qbf;

  if (!config_.initial_assignments.empty()) {
    for (const Assignment& a : config_.initial_assignments) {
      if (a.domain() != Domain::Universal || !a.is_full_over(q, Quantifier::Forall)) {
        throw WrongDomain("initial assignments must be full universal assignments");
      }
      if (!st.A.contains(a)) add_forall_group(a, AssignmentSet::kInitial);
    }
  } else {
    const AssignmentSet initial = initialize_A(q, config_);
    for (const Assignment& a : initial.items()) add_forall_group(a, AssignmentSet::kInitial);
  }

  const std::uint64_t bound = iteration_bound(q);
  auto finish = [&](Verdict v) {
    result.verdict = v;
    result.iterations = st.iteration;
    result.a_size = st.A.size();
    result.s_size = st.S.size();
    st.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.stats = st.stats;
    return result;
  };

  for (;;) {
    if (config_.max_iterations && st.iteration >= *config_.max_iterations) return finish(Verdict::Unknown);
    if (budget().exhausted()) return finish(Verdict::Unknown);
    ++st.iteration;
    if (config_.verify_invariants && st.stats.resets == 0 && st.iteration > bound) ++st.stats.bound_violations;

    IterationStats it;
    it.iteration = st.iteration;

    // psi_forall
    {
      const auto& s0 = st.forall_solver->stats();
      const std::uint64_t c0 = s0.conflicts;
      const double t0 = s0.seconds;
      const sat::Status status = st.forall_solver->solve(st.group_selectors, budget());
      it.forall_conflicts = st.forall_solver->stats().conflicts - c0;
      it.forall_seconds = st.forall_solver->stats().seconds - t0;
      it.forall_clauses = st.forall_solver->num_clauses();
      it.exists_clauses = st.exists_solver->num_clauses();
      it.a_size = st.A.size();
      it.s_size = st.S.size();
      if (status == sat::Status::Unknown) {
        st.stats.iterations.push_back(it);
        return finish(Verdict::Unknown);
      }
      if (status == sat::Status::Unsat) {
        const auto failed = st.forall_solver->failed_assumptions();
        for (std::size_t g = 0; g < st.group_selectors.size(); ++g) {
          if (std::find(failed.begin(), failed.end(), st.group_selectors[g]) != failed.end()) {
            result.witness.push_back(st.A[g]);
          }
        }
        it.terminal = Verdict::False;
        st.stats.iterations.push_back(it);
        if (config_.certificate && !st.matrix_extended) result.certificate = extract_certificate(q, result.witness);
        return finish(Verdict::False);
      }
    }

    std::optional<AssignmentSet> previous_A;
    if (config_.verify_invariants) previous_A = st.A;

    const auto new_s = extract_new(st.forall_solver->model(), st.A, st.forall_table, st.S, q, config_.multi_extract);
    it.new_s = new_s.size();
    // Growth needs the completion property, which single extraction does
    // not maintain.
    if (new_s.empty() && config_.multi_extract) {
      ++st.stats.growth_violations;
      if (config_.verify_invariants) throw InvariantViolation("no new existential assignment was extracted");
    }
    for (const Assignment& sigma : new_s) add_exists_constraint(sigma, static_cast<std::int64_t>(st.iteration));

    // psi_exists
    const auto& e0 = st.exists_solver->stats();
    const std::uint64_t ec0 = e0.conflicts;
    const double et0 = e0.seconds;
    const sat::Status status = st.exists_solver->solve({}, budget());
    it.exists_conflicts = st.exists_solver->stats().conflicts - ec0;
    it.exists_seconds = st.exists_solver->stats().seconds - et0;
    it.exists_clauses = st.exists_solver->num_clauses();
    it.s_size = st.S.size();
    if (status == sat::Status::Unknown) {
      st.stats.iterations.push_back(it);
      return finish(Verdict::Unknown);
    }
    if (status == sat::Status::Unsat) {
      if (config_.verify_invariants && config_.multi_extract) {
        const CompletionReport report = check_completion(q, *previous_A, st.S, st.A);
        st.stats.completion_violations += report.uncompleted_alphas.size();
      }
      it.terminal = Verdict::True;
      st.stats.iterations.push_back(it);
      result.witness = st.S.items();
      return finish(Verdict::True);
    }

    const std::vector<Value> rho(st.exists_solver->model().begin(), st.exists_solver->model().end());
    if (reset_due()) {
      AssignmentSet old = st.A;
      reset_A(rho);
      it.reset = true;
      for (const Assignment& a : st.A.items()) it.new_a += old.contains(a) ? 0 : 1;
    } else {
      const auto new_a = extract_new(rho, st.S, st.exists_table, st.A, q, config_.multi_extract);
      it.new_a = new_a.size();
      if (new_a.empty() && config_.multi_extract) {
        ++st.stats.growth_violations;
        if (config_.verify_invariants) throw InvariantViolation("no new universal assignment was extracted");
      }
      for (const Assignment& alpha : new_a) add_forall_group(alpha, static_cast<std::int64_t>(st.iteration));
    }
    it.a_size = st.A.size();
    it.forall_clauses = st.forall_solver->num_clauses();

    if (config_.verify_invariants && config_.multi_extract) {
      const CompletionReport report = check_completion(q, *previous_A, st.S, st.A);
      st.stats.completion_violations += report.uncompleted_alphas.size() + report.uncompleted_sigmas.size();
    }
    st.stats.iterations.push_back(it);

    if (config_.on_iteration) {
      std::vector<Clause> extra = config_.on_iteration(st);
      if (!extra.empty()) extend_matrix(std::move(extra));
    }
  }
}

SolveResult solve(const Qbf& q, const SolveConfig& config) {
  Expander expander(q, config);
  return expander.run();
}

}  // namespace expqbf
