#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>

#include "expqbf/error.hpp"
#include "expqbf/expand.hpp"
#include "expqbf/oracle.hpp"
#include "support.hpp"

using namespace expqbf;
using namespace testing;

namespace {

std::vector<Value> model_for(const InternTable& table,
                             std::initializer_list<std::tuple<int, const char*, Value>> entries) {
  std::vector<Value> m(static_cast<std::size_t>(table.max_id()) + 1, Value::Unassigned);
  for (const auto& [var, bits, value] : entries) {
    const auto ann = table.find_annotation(*Annotation::parse(bits));
    REQUIRE(ann.has_value());
    const auto id = table.find(var, *ann);
    REQUIRE(id.has_value());
    m[*id] = value;
  }
  return m;
}

AssignmentSet set_of(std::initializer_list<Assignment> items) {
  AssignmentSet s;
  for (const Assignment& a : items) s.insert(a, AssignmentSet::kInitial);
  return s;
}

constexpr Value T = Value::True;
constexpr Value F = Value::False;

}  // namespace

TEST_CASE("assignment set") {
  const Qbf q = alt4_true();
  AssignmentSet s;
  const Assignment a = Assignment::of(q, {{kA, true}, {kB, false}});
  const Assignment b = Assignment::of(q, {{kA, false}, {kB, false}});
  CHECK(s.insert(a, 3));
  CHECK_FALSE(s.insert(a, 4));
  CHECK(s.insert(b, AssignmentSet::kInitial));
  CHECK(s.size() == 2);
  CHECK(s.origin(0) == 3);
  CHECK(s[1] == b);
  CHECK(s.contains(b));
  s.clear();
  CHECK(s.empty());
  CHECK_FALSE(s.contains(a));
}

TEST_CASE("initial universal assignments") {
  const Qbf q = alt4_true();
  SolveConfig c;
  const AssignmentSet per_block = initialize_A(q, c);
  REQUIRE(per_block.size() == 2);
  CHECK(per_block[0] == Assignment::of(q, {{kA, false}, {kB, true}}));
  CHECK(per_block[1] == Assignment::of(q, {{kA, true}, {kB, false}}));

  c.init_mode = InitMode::AllFalse;
  CHECK(initialize_A(q, c)[0] == Assignment::of(q, {{kA, false}, {kB, false}}));
  c.init_mode = InitMode::AllTrue;
  CHECK(initialize_A(q, c)[0] == Assignment::of(q, {{kA, true}, {kB, true}}));
  c.init_mode = InitMode::SingleRandom;
  c.seed = 42;
  const AssignmentSet r1 = initialize_A(q, c);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] == initialize_A(q, c)[0]);
  CHECK(r1[0].is_full_over(q, Quantifier::Forall));

  const Qbf no_forall = make_qbf({{'e', {1}}}, {{1}});
  const AssignmentSet only = initialize_A(no_forall, SolveConfig{});
  REQUIRE(only.size() == 1);
  CHECK(only[0].count_assigned() == 0);
}

TEST_CASE("four-variable example from a fixed first universal assignment") {
  const Qbf q = alt4_true();
  SolveConfig c;
  c.initial_assignments = {Assignment::of(q, {{kA, true}, {kB, false}})};
  c.verify_invariants = true;
  const SolveResult r = solve(q, c);
  CHECK(r.verdict == Verdict::True);
  CHECK(r.s_size <= 4);
  const Assignment sigma2 = Assignment::of(q, {{kX, true}, {kY, false}});
  CHECK(std::find(r.witness.begin(), r.witness.end(), sigma2) != r.witness.end());
  CHECK(r.stats.growth_violations == 0);
  CHECK(r.stats.completion_violations == 0);
  CHECK(r.stats.bound_violations == 0);
  CHECK(r.witness.size() == r.s_size);
}

TEST_CASE("default run of the four-variable example") {
  const SolveResult r = solve(alt4_true());
  CHECK(r.verdict == Verdict::True);
  CHECK(r.iterations <= 5);
  REQUIRE_FALSE(r.stats.iterations.empty());
  CHECK(r.stats.iterations.back().terminal == Verdict::True);
}

TEST_CASE("false example") {
  const Qbf q = alt4_false();
  REQUIRE(decide_semantic(q) == Verdict::False);
  SolveConfig c;
  c.verify_invariants = true;
  const SolveResult r = solve(q, c);
  CHECK(r.verdict == Verdict::False);
  CHECK(r.a_size <= 4);
  CHECK_FALSE(r.witness.empty());
  for (const Assignment& a : r.witness) CHECK(a.is_full_over(q, Quantifier::Forall));
  CHECK(r.stats.iterations.back().terminal == Verdict::False);

  // Starting from both universals false, as in the worked run.
  SolveConfig from_zero = c;
  from_zero.initial_assignments = {Assignment::of(q, {{kA, false}, {kB, false}})};
  const SolveResult z = solve(q, from_zero);
  CHECK(z.verdict == Verdict::False);
  CHECK(z.iterations > 1);
  CHECK(z.a_size <= 4);
  CHECK(z.stats.growth_violations == 0);
  CHECK(z.stats.completion_violations == 0);
}

TEST_CASE("quantifier order matters") {
  const Qbf ex = make_qbf({{'e', {1}}, {'a', {2}}}, {{-1, 2}, {1, -2}});
  const Qbf fa = make_qbf({{'a', {2}}, {'e', {1}}}, {{-1, 2}, {1, -2}});
  CHECK(solve(ex).verdict == Verdict::False);
  CHECK(solve(fa).verdict == Verdict::True);
}

TEST_CASE("degenerate formulas") {
  CHECK(solve(make_qbf({{'a', {1}}, {'e', {2}}}, {})).verdict == Verdict::True);
  CHECK(solve(make_qbf({{'a', {1}}, {'e', {2}}}, {{}})).verdict == Verdict::False);
  CHECK(solve(make_qbf({{'e', {1, 2}}}, {{1, 2}, {-1}})).verdict == Verdict::True);
  CHECK(solve(make_qbf({{'e', {1}}}, {{1}, {-1}})).verdict == Verdict::False);
  CHECK(solve(make_qbf({{'a', {1, 2}}}, {{1, 2}})).verdict == Verdict::False);
  CHECK(solve(make_qbf({}, {})).verdict == Verdict::True);
}

TEST_CASE("extraction of new existential assignments") {
  const Qbf q = alt4_true();
  InternTable table(Side::Forall);
  const Assignment alpha0 = Assignment::of(q, {{kA, true}, {kB, false}});
  const Assignment alpha1 = Assignment::of(q, {{kA, false}, {kB, true}});
  instantiate(q, alpha0, table);
  instantiate(q, alpha1, table);
  const auto tau = model_for(table, {{kX, "1", F}, {kX, "0", T}, {kY, "10", F}, {kY, "01", F}});
  const AssignmentSet A = set_of({alpha0, alpha1});
  const Assignment sigma1 = Assignment::of(q, {{kX, false}, {kY, false}});
  const Assignment sigma2 = Assignment::of(q, {{kX, true}, {kY, false}});

  CHECK(extract_new(tau, A, table, set_of({sigma1}), q, true) == std::vector<Assignment>{sigma2});
  CHECK(extract_new(tau, A, table, AssignmentSet{}, q, true) == std::vector<Assignment>{sigma1, sigma2});
  CHECK(extract_new(tau, A, table, AssignmentSet{}, q, false) == std::vector<Assignment>{sigma1});
  CHECK(extract_new(tau, A, table, set_of({sigma1, sigma2}), q, true).empty());
}

TEST_CASE("extraction on the false example") {
  const Qbf q = alt4_false();
  InternTable table(Side::Forall);
  const Assignment a0 = Assignment::of(q, {{kA, false}, {kB, false}});
  const Assignment a1 = Assignment::of(q, {{kA, false}, {kB, true}});
  const Assignment a2 = Assignment::of(q, {{kA, true}, {kB, true}});
  for (const Assignment& a : {a0, a1, a2}) instantiate(q, a, table);
  const auto tau = model_for(table, {{kX, "0", T}, {kY, "00", F}, {kY, "01", T}, {kX, "1", F}, {kY, "11", F}});
  const Assignment s1 = Assignment::of(q, {{kX, true}, {kY, false}, {kT, false}});
  const Assignment s2 = Assignment::of(q, {{kX, true}, {kY, true}, {kT, false}});
  const Assignment s3 = Assignment::of(q, {{kX, false}, {kY, false}, {kT, false}});
  CHECK(extract_new(tau, set_of({a0, a1, a2}), table, set_of({s1, s2}), q, true) == std::vector<Assignment>{s3});
}

TEST_CASE("completion checks") {
  const Qbf q = alt4_true();
  const Assignment alpha0 = Assignment::of(q, {{kA, true}, {kB, false}});
  const Assignment alpha1 = Assignment::of(q, {{kA, false}, {kB, false}});
  const Assignment sigma1 = Assignment::of(q, {{kX, false}, {kY, false}});
  CHECK(check_completion(q, set_of({alpha0}), set_of({sigma1}), set_of({alpha0, alpha1})).ok());
  const CompletionReport missing = check_completion(q, set_of({alpha0}), set_of({sigma1}), set_of({alpha0}));
  CHECK(missing.uncompleted_sigmas == std::vector<std::size_t>{0});
  CHECK(missing.uncompleted_alphas.empty());
  const CompletionReport lonely = check_completion(q, set_of({alpha1}), set_of({sigma1}), set_of({alpha1}));
  CHECK(lonely.uncompleted_alphas == std::vector<std::size_t>{0});
  CHECK(check_completion(q, AssignmentSet{}, AssignmentSet{}, AssignmentSet{}).ok());
}

TEST_CASE("budgets stop the loop") {
  const Qbf q = alt4_false();
  SolveConfig c;
  c.initial_assignments = {Assignment::of(q, {{kA, false}, {kB, false}})};
  c.max_iterations = 1;
  const SolveResult r = solve(q, c);
  CHECK(r.verdict == Verdict::Unknown);
  CHECK(r.iterations == 1);
  SolveConfig z;
  z.max_iterations = 0;
  CHECK(solve(q, z).iterations == 0);
  std::atomic<bool> stop{true};
  SolveConfig cancelled;
  cancelled.cancel = &stop;
  CHECK(solve(q, cancelled).verdict == Verdict::Unknown);
  SolveConfig timed;
  timed.time_limit_seconds = 0.0;
  CHECK(solve(q, timed).verdict == Verdict::Unknown);
}

TEST_CASE("bad initial assignments") {
  const Qbf q = alt4_true();
  SolveConfig c;
  c.initial_assignments = {Assignment::of(q, {{kA, true}})};
  CHECK_THROWS_AS(solve(q, c), WrongDomain);
}

TEST_CASE("per-iteration hook sees consistent state") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const Qbf q = generate_qbf(seed);
    SolveConfig c;
    c.reset_period = 1 + seed % 3;
    c.verify_invariants = true;
    int resets_seen = 0;
    c.on_iteration = [&](const ExpansionState& st) {
      const auto& last = st.stats.iterations.back();
      const auto rho = st.exists_solver->model();
      for (const Assignment& sigma : st.S.items()) {
        // The abstraction model completes every sigma to a falsifying assignment.
        const Assignment alpha = strip(rho, sigma, st.exists_table, st.qbf);
        CHECK_FALSE(satisfies(st.qbf, alpha, sigma));
      }
      if (last.reset) {
        ++resets_seen;
        CHECK(st.A.size() <= st.S.size());
        const CompletionReport r = check_completion(st.qbf, AssignmentSet{}, st.S, st.A);
        CHECK(r.uncompleted_sigmas.empty());
      }
      return std::vector<Clause>{};
    };
    const SolveResult r = solve(q, c);
    CHECK(r.verdict == decide_semantic(q));
    CHECK(static_cast<std::uint64_t>(resets_seen) == r.stats.resets);
  }
}

TEST_CASE("matrix extension through the hook") {
  const Qbf q = alt4_false();
  SolveConfig c;
  c.initial_assignments = {Assignment::of(q, {{kA, false}, {kB, false}})};
  c.certificate = true;
  int calls = 0;
  c.on_iteration = [&](const ExpansionState& st) {
    ++calls;
    // Re-adding an existing clause keeps the formula equivalent.
    return std::vector<Clause>{st.qbf.matrix().front()};
  };
  const SolveResult r = solve(q, c);
  CHECK(r.verdict == Verdict::False);
  CHECK(calls > 0);
  CHECK_FALSE(r.certificate.has_value());

  SolveConfig plain;
  plain.initial_assignments = c.initial_assignments;
  plain.certificate = true;
  CHECK(solve(q, plain).certificate.has_value());
}

TEST_CASE("property: verdicts agree with the oracle across settings") {
  struct Setting {
    InitMode mode;
    std::uint64_t period;
    bool multi;
    bool rebuild;
  };
  const std::vector<Setting> settings{
      {InitMode::PerBlock, 0, true, false},     {InitMode::PerBlock, 1, true, false},
      {InitMode::PerBlock, 2, true, true},      {InitMode::SingleRandom, 8, true, false},
      {InitMode::AllFalse, 0, false, false},    {InitMode::AllTrue, 3, false, true},
  };
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Qbf q = generate_qbf(seed);
    const Verdict expect = decide_semantic(q);
    for (const Setting& s : settings) {
      SolveConfig c;
      c.init_mode = s.mode;
      c.seed = seed;
      c.reset_period = s.period;
      c.multi_extract = s.multi;
      c.rebuild_on_reset = s.rebuild;
      c.verify_invariants = true;
      const SolveResult r = solve(q, c);
      REQUIRE(r.verdict == expect);
      CHECK(r.stats.growth_violations == 0);
      CHECK(r.stats.completion_violations == 0);
      CHECK(r.stats.bound_violations == 0);
      if (!s.multi) continue;
      if (s.period == 0) {
        const std::size_t bits = std::min(q.universals().size(), q.existentials().size());
        CHECK(r.iterations <= (std::uint64_t{1} << bits) + 1);
      }
      for (const IterationStats& it : r.stats.iterations) {
        if (it.terminal == Verdict::False) continue;
        CHECK(it.new_s >= 1);
        if (it.terminal == Verdict::Unknown && !it.reset) CHECK(it.new_a >= 1);
      }
    }
  }
}
