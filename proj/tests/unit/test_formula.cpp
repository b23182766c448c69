#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "expqbf/error.hpp"
#include "support.hpp"

using namespace expqbf;
using namespace testing;

TEST_CASE("construction canonicalizes clauses") {
  const Qbf q = make_qbf({{'e', {1, 2}}}, {{2, 1, 2}, {1, -1}, {-2}});
  CHECK(q.removed_tautologies() == 1);
  REQUIRE(q.matrix().size() == 2);
  CHECK(as_ints({q.matrix()[0]}) == std::vector<std::vector<int>>{{1, 2}});
  CHECK(q.num_vars() == 2);
  CHECK(q.is_normalized());
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS_AS(make_qbf({{'e', {1}}, {'a', {1}}}, {}), FormulaError);
  CHECK_THROWS_AS(make_qbf({{'e', {1}}}, {{2}}), FormulaError);
  CHECK_THROWS_AS(make_qbf({{'e', {0}}}, {}), FormulaError);
}

TEST_CASE("prefix lookups") {
  const Qbf q = alt4_true();
  CHECK(q.position(kA) == 0);
  CHECK(q.position(kY) == 3);
  CHECK(q.info(kB).quantifier == Quantifier::Forall);
  CHECK(q.info(kB).block == 2);
  CHECK(std::vector<int>(q.universals().begin(), q.universals().end()) == std::vector<int>{kA, kB});
  CHECK(std::vector<int>(q.existentials().begin(), q.existentials().end()) == std::vector<int>{kX, kY});
  CHECK_FALSE(q.contains(7));
}

TEST_CASE("restriction") {
  const Qbf q = alt4_true();
  const Assignment sigma = Assignment::of(q, {{kA, true}, {kX, true}});
  const std::vector<int> xy{kX, kY};
  const Assignment tau = restrict(q, sigma, xy);
  CHECK(tau == Assignment::of(q, {{kX, true}}));
  CHECK(restrict(q, sigma, std::vector<int>{}).count_assigned() == 0);
  const std::vector<int> all{kA, kX, kB, kY};
  CHECK(restrict(q, sigma, all) == sigma);
}

TEST_CASE("application drops satisfied clauses and falsified literals") {
  const Qbf q = alt4_true();
  const Assignment sigma = Assignment::of(q, {{kA, true}, {kX, true}});
  CHECK(as_ints(apply(sigma, q)) == std::vector<std::vector<int>>{{-4, 3}, {4}});
  const Assignment tau = Assignment::of(q, {{kX, true}});
  CHECK(as_ints(apply(tau, q)) == std::vector<std::vector<int>>{{-4, 3}, {-1, 4}});
  const Assignment none(q.num_vars());
  CHECK(as_ints(apply(none, q)) == as_ints(q.matrix()));
  CHECK(evaluate(sigma, q) == Value::Unassigned);
}

TEST_CASE("composition") {
  const Qbf q = alt4_true();
  const Assignment a = Assignment::of(q, {{kA, true}, {kB, false}});
  const Assignment s = Assignment::of(q, {{kX, false}, {kY, false}});
  const Assignment c = compose(a, s);
  CHECK(c.count_assigned() == 4);
  CHECK(c.domain() == Domain::Mixed);
  CHECK(c.value_of(q, kB) == Value::False);
  CHECK(compose(a, Assignment(q.num_vars())) == a);
  CHECK(compose(a, a) == a);
  CHECK_THROWS_AS(compose(a, Assignment::of(q, {{kA, false}})), ConflictingAssignments);
  CHECK(evaluate(c, q) == Value::True);
  CHECK(satisfies(q, a, s));
  const Assignment all_false = Assignment::of(q, {{kA, false}, {kB, false}});
  CHECK(evaluate(compose(all_false, s), q) == Value::False);
  CHECK_FALSE(satisfies(q, all_false, s));
}

TEST_CASE("assignment domain tags") {
  const Qbf q = alt4_true();
  CHECK(Assignment::of(q, {{kA, true}}).domain() == Domain::Universal);
  CHECK(Assignment::of(q, {{kX, true}}).domain() == Domain::Existential);
  CHECK(Assignment::of(q, {}, Domain::Existential).domain() == Domain::Existential);
  CHECK(Assignment::of(q, {{kA, true}, {kB, true}}).is_full_over(q, Quantifier::Forall));
  CHECK_FALSE(Assignment::of(q, {{kA, true}}).is_full_over(q, Quantifier::Forall));
  CHECK_THROWS_AS(Assignment::of(q, {{9, true}}), FormulaError);
}

TEST_CASE("prefix normalization") {
  const Qbf q = make_qbf({{'e', {1}}, {'e', {2}}, {'a', {}}, {'a', {3}}, {'e', {4}}}, {{1, 3}, {2, -4}});
  CHECK_FALSE(q.is_normalized());
  const Qbf n = normalize_prefix(q);
  CHECK(n.is_normalized());
  REQUIRE(n.prefix().size() == 3);
  CHECK(n.prefix()[0].vars == std::vector<int>{1, 2});
  CHECK(structurally_equal(normalize_prefix(n), n));

  const Qbf unused = make_qbf({{'a', {1}}, {'e', {2}}, {'a', {3}}}, {{2}});
  CHECK(normalize_prefix(unused).num_vars() == 3);
  const Qbf dropped = normalize_prefix(unused, {.drop_unused = true});
  CHECK(dropped.num_vars() == 1);
  CHECK(dropped.prefix().size() == 1);
}

TEST_CASE("structural equality ignores clause order") {
  const Qbf a = make_qbf({{'e', {1, 2}}}, {{1}, {2, -1}});
  const Qbf b = make_qbf({{'e', {1, 2}}}, {{-1, 2}, {1}});
  const Qbf c = make_qbf({{'e', {2, 1}}}, {{-1, 2}, {1}});
  CHECK(structurally_equal(a, b));
  CHECK_FALSE(structurally_equal(a, c));
}

TEST_CASE("property: composition and application laws") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    const Qbf q = random_qbf(rng, 1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 12), 4);
    const Assignment full = random_assignment(rng, q, false);
    // Split one assignment into two disjoint pieces.
    Assignment left(q.num_vars()), right(q.num_vars());
    std::vector<int> left_vars;
    for (std::size_t p = 0; p < q.num_vars(); ++p) {
      if (rng() % 3 == 0) continue;
      if (rng() & 1U) {
        left.set(p, full[p]);
        left_vars.push_back(q.var_at(p));
      } else {
        right.set(p, full[p]);
      }
    }
    CHECK(compose(left, right) == compose(right, left));
    const Assignment both = compose(left, right);
    CHECK(restrict(q, both, left_vars) == left);

    const auto direct = as_ints(apply(both, q));
    const Qbf after_right(q.prefix(), apply(right, q));
    CHECK(as_ints(apply(left, after_right)) == direct);

    const auto whole = apply(full, q);
    const bool all_empty = std::all_of(whole.begin(), whole.end(), [](const Clause& c) { return c.empty(); });
    CHECK(all_empty);
    CHECK(evaluate(full, q) == (whole.empty() ? Value::True : Value::False));
  }
}
