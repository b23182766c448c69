#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/stat.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "expqbf/cdcl.hpp"
#include "expqbf/error.hpp"
#include "expqbf/expand.hpp"
#include "expqbf/external_solver.hpp"
#include "expqbf/rup.hpp"
#include "support.hpp"

using namespace expqbf;
using namespace expqbf::sat;
using namespace testing;

namespace {

void add_all(Backend& s, const std::vector<std::vector<int>>& cnf) {
  for (const auto& c : cnf) s.add_clause(c);
}

bool model_satisfies(const Backend& s, const std::vector<std::vector<int>>& cnf) {
  for (const auto& c : cnf) {
    bool sat = false;
    for (int l : c) sat = sat || s.value(std::abs(l)) == (l > 0 ? Value::True : Value::False);
    if (!sat) return false;
  }
  return true;
}

// n+1 pigeons into n holes.
std::vector<std::vector<int>> pigeonhole(int n) {
  auto var = [n](int p, int h) { return p * n + h + 1; };
  std::vector<std::vector<int>> cnf;
  for (int p = 0; p <= n; ++p) {
    std::vector<int> c;
    for (int h = 0; h < n; ++h) c.push_back(var(p, h));
    cnf.push_back(c);
  }
  for (int h = 0; h < n; ++h)
    for (int p = 0; p <= n; ++p)
      for (int r = p + 1; r <= n; ++r) cnf.push_back({-var(p, h), -var(r, h)});
  return cnf;
}

std::filesystem::path write_script(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / ("expqbf_sat_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << "#!/bin/sh\n" << body;
  ::chmod(path.c_str(), 0755);
  return path;
}

}  // namespace

TEST_CASE("fresh solver") {
  CdclSolver s;
  CHECK(s.num_clauses() == 0);
  CHECK(s.num_vars() == 0);
  CHECK(s.solve({}) == Status::Sat);
}

TEST_CASE("unit conflict") {
  CdclSolver s;
  s.add_clause(std::vector<int>{1});
  s.add_clause(std::vector<int>{-1});
  CHECK(s.solve({}) == Status::Unsat);
  CHECK(s.failed_assumptions().empty());
  CHECK_FALSE(s.okay());
}

TEST_CASE("model and assumptions") {
  CdclSolver s;
  add_all(s, {{1, 2}, {-1}});
  REQUIRE(s.solve({}) == Status::Sat);
  CHECK(s.value(1) == Value::False);
  CHECK(s.value(2) == Value::True);
  const std::vector<int> not2{-2};
  CHECK(s.solve(not2) == Status::Unsat);
  CHECK(std::vector<int>(s.failed_assumptions().begin(), s.failed_assumptions().end()) == not2);
  // Still usable afterwards.
  CHECK(s.solve({}) == Status::Sat);
  const auto outcome = sat::solve(s, not2);
  CHECK(outcome.status == Status::Unsat);
  CHECK(outcome.model.empty());
}

TEST_CASE("empty clause") {
  CdclSolver s;
  s.add_clause(std::vector<int>{});
  const std::vector<int> assume{1, 2};
  CHECK(s.solve(assume) == Status::Unsat);
  CHECK(s.failed_assumptions().empty());
}

TEST_CASE("instances are independent") {
  CdclSolver a, b;
  a.add_clause(std::vector<int>{1});
  b.add_clause(std::vector<int>{-1});
  REQUIRE(a.solve({}) == Status::Sat);
  REQUIRE(b.solve({}) == Status::Sat);
  CHECK(a.value(1) == Value::True);
  CHECK(b.value(1) == Value::False);
}

TEST_CASE("incremental clause addition") {
  CdclSolver s;
  s.add_clause(std::vector<int>{1, 2, 3});
  CHECK(s.solve({}) == Status::Sat);
  s.add_clause(std::vector<int>{-1});
  s.add_clause(std::vector<int>{-2});
  REQUIRE(s.solve({}) == Status::Sat);
  CHECK(s.value(3) == Value::True);
  s.add_clause(std::vector<int>{-3});
  CHECK(s.solve({}) == Status::Unsat);
}

TEST_CASE("agreement with exhaustive enumeration") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 600; ++round) {
    const int n = 3 + static_cast<int>(rng() % 14);
    const int m = static_cast<int>(n * (2.0 + (rng() % 300) / 100.0));
    const auto cnf = random_cnf(rng, n, m, 3);
    CdclSolver s;
    add_all(s, cnf);
    std::vector<int> assume;
    for (int k = 0; k < static_cast<int>(rng() % 4); ++k) {
      const int v = 1 + static_cast<int>(rng() % n);
      assume.push_back(rng() & 1U ? v : -v);
    }
    const bool expect_plain = brute_force_sat(n, cnf);
    REQUIRE(s.solve({}) == (expect_plain ? Status::Sat : Status::Unsat));
    if (expect_plain) CHECK(model_satisfies(s, cnf));
    const bool expect = brute_force_sat(n, cnf, assume);
    const Status st = s.solve(assume);
    REQUIRE(st == (expect ? Status::Sat : Status::Unsat));
    if (expect) {
      CHECK(model_satisfies(s, cnf));
      for (int l : assume) CHECK(s.value(std::abs(l)) == (l > 0 ? Value::True : Value::False));
    } else {
      // The reported subset alone already forces unsatisfiability.
      const std::vector<int> failed(s.failed_assumptions().begin(), s.failed_assumptions().end());
      for (int l : failed) CHECK(std::find(assume.begin(), assume.end(), l) != assume.end());
      CHECK_FALSE(brute_force_sat(n, cnf, failed));
    }
  }
}

TEST_CASE("duplicate clauses change nothing") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 100; ++round) {
    const auto cnf = random_cnf(rng, 10, 40, 3);
    CdclSolver a, b;
    add_all(a, cnf);
    add_all(b, cnf);
    add_all(b, cnf);
    const Status sa = a.solve({});
    CHECK(sa == b.solve({}));
    if (sa == Status::Sat) CHECK(model_satisfies(b, cnf));
  }
}

TEST_CASE("same inputs give the same model") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 50; ++round) {
    const auto cnf = random_cnf(rng, 40, 150, 3);
    CdclSolver a, b;
    add_all(a, cnf);
    add_all(b, cnf);
    const Status sa = a.solve({});
    REQUIRE(sa == b.solve({}));
    if (sa == Status::Sat) {
      CHECK(std::vector<Value>(a.model().begin(), a.model().end()) ==
            std::vector<Value>(b.model().begin(), b.model().end()));
    }
  }
}

TEST_CASE("budgets and cancellation") {
  const auto hard = pigeonhole(8);
  {
    CdclSolver s;
    add_all(s, hard);
    Budget b;
    b.conflicts = 5;
    CHECK(s.solve({}, b) == Status::Unknown);
  }
  {
    CdclSolver s;
    add_all(s, hard);
    std::atomic<bool> stop{true};
    Budget b;
    b.cancel = &stop;
    CHECK(s.solve({}, b) == Status::Unknown);
  }
  {
    CdclSolver s;
    add_all(s, pigeonhole(5));
    CHECK(s.solve({}) == Status::Unsat);
  }
}

TEST_CASE("learnt clause callback") {
  CdclSolver s;
  int reported = 0;
  s.set_learn_callback(3, [&](std::span<const int> c) {
    ++reported;
    CHECK(c.size() <= 3);
  });
  add_all(s, pigeonhole(5));
  CHECK(s.solve({}) == Status::Unsat);
  CHECK(reported > 0);
}

TEST_CASE("refutation traces pass an independent check") {
  {
    CdclOptions o;
    o.record_trace = true;
    CdclSolver s(o);
    add_all(s, {{1}, {-1}});
    REQUIRE(s.solve({}) == Status::Unsat);
    const auto trace = s.proof_trace();
    REQUIRE_FALSE(trace.empty());
    CHECK(trace.back().literals.empty());
  }
  {
    CdclSolver s;
    add_all(s, {{1}, {-1}});
    s.solve({});
    CHECK_THROWS_AS(s.proof_trace(), TraceUnavailable);
  }
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    const int n = 4 + static_cast<int>(rng() % 10);
    const auto cnf = random_cnf(rng, n, 6 * n, 3);
    CdclOptions o;
    o.record_trace = true;
    CdclSolver s(o);
    add_all(s, cnf);
    if (s.solve({}) != Status::Unsat) {
      CHECK_THROWS_AS(s.proof_trace(), TraceUnavailable);
      continue;
    }
    ++checked;
    RupChecker rup;
    for (const auto& c : cnf) rup.add_clause(c);
    bool empty_seen = false;
    for (const TraceRecord& r : s.proof_trace()) {
      if (r.deletion) continue;
      CHECK(rup.implies(r.literals));
      rup.add_clause(r.literals);
      empty_seen = empty_seen || r.literals.empty();
    }
    CHECK(empty_seen);
  }
  CHECK(checked > 50);
}

TEST_CASE("rup checker") {
  RupChecker r;
  r.add_clause(std::vector<int>{1, 2});
  r.add_clause(std::vector<int>{-1, 2});
  CHECK(r.implies(std::vector<int>{2}));
  CHECK_FALSE(r.implies(std::vector<int>{1}));
  CHECK_FALSE(r.implies(std::vector<int>{}));
  CHECK_FALSE(r.inconsistent());
  r.add_clause(std::vector<int>{-2});
  CHECK(r.inconsistent());
  CHECK(r.implies(std::vector<int>{}));
}

TEST_CASE("external solver protocol") {
  const std::filesystem::path helper(EXPQBF_HELPER);
  const auto sat = external_solve(helper, {{1, 2}, {-1}});
  REQUIRE(sat.status == Status::Sat);
  CHECK(sat.model[1] == Value::False);
  CHECK(sat.model[2] == Value::True);
  CHECK(external_solve(helper, {{1}, {-1}}).status == Status::Unsat);
  CHECK(external_solve(helper, {{1}, {}}).status == Status::Unsat);

  CHECK_THROWS_AS(external_solve("/nonexistent/solver", {{1}}), SpawnFailure);
  CHECK_THROWS_AS(external_solve(write_script("garbage.sh", "echo hello\nexit 10\n"), {{1}}), ProtocolViolation);
  CHECK_THROWS_AS(external_solve(write_script("wrongcode.sh", "echo 's SATISFIABLE'\necho 'v 1 0'\nexit 20\n"), {{1}}),
                  ProtocolViolation);
  CHECK_THROWS_AS(external_solve(write_script("badmodel.sh", "echo 's SATISFIABLE'\necho 'v -1 0'\nexit 10\n"), {{1}}),
                  ProtocolViolation);
  CHECK_THROWS_AS(external_solve(write_script("unterminated.sh", "echo 's SATISFIABLE'\necho 'v 1'\nexit 10\n"), {{1}}),
                  ProtocolViolation);
  CHECK_THROWS_AS(external_solve(write_script("twice.sh", "echo 's UNSATISFIABLE'\necho 's UNSATISFIABLE'\nexit 20\n"),
                                 {{1}}),
                  ProtocolViolation);
  // Unlisted variables default to false.
  const auto partial = external_solve(write_script("partial.sh", "echo 's SATISFIABLE'\necho 'v 1 0'\nexit 10\n"),
                                      {{1}, {1, 2}});
  REQUIRE(partial.status == Status::Sat);
  CHECK(partial.model[2] == Value::False);
}

TEST_CASE("external backend adapter") {
  ExternalSolver s(EXPQBF_HELPER);
  add_all(s, {{1, 2}, {-1, 3}});
  CHECK(s.solve({}) == Status::Sat);
  const std::vector<int> assume{1, -3};
  CHECK(s.solve(assume) == Status::Unsat);
  CHECK(std::vector<int>(s.failed_assumptions().begin(), s.failed_assumptions().end()) == assume);
  CHECK(s.num_clauses() == 2);

  BackendSpec spec;
  spec.kind = BackendSpec::Kind::External;
  spec.external_path = EXPQBF_HELPER;
  SolveConfig config;
  config.backend = spec;
  CHECK(expqbf::solve(alt4_true(), config).verdict == Verdict::True);
  CHECK(expqbf::solve(alt4_false(), config).verdict == Verdict::False);
}
