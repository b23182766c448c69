#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "expqbf/annotate.hpp"
#include "expqbf/formula.hpp"

namespace testing {

using expqbf::Assignment;
using expqbf::Block;
using expqbf::Clause;
using expqbf::Lit;
using expqbf::Qbf;
using expqbf::Quantifier;
using expqbf::Value;

// Prefix given as ('a'|'e', vars) pairs, clauses as DIMACS ints.
inline Qbf make_qbf(const std::vector<std::pair<char, std::vector<int>>>& prefix,
                    const std::vector<std::vector<int>>& clauses) {
  std::vector<Block> blocks;
  for (const auto& [kind, vars] : prefix) blocks.push_back({kind == 'a' ? Quantifier::Forall : Quantifier::Exists, vars});
  std::vector<Clause> matrix;
  for (const auto& c : clauses) {
    Clause cl;
    for (int l : c) cl.push_back(Lit(l));
    matrix.push_back(std::move(cl));
  }
  return Qbf(std::move(blocks), std::move(matrix));
}

// forall a exists x forall b exists y; a=1 x=2 b=3 y=4.
enum : int { kA = 1, kX = 2, kB = 3, kY = 4, kT = 5 };

// The true instance has matrix: (a|x|y) & (-a|-x|y) & (b|-y).
inline Qbf alt4_true() { return make_qbf({{'a', {kA}}, {'e', {kX}}, {'a', {kB}}, {'e', {kY}}}, {{1, 2, 4}, {-1, -2, 4}, {3, -4}}); }

// (a & b & -x & -y) | (-a & x & (b <-> y)) with t <-> first disjunct.
inline Qbf alt4_false() {
  return make_qbf({{'a', {kA}}, {'e', {kX}}, {'a', {kB}}, {'e', {kY, kT}}},
                  {{-5, 1}, {-5, 3}, {-5, -2}, {-5, -4}, {5, -1}, {5, 2}, {5, -3, 4}, {5, 3, -4}});
}

inline std::vector<std::vector<int>> as_ints(const std::vector<Clause>& clauses) {
  std::vector<std::vector<int>> out;
  for (const Clause& c : clauses) {
    std::vector<int> v;
    for (Lit l : c) v.push_back(l.dimacs());
    std::sort(v.begin(), v.end());
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Renders an instantiated literal as e.g. "-2^10" using the table.
inline std::string render(const expqbf::InternTable& table, int lit) {
  const auto av = table.reverse(lit < 0 ? -lit : lit);
  if (!av) return "?";
  std::string s = (lit < 0 ? "-" : "") + std::to_string(av->base);
  if (!av->annotation.empty()) s += "^" + av->annotation.to_string();
  return s;
}

inline std::vector<std::vector<std::string>> render(const expqbf::InternTable& table,
                                                    const expqbf::Instantiation& inst) {
  std::vector<std::vector<std::string>> out;
  for (const auto& ic : inst.clauses) {
    std::vector<std::string> c;
    for (int l : ic.literals) c.push_back(render(table, l));
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Random formula over `nvars` variables with random alternation.
inline Qbf random_qbf(std::mt19937_64& rng, int nvars, int nclauses, int max_width) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<std::pair<char, std::vector<int>>> prefix;
  for (int v = 1; v <= nvars; ++v) {
    const char kind = coin(rng) ? 'a' : 'e';
    if (prefix.empty() || prefix.back().first != kind) prefix.push_back({kind, {}});
    prefix.back().second.push_back(v);
  }
  std::vector<std::vector<int>> clauses;
  std::uniform_int_distribution<int> var(1, nvars);
  std::uniform_int_distribution<int> width(1, max_width);
  for (int i = 0; i < nclauses; ++i) {
    std::vector<int> c;
    const int w = width(rng);
    for (int k = 0; k < w; ++k) c.push_back(coin(rng) ? var(rng) : -var(rng));
    clauses.push_back(std::move(c));
  }
  return make_qbf(prefix, clauses);
}

// Each variable independently True, False or (if allow_unassigned) epsilon.
inline Assignment random_assignment(std::mt19937_64& rng, const Qbf& q, bool allow_unassigned) {
  Assignment a(q.num_vars(), expqbf::Domain::Mixed);
  std::uniform_int_distribution<int> pick(0, allow_unassigned ? 2 : 1);
  for (std::size_t p = 0; p < q.num_vars(); ++p) a.set(p, static_cast<Value>(pick(rng)));
  return a;
}

inline Assignment full_over(const Qbf& q, Quantifier side, std::uint64_t bits) {
  Assignment a(q.num_vars(), side == Quantifier::Forall ? expqbf::Domain::Universal : expqbf::Domain::Existential);
  std::size_t k = 0;
  for (int v : q.vars_of(side)) a.assign(q, v, expqbf::to_value(((bits >> k++) & 1U) != 0));
  return a;
}

// Truth value of clauses over base variables under a full total assignment
// given as value-by-variable-id.
inline bool eval_clauses(const std::vector<Clause>& clauses, const std::vector<int>& value_by_var) {
  for (const Clause& c : clauses) {
    bool sat = false;
    for (Lit l : c) sat = sat || ((value_by_var[static_cast<std::size_t>(l.var())] > 0) != l.negative());
    if (!sat) return false;
  }
  return true;
}

// Exhaustive satisfiability of a DIMACS clause list.
inline bool brute_force_sat(int nvars, const std::vector<std::vector<int>>& cnf, const std::vector<int>& units = {}) {
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nvars); ++bits) {
    auto val = [&](int l) {
      const bool v = ((bits >> (std::abs(l) - 1)) & 1U) != 0;
      return l > 0 ? v : !v;
    };
    bool ok = std::all_of(units.begin(), units.end(), val);
    for (const auto& c : cnf) {
      if (!ok) break;
      ok = std::any_of(c.begin(), c.end(), val);
    }
    if (ok) return true;
  }
  return false;
}

inline std::vector<std::vector<int>> random_cnf(std::mt19937_64& rng, int nvars, int nclauses, int width) {
  std::uniform_int_distribution<int> var(1, nvars);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<std::vector<int>> cnf;
  for (int i = 0; i < nclauses; ++i) {
    std::vector<int> c;
    for (int k = 0; k < width; ++k) c.push_back(coin(rng) ? var(rng) : -var(rng));
    cnf.push_back(std::move(c));
  }
  return cnf;
}

}  // namespace testing
