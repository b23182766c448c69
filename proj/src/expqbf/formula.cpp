#include "expqbf/formula.hpp"

#include <algorithm>
#include <string>

#include "expqbf/error.hpp"

namespace expqbf {

namespace {

// Sorts and deduplicates; returns false if the clause is a tautology.
bool canonicalize(Clause& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i].var() == c[i - 1].var()) return false;
  }
  return true;
}

}  // namespace

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::MalformedHeader: return "malformed header";
    case ParseErrorKind::UnterminatedClause: return "unterminated clause";
    case ParseErrorKind::UnterminatedQuantifier: return "unterminated quantifier line";
    case ParseErrorKind::LiteralOutOfRange: return "literal out of range";
    case ParseErrorKind::QuantifierAfterClauses: return "quantifier after clauses";
    case ParseErrorKind::DuplicateQuantification: return "variable quantified twice";
    case ParseErrorKind::InvalidToken: return "invalid token";
  }
  return "parse error";
}

Qbf::Qbf(std::vector<Block> prefix, std::vector<Clause> matrix) : prefix_(std::move(prefix)) {
  int max_var = 0;
  for (const Block& b : prefix_) {
    for (int v : b.vars) {
      if (v <= 0) throw FormulaError("variable ids must be positive, got " + std::to_string(v));
      max_var = std::max(max_var, v);
    }
  }
  index_.assign(static_cast<std::size_t>(max_var) + 1, VarInfo{Quantifier::Exists, -1, -1});
  int block_index = 0;
  for (const Block& b : prefix_) {
    for (int v : b.vars) {
      if (index_[v].position >= 0) throw FormulaError("variable " + std::to_string(v) + " quantified twice");
      index_[v] = VarInfo{b.quantifier, block_index, static_cast<int>(order_.size())};
      order_.push_back(v);
      (b.quantifier == Quantifier::Forall ? universals_ : existentials_).push_back(v);
    }
    ++block_index;
  }

  matrix_.reserve(matrix.size());
  for (Clause& c : matrix) {
    for (Lit l : c) {
      if (l.dimacs() == 0 || !contains(l.var())) {
        throw FormulaError("clause literal " + std::to_string(l.dimacs()) + " is not bound by the prefix");
      }
    }
    if (!canonicalize(c)) {
      ++removed_tautologies_;
      continue;
    }
    matrix_.push_back(std::move(c));
  }
}

bool Qbf::has_empty_clause() const {
  return std::any_of(matrix_.begin(), matrix_.end(), [](const Clause& c) { return c.empty(); });
}

bool Qbf::is_normalized() const {
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (prefix_[i].vars.empty()) return false;
    if (i > 0 && prefix_[i].quantifier == prefix_[i - 1].quantifier) return false;
  }
  return true;
}

bool structurally_equal(const Qbf& a, const Qbf& b) {
  if (a.prefix() != b.prefix()) return false;
  auto sa = a.matrix();
  auto sb = b.matrix();
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

Qbf normalize_prefix(const Qbf& q, NormalizeOptions options) {
  std::vector<char> used;
  if (options.drop_unused) {
    used.assign(static_cast<std::size_t>(q.max_var()) + 1, 0);
    for (const Clause& c : q.matrix()) {
      for (Lit l : c) used[l.var()] = 1;
    }
  }
  std::vector<Block> merged;
  for (const Block& b : q.prefix()) {
    std::vector<int> vars;
    for (int v : b.vars) {
      if (!options.drop_unused || used[v]) vars.push_back(v);
    }
    if (vars.empty()) continue;
    if (!merged.empty() && merged.back().quantifier == b.quantifier) {
      merged.back().vars.insert(merged.back().vars.end(), vars.begin(), vars.end());
    } else {
      merged.push_back(Block{b.quantifier, std::move(vars)});
    }
  }
  return Qbf(std::move(merged), q.matrix());
}

Assignment Assignment::of(const Qbf& q, std::initializer_list<std::pair<int, bool>> values, Domain empty_domain) {
  Assignment a(q.num_vars(), empty_domain);
  bool any_forall = false;
  bool any_exists = false;
  for (auto [var, value] : values) {
    if (!q.contains(var)) throw FormulaError("variable " + std::to_string(var) + " is not in the prefix");
    a.assign(q, var, to_value(value));
    (q.info(var).quantifier == Quantifier::Forall ? any_forall : any_exists) = true;
  }
  if (any_forall && any_exists) {
    a.domain_ = Domain::Mixed;
  } else if (any_forall) {
    a.domain_ = Domain::Universal;
  } else if (any_exists) {
    a.domain_ = Domain::Existential;
  }
  return a;
}

bool Assignment::is_full_over(const Qbf& q, Quantifier side) const {
  if (values_.size() != q.num_vars()) return false;
  for (std::size_t p = 0; p < values_.size(); ++p) {
    const bool assigned = values_[p] != Value::Unassigned;
    if (assigned != (q.quantifier_at(p) == side)) return false;
  }
  return true;
}

std::size_t Assignment::count_assigned() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](Value v) { return v != Value::Unassigned; }));
}

Assignment restrict(const Qbf& q, const Assignment& a, std::span<const int> vars) {
  Assignment r(a.size(), a.domain());
  for (int v : vars) {
    if (q.contains(v)) r.assign(q, v, a.value_of(q, v));
  }
  return r;
}

Assignment compose(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) throw ConflictingAssignments("assignments range over different variable sets");
  const Domain d = a.domain() == b.domain() ? a.domain() : Domain::Mixed;
  Assignment r(a.size(), d);
  for (std::size_t p = 0; p < a.size(); ++p) {
    const Value x = a[p];
    const Value y = b[p];
    if (x != Value::Unassigned && y != Value::Unassigned && x != y) {
      throw ConflictingAssignments("assignments disagree at prefix position " + std::to_string(p));
    }
    r.set(p, x != Value::Unassigned ? x : y);
  }
  return r;
}

std::vector<Clause> apply(const Assignment& a, const Qbf& q) {
  std::vector<Clause> out;
  for (const Clause& c : q.matrix()) {
    Clause reduced;
    bool satisfied = false;
    for (Lit l : c) {
      const Value v = a.value(q, l);
      if (v == Value::True) {
        satisfied = true;
        break;
      }
      if (v == Value::Unassigned) reduced.push_back(l);
    }
    if (!satisfied) out.push_back(std::move(reduced));
  }
  return out;
}

Value evaluate(const Assignment& a, const Qbf& q) {
  bool open = false;
  for (const Clause& c : q.matrix()) {
    Value cv = Value::False;
    for (Lit l : c) {
      const Value v = a.value(q, l);
      if (v == Value::True) {
        cv = Value::True;
        break;
      }
      if (v == Value::Unassigned) cv = Value::Unassigned;
    }
    if (cv == Value::False) return Value::False;
    if (cv == Value::Unassigned) open = true;
  }
  return open ? Value::Unassigned : Value::True;
}

bool satisfies(const Qbf& q, const Assignment& first, const Assignment& second) {
  for (const Clause& c : q.matrix()) {
    bool sat = false;
    for (Lit l : c) {
      const std::size_t p = static_cast<std::size_t>(q.position(l.var()));
      Value v = first[p] != Value::Unassigned ? first[p] : second[p];
      if (l.negative()) v = !v;
      if (v == Value::True) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace expqbf
