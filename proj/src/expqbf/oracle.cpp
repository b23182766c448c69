#include "expqbf/oracle.hpp"

#include <string>
#include <vector>

#include "expqbf/annotate.hpp"
#include "expqbf/cdcl.hpp"
#include "expqbf/error.hpp"

namespace expqbf {

namespace {

class Evaluator {
 public:
  explicit Evaluator(const Qbf& q) : q_(q), values_(q.num_vars(), 0), occurrences_(q.num_vars()) {
    for (std::size_t i = 0; i < q.matrix().size(); ++i) {
      for (Lit l : q.matrix()[i]) occurrences_[static_cast<std::size_t>(q.position(l.var()))].push_back(i);
    }
  }

  bool run(std::size_t p) {
    if (p == q_.num_vars()) return true;
    const bool forall = q_.quantifier_at(p) == Quantifier::Forall;
    for (int v : {-1, 1}) {
      values_[p] = v;
      const bool r = !touches_false(p) && run(p + 1);
      values_[p] = 0;
      if (forall && !r) return false;
      if (!forall && r) return true;
    }
    return forall;
  }

 private:
  int lit_value(Lit l) const {
    const int v = values_[static_cast<std::size_t>(q_.position(l.var()))];
    return l.negative() ? -v : v;
  }
  bool clause_false(const Clause& c) const {
    for (Lit l : c) {
      if (lit_value(l) >= 0) return false;
    }
    return true;
  }
  // Only clauses mentioning position p can have become false.
  bool touches_false(std::size_t p) const {
    for (std::size_t i : occurrences_[p]) {
      if (clause_false(q_.matrix()[i])) return true;
    }
    return false;
  }

  const Qbf& q_;
  std::vector<int> values_;
  std::vector<std::vector<std::size_t>> occurrences_;
};

}  // namespace

Verdict decide_semantic(const Qbf& q, std::size_t max_vars) {
  if (q.num_vars() > max_vars) {
    throw TooLarge("semantic oracle limited to " + std::to_string(max_vars) + " variables");
  }
  if (q.has_empty_clause()) return Verdict::False;
  Evaluator e(q);
  return e.run(0) ? Verdict::True : Verdict::False;
}

Verdict decide_full_expansion(const Qbf& q, std::size_t max_universals) {
  const auto universals = q.universals();
  if (universals.size() > max_universals) {
    throw TooLarge("full expansion limited to " + std::to_string(max_universals) + " universal variables");
  }
  InternTable table(Side::Forall);
  sat::CdclSolver solver;
  const std::uint64_t count = std::uint64_t{1} << universals.size();
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    Assignment alpha(q.num_vars(), Domain::Universal);
    for (std::size_t k = 0; k < universals.size(); ++k) {
      alpha.assign(q, universals[k], to_value(((bits >> k) & 1U) != 0));
    }
    const Instantiation inst = instantiate(q, alpha, table);
    if (inst.falsified) return Verdict::False;
    for (const InstantiatedClause& ic : inst.clauses) {
      if (!ic.duplicate) solver.add_clause(ic.literals);
    }
  }
  return solver.solve({}) == sat::Status::Sat ? Verdict::True : Verdict::False;
}

}  // namespace expqbf
