#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace expqbf {

enum class Quantifier : std::uint8_t { Exists, Forall };

constexpr Quantifier opposite(Quantifier q) {
  return q == Quantifier::Exists ? Quantifier::Forall : Quantifier::Exists;
}

// Three-valued truth value; Unassigned plays the role of epsilon.
enum class Value : std::uint8_t { False = 0, True = 1, Unassigned = 2 };

constexpr Value to_value(bool b) { return b ? Value::True : Value::False; }

constexpr Value operator!(Value v) {
  switch (v) {
    case Value::False: return Value::True;
    case Value::True: return Value::False;
    default: return Value::Unassigned;
  }
}

// A literal in QDIMACS form: a non-zero signed variable id.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr explicit Lit(int dimacs) : code_(dimacs) {}

  static constexpr Lit make(int var, bool negative) { return Lit(negative ? -var : var); }

  constexpr int var() const { return code_ < 0 ? -code_ : code_; }
  constexpr bool negative() const { return code_ < 0; }
  constexpr int dimacs() const { return code_; }
  constexpr Lit operator~() const { return Lit(-code_); }

  friend constexpr bool operator==(Lit a, Lit b) = default;
  // Ordered by variable id, positive before negative.
  friend constexpr std::strong_ordering operator<=>(Lit a, Lit b) {
    if (auto c = a.var() <=> b.var(); c != 0) return c;
    return a.negative() <=> b.negative();
  }

 private:
  int code_ = 0;
};

using Clause = std::vector<Lit>;

struct Block {
  Quantifier quantifier;
  std::vector<int> vars;

  friend bool operator==(const Block&, const Block&) = default;
};

struct VarInfo {
  Quantifier quantifier;
  int block;
  int position;
};

// Prenex CNF formula. Construction canonicalizes clauses (sorted,
// duplicate-free, tautologies removed) but keeps the prefix exactly as
// given; use normalize_prefix() to merge same-kind neighbours.
class Qbf {
 public:
  Qbf() = default;
  Qbf(std::vector<Block> prefix, std::vector<Clause> matrix);

  const std::vector<Block>& prefix() const { return prefix_; }
  const std::vector<Clause>& matrix() const { return matrix_; }

  // Number of prefix variables (|X|).
  std::size_t num_vars() const { return order_.size(); }
  int max_var() const { return static_cast<int>(index_.size()) - 1; }

  bool contains(int var) const {
    return var > 0 && var < static_cast<int>(index_.size()) && index_[var].position >= 0;
  }
  const VarInfo& info(int var) const { return index_[var]; }
  int position(int var) const { return index_[var].position; }
  int var_at(std::size_t position) const { return order_[position]; }
  Quantifier quantifier_at(std::size_t position) const { return index_[order_[position]].quantifier; }

  // Variables of one kind, in prefix order.
  std::span<const int> vars_of(Quantifier q) const {
    return q == Quantifier::Forall ? std::span<const int>(universals_) : std::span<const int>(existentials_);
  }
  std::span<const int> universals() const { return universals_; }
  std::span<const int> existentials() const { return existentials_; }

  std::size_t removed_tautologies() const { return removed_tautologies_; }
  bool has_empty_clause() const;
  bool is_normalized() const;

 private:
  std::vector<Block> prefix_;
  std::vector<Clause> matrix_;
  std::vector<VarInfo> index_;  // by variable id; position -1 when absent
  std::vector<int> order_;      // position -> variable id
  std::vector<int> universals_;
  std::vector<int> existentials_;
  std::size_t removed_tautologies_ = 0;
};

// Equal prefixes and equal matrices up to clause order.
bool structurally_equal(const Qbf& a, const Qbf& b);

struct NormalizeOptions {
  bool drop_unused = false;
};

// Merges adjacent blocks of the same kind and drops empty blocks.
Qbf normalize_prefix(const Qbf& q, NormalizeOptions options = {});

enum class Domain : std::uint8_t { Universal, Existential, Mixed };

// Dense assignment indexed by prefix position.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t size, Domain domain = Domain::Mixed)
      : values_(size, Value::Unassigned), domain_(domain) {}

  // Builds an assignment from (variable id, value) pairs. The domain tag is
  // inferred from the quantifiers of the assigned variables; `empty_domain`
  // is used when nothing is assigned.
  static Assignment of(const Qbf& q, std::initializer_list<std::pair<int, bool>> values,
                       Domain empty_domain = Domain::Mixed);

  std::size_t size() const { return values_.size(); }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  Value operator[](std::size_t position) const { return values_[position]; }
  void set(std::size_t position, Value v) { values_[position] = v; }

  Value value_of(const Qbf& q, int var) const { return values_[q.position(var)]; }
  void assign(const Qbf& q, int var, Value v) { values_[q.position(var)] = v; }

  // Value of a literal: True/False when its variable is assigned.
  Value value(const Qbf& q, Lit lit) const {
    const Value v = values_[q.position(lit.var())];
    return lit.negative() ? !v : v;
  }

  std::span<const Value> values() const { return values_; }

  // True when every variable of kind `side` is assigned and no other is.
  bool is_full_over(const Qbf& q, Quantifier side) const;
  std::size_t count_assigned() const;

  friend bool operator==(const Assignment& a, const Assignment& b) { return a.values_ == b.values_; }

 private:
  std::vector<Value> values_;
  Domain domain_ = Domain::Mixed;
};

// a|_Y for Y given as variable ids.
Assignment restrict(const Qbf& q, const Assignment& a, std::span<const int> vars);

// Composite assignment; throws ConflictingAssignments when a and b disagree.
Assignment compose(const Assignment& a, const Assignment& b);

// a(phi): satisfied clauses dropped, falsified literals removed. An empty
// clause in the result denotes bottom, an empty result denotes top.
std::vector<Clause> apply(const Assignment& a, const Qbf& q);

// Truth value of the matrix under a (possibly partial) assignment.
Value evaluate(const Assignment& a, const Qbf& q);

// Matrix value under the union of two disjointly-defined assignments,
// without materializing the composite.
bool satisfies(const Qbf& q, const Assignment& first, const Assignment& second);

}  // namespace expqbf
