#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "expqbf/formula.hpp"

namespace expqbf {

// Packed sequence of truth values: the values an instantiating assignment
// gives to the assigned variables that precede an annotated variable.
class Annotation {
 public:
  Annotation() = default;

  void push_back(bool bit);
  bool operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // "1" for true, "0" for false, in prefix order.
  std::string to_string() const;
  static std::optional<Annotation> parse(std::string_view bits);

  std::size_t hash() const;
  friend bool operator==(const Annotation& a, const Annotation& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::uint32_t size_ = 0;
};

struct AnnotationHash {
  std::size_t operator()(const Annotation& a) const { return a.hash(); }
};

struct LiteralVectorHash {
  std::size_t operator()(const std::vector<int>& v) const;
};

// Which abstraction a table serves. Forall: instantiations by universal
// assignments (psi_forall), whose variables are annotated existentials.
// Exists: instantiations by existential assignments (psi_exists).
enum class Side : std::uint8_t { Forall, Exists };

struct AnnotatedVar {
  int base;
  Annotation annotation;
};

// Interns (variable, annotation) pairs to dense abstraction ids starting at
// 1. Selector variables come from the same counter and have no reverse
// entry.
class InternTable {
 public:
  static constexpr std::uint32_t kNoAnnotation = UINT32_MAX;

  explicit InternTable(Side side) : side_(side) {}

  Side side() const { return side_; }

  std::uint32_t intern_annotation(const Annotation& a);
  std::optional<std::uint32_t> find_annotation(const Annotation& a) const;
  const Annotation& annotation(std::uint32_t id) const { return annotations_[id]; }

  int intern(int base, std::uint32_t annotation_id);
  std::optional<int> find(int base, std::uint32_t annotation_id) const;

  // Fresh auxiliary (selector) variable.
  int fresh();
  bool is_selector(int id) const;
  std::optional<AnnotatedVar> reverse(int id) const;

  int max_id() const { return static_cast<int>(entries_.size()) - 1; }
  std::size_t annotated_count() const { return vars_.size(); }

  // Shared-clause detection: true the first time `lits` is seen.
  bool remember_clause(const std::vector<int>& lits);
  void forget_clauses() { seen_clauses_.clear(); }

  // One selector per distinct instantiated clause; second member is true
  // when the selector was created by this call.
  std::pair<int, bool> clause_selector(const std::vector<int>& lits);

 private:
  struct Entry {
    int base = 0;
    std::uint32_t annotation = kNoAnnotation;
  };

  static std::uint64_t key(int base, std::uint32_t annotation_id) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(base)) << 32) | annotation_id;
  }

  Side side_;
  std::vector<Annotation> annotations_;
  std::unordered_map<Annotation, std::uint32_t, AnnotationHash> annotation_ids_;
  std::unordered_map<std::uint64_t, int> vars_;
  std::vector<Entry> entries_{Entry{}};  // index 0 unused
  std::unordered_set<std::vector<int>, LiteralVectorHash> seen_clauses_;
  std::unordered_map<std::vector<int>, int, LiteralVectorHash> clause_selectors_;
};

struct InstantiatedClause {
  std::size_t clause_index;
  std::vector<int> literals;  // signed abstraction ids, sorted by id
  bool duplicate = false;
};

struct Instantiation {
  std::vector<InstantiatedClause> clauses;
  bool falsified = false;  // some clause became empty
};

// Annotation id of every position left unassigned by `a`, interning new
// annotations; kNoAnnotation for assigned positions.
std::vector<std::uint32_t> annotation_ids(const Qbf& q, const Assignment& a, InternTable& table);

// Lookup-only variant: unknown annotations map to kNoAnnotation.
std::vector<std::uint32_t> find_annotation_ids(const Qbf& q, const Assignment& a, const InternTable& table);

// phi^a for a full assignment over the table's side (U for Forall, E for
// Exists). Throws WrongDomain otherwise.
Instantiation instantiate(const Qbf& q, const Assignment& a, InternTable& table);

// phi^a for an arbitrary partial assignment; no domain check and no
// shared-clause bookkeeping.
Instantiation instantiate_partial(const Qbf& q, const Assignment& a, InternTable& table);

struct NegatedInstantiation {
  // phi^s contains an empty clause: its negation is valid, nothing to add.
  bool tautology = false;
  std::vector<int> selector_clause;
  std::vector<std::vector<int>> implications;
};

// Clausal encoding of the negation of phi^s: one selector per surviving
// clause, each implying the negation of every literal of its clause.
NegatedInstantiation negate_instantiate(const Qbf& q, const Assignment& s, InternTable& table);

// Projects a backend model (indexed by abstraction id) back onto the
// variables `source` leaves unassigned. Missing values become
// `default_value`.
Assignment strip(std::span<const Value> model, const Assignment& source, const InternTable& table, const Qbf& q,
                 Value default_value = Value::False);

// (phi^s)^{-s}: instantiate, then erase annotations.
std::vector<Clause> unstrip_check(const Qbf& q, const Assignment& s);

}  // namespace expqbf
