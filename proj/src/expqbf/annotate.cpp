#include "expqbf/annotate.hpp"

#include <algorithm>
#include <cstdlib>

#include "expqbf/error.hpp"

namespace expqbf {

namespace {

std::size_t mix(std::size_t seed, std::uint64_t v) {
  v ^= v >> 33;
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33;
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void sort_literals(std::vector<int>& lits) {
  std::sort(lits.begin(), lits.end(), [](int a, int b) {
    const int va = std::abs(a);
    const int vb = std::abs(b);
    return va != vb ? va < vb : a > b;
  });
}

template <typename Resolve>
std::vector<std::uint32_t> annotation_ids_with(const Qbf& q, const Assignment& a, Resolve resolve) {
  std::vector<std::uint32_t> ids(q.num_vars(), InternTable::kNoAnnotation);
  Annotation running;
  std::uint32_t current = InternTable::kNoAnnotation;
  bool dirty = true;
  for (std::size_t p = 0; p < q.num_vars(); ++p) {
    const Value v = a[p];
    if (v != Value::Unassigned) {
      running.push_back(v == Value::True);
      dirty = true;
      continue;
    }
    if (dirty) {
      current = resolve(running);
      dirty = false;
    }
    ids[p] = current;
  }
  return ids;
}

Instantiation annotate_matrix(const Qbf& q, const Assignment& a, InternTable& table, bool track_shared) {
  const auto ids = annotation_ids_with(q, a, [&](const Annotation& ann) { return table.intern_annotation(ann); });
  Instantiation out;
  const auto& matrix = q.matrix();
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const Clause& c = matrix[i];
    bool satisfied = false;
    for (Lit l : c) {
      if (a.value(q, l) == Value::True) {
        satisfied = true;
        break;
      }
    }
    if (satisfied) continue;
    InstantiatedClause ic{i, {}, false};
    for (Lit l : c) {
      if (a.value(q, l) != Value::Unassigned) continue;
      const int id = table.intern(l.var(), ids[static_cast<std::size_t>(q.position(l.var()))]);
      ic.literals.push_back(l.negative() ? -id : id);
    }
    sort_literals(ic.literals);
    if (ic.literals.empty()) out.falsified = true;
    if (track_shared) ic.duplicate = !table.remember_clause(ic.literals);
    out.clauses.push_back(std::move(ic));
  }
  return out;
}

void require_side(const Qbf& q, const Assignment& a, const InternTable& table) {
  const Quantifier side = table.side() == Side::Forall ? Quantifier::Forall : Quantifier::Exists;
  const Domain expected = side == Quantifier::Forall ? Domain::Universal : Domain::Existential;
  if (a.domain() != expected || !a.is_full_over(q, side)) {
    throw WrongDomain(side == Quantifier::Forall
                          ? "expected a full assignment over the universal variables"
                          : "expected a full assignment over the existential variables");
  }
}

}  // namespace

void Annotation::push_back(bool bit) {
  if (size_ % 64 == 0) words_.push_back(0);
  if (bit) words_.back() |= std::uint64_t{1} << (size_ % 64);
  ++size_;
}

std::string Annotation::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

std::optional<Annotation> Annotation::parse(std::string_view bits) {
  Annotation a;
  for (char c : bits) {
    if (c != '0' && c != '1') return std::nullopt;
    a.push_back(c == '1');
  }
  return a;
}

std::size_t Annotation::hash() const {
  std::size_t h = size_;
  for (std::uint64_t w : words_) h = mix(h, w);
  return h;
}

std::size_t LiteralVectorHash::operator()(const std::vector<int>& v) const {
  std::size_t h = v.size();
  for (int x : v) h = mix(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
  return h;
}

std::uint32_t InternTable::intern_annotation(const Annotation& a) {
  auto [it, inserted] = annotation_ids_.try_emplace(a, static_cast<std::uint32_t>(annotations_.size()));
  if (inserted) annotations_.push_back(a);
  return it->second;
}

std::optional<std::uint32_t> InternTable::find_annotation(const Annotation& a) const {
  auto it = annotation_ids_.find(a);
  if (it == annotation_ids_.end()) return std::nullopt;
  return it->second;
}

int InternTable::intern(int base, std::uint32_t annotation_id) {
  auto [it, inserted] = vars_.try_emplace(key(base, annotation_id), static_cast<int>(entries_.size()));
  if (inserted) entries_.push_back(Entry{base, annotation_id});
  return it->second;
}

std::optional<int> InternTable::find(int base, std::uint32_t annotation_id) const {
  if (annotation_id == kNoAnnotation) return std::nullopt;
  auto it = vars_.find(key(base, annotation_id));
  if (it == vars_.end()) return std::nullopt;
  return it->second;
}

int InternTable::fresh() {
  entries_.push_back(Entry{});
  return static_cast<int>(entries_.size()) - 1;
}

bool InternTable::is_selector(int id) const {
  return id > 0 && id < static_cast<int>(entries_.size()) && entries_[id].base == 0;
}

std::optional<AnnotatedVar> InternTable::reverse(int id) const {
  if (id <= 0 || id >= static_cast<int>(entries_.size()) || entries_[id].base == 0) return std::nullopt;
  const Entry& e = entries_[id];
  return AnnotatedVar{e.base, annotations_[e.annotation]};
}

bool InternTable::remember_clause(const std::vector<int>& lits) { return seen_clauses_.insert(lits).second; }

std::pair<int, bool> InternTable::clause_selector(const std::vector<int>& lits) {
  auto it = clause_selectors_.find(lits);
  if (it != clause_selectors_.end()) return {it->second, false};
  const int id = fresh();
  clause_selectors_.emplace(lits, id);
  return {id, true};
}

std::vector<std::uint32_t> annotation_ids(const Qbf& q, const Assignment& a, InternTable& table) {
  return annotation_ids_with(q, a, [&](const Annotation& ann) { return table.intern_annotation(ann); });
}

std::vector<std::uint32_t> find_annotation_ids(const Qbf& q, const Assignment& a, const InternTable& table) {
  return annotation_ids_with(q, a, [&](const Annotation& ann) {
    return table.find_annotation(ann).value_or(InternTable::kNoAnnotation);
  });
}

Instantiation instantiate(const Qbf& q, const Assignment& a, InternTable& table) {
  require_side(q, a, table);
  return annotate_matrix(q, a, table, true);
}

Instantiation instantiate_partial(const Qbf& q, const Assignment& a, InternTable& table) {
  return annotate_matrix(q, a, table, false);
}

NegatedInstantiation negate_instantiate(const Qbf& q, const Assignment& s, InternTable& table) {
  if (table.side() != Side::Exists) throw WrongDomain("negated instantiation needs an existential-side table");
  require_side(q, s, table);
  Instantiation inst = annotate_matrix(q, s, table, false);
  NegatedInstantiation out;
  if (inst.falsified) {
    out.tautology = true;
    return out;
  }
  for (const InstantiatedClause& ic : inst.clauses) {
    const auto [selector, created] = table.clause_selector(ic.literals);
    if (created) {
      for (int l : ic.literals) out.implications.push_back({-selector, -l});
    }
    out.selector_clause.push_back(selector);
  }
  std::sort(out.selector_clause.begin(), out.selector_clause.end());
  out.selector_clause.erase(std::unique(out.selector_clause.begin(), out.selector_clause.end()),
                            out.selector_clause.end());
  return out;
}

Assignment strip(std::span<const Value> model, const Assignment& source, const InternTable& table, const Qbf& q,
                 Value default_value) {
  const auto ids = find_annotation_ids(q, source, table);
  Assignment out(q.num_vars(), table.side() == Side::Forall ? Domain::Existential : Domain::Universal);
  for (std::size_t p = 0; p < q.num_vars(); ++p) {
    if (source[p] != Value::Unassigned) continue;
    Value v = default_value;
    if (auto id = table.find(q.var_at(p), ids[p]); id && static_cast<std::size_t>(*id) < model.size()) {
      if (model[*id] != Value::Unassigned) v = model[*id];
    }
    out.set(p, v);
  }
  return out;
}

std::vector<Clause> unstrip_check(const Qbf& q, const Assignment& s) {
  InternTable table(Side::Forall);
  const Instantiation inst = annotate_matrix(q, s, table, false);
  std::vector<Clause> out;
  out.reserve(inst.clauses.size());
  for (const InstantiatedClause& ic : inst.clauses) {
    Clause c;
    for (int l : ic.literals) {
      const auto av = table.reverse(std::abs(l));
      c.push_back(Lit::make(av->base, l < 0));
    }
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace expqbf
