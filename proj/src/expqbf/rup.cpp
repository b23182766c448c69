#include "expqbf/rup.hpp"

#include <algorithm>
#include <cstdlib>

namespace expqbf {

void RupChecker::reserve(int var) {
  if (static_cast<std::size_t>(var) < values_.size()) return;
  values_.resize(static_cast<std::size_t>(var) + 1, 0);
  watches_.resize(2 * (static_cast<std::size_t>(var) + 1));
}

void RupChecker::assign(int lit) {
  values_[static_cast<std::size_t>(std::abs(lit))] = lit > 0 ? 1 : -1;
  trail_.push_back(lit);
}

void RupChecker::undo(std::size_t trail_size) {
  while (trail_.size() > trail_size) {
    values_[static_cast<std::size_t>(std::abs(trail_.back()))] = 0;
    trail_.pop_back();
  }
  head_ = std::min(head_, trail_size);
}

bool RupChecker::propagate() {
  while (head_ < trail_.size()) {
    const int falsified = -trail_[head_++];
    auto& ws = watches_[code(falsified)];
    std::size_t j = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::size_t ci = ws[i];
      auto& c = clauses_[ci];
      if (c[0] == falsified) std::swap(c[0], c[1]);
      if (value(c[0]) > 0) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) >= 0) {
          std::swap(c[1], c[k]);
          watches_[code(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) < 0) {
        while (++i < ws.size()) ws[j++] = ws[i];
        ws.resize(j);
        return false;
      }
      assign(c[0]);
    }
    ws.resize(j);
  }
  return true;
}

void RupChecker::add_clause(std::span<const int> clause) {
  if (inconsistent_) return;
  std::vector<int> c(clause.begin(), clause.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (int l : c) reserve(std::abs(l));
  // Order: true literals, then unassigned, then false.
  std::stable_sort(c.begin(), c.end(), [this](int a, int b) { return value(a) > value(b); });
  if (c.empty() || value(c[0]) < 0) {
    inconsistent_ = true;
    return;
  }
  if (value(c[0]) > 0) {
    if (c.size() >= 2) {
      watches_[code(c[0])].push_back(clauses_.size());
      watches_[code(c[1])].push_back(clauses_.size());
      clauses_.push_back(std::move(c));
    }
    return;
  }
  if (c.size() == 1 || value(c[1]) < 0) {
    if (c.size() >= 2) {
      watches_[code(c[0])].push_back(clauses_.size());
      watches_[code(c[1])].push_back(clauses_.size());
      clauses_.push_back(c);
    }
    assign(c[0]);
    if (!propagate()) inconsistent_ = true;
    return;
  }
  watches_[code(c[0])].push_back(clauses_.size());
  watches_[code(c[1])].push_back(clauses_.size());
  clauses_.push_back(std::move(c));
}

bool RupChecker::implies(std::span<const int> clause) {
  if (inconsistent_) return true;
  for (int l : clause) reserve(std::abs(l));
  const std::size_t saved = trail_.size();
  bool conflict = false;
  for (int l : clause) {
    const int v = value(l);
    if (v > 0) {
      conflict = true;
      break;
    }
    if (v == 0) assign(-l);
  }
  if (!conflict) conflict = !propagate();
  undo(saved);
  return conflict;
}

}  // namespace expqbf
