#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace expqbf {

// Reverse unit propagation over a growing clause database. Literals are
// non-zero signed ints; variables are registered on first use.
class RupChecker {
 public:
  // Adds a premise (or an already verified clause).
  void add_clause(std::span<const int> clause);

  // True when assuming the negation of every literal of `clause` leads to
  // a conflict by unit propagation.
  bool implies(std::span<const int> clause);

  // The premises are refuted by unit propagation alone.
  bool inconsistent() const { return inconsistent_; }

 private:
  static std::uint32_t code(int lit) {
    return lit > 0 ? static_cast<std::uint32_t>(lit) << 1 : (static_cast<std::uint32_t>(-lit) << 1) | 1U;
  }
  // +1 true, -1 false, 0 unassigned
  int value(int lit) const {
    const int v = values_[static_cast<std::size_t>(lit > 0 ? lit : -lit)];
    return lit > 0 ? v : -v;
  }
  void reserve(int var);
  void assign(int lit);
  bool propagate();  // false on conflict
  void undo(std::size_t trail_size);

  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<std::size_t>> watches_;  // by code of the watched literal
  std::vector<int> values_{0};
  std::vector<int> trail_;
  std::size_t head_ = 0;
  bool inconsistent_ = false;
};

}  // namespace expqbf
