#pragma once

#include <cstddef>
#include <cstdint>

#include "expqbf/expand.hpp"
#include "expqbf/formula.hpp"

namespace expqbf {

// Recursive evaluation over the prefix. Throws TooLarge above `max_vars`.
Verdict decide_semantic(const Qbf& q, std::size_t max_vars = 22);

// Conjunction of the instantiations by every universal assignment, decided
// with the bundled solver. Throws TooLarge above `max_universals`.
Verdict decide_full_expansion(const Qbf& q, std::size_t max_universals = 12);

struct GeneratorParams {
  int min_blocks = 2;
  int max_blocks = 5;
  int max_vars = 14;
  int max_clauses = 48;
  int min_width = 2;
  int max_width = 4;
};

// Random PCNF with alternating blocks. Every prefix variable occurs in
// some clause. Deterministic in `seed`.
Qbf generate_qbf(std::uint64_t seed, const GeneratorParams& params = {});

}  // namespace expqbf
