#include <algorithm>
#include <random>

#include "expqbf/oracle.hpp"

namespace expqbf {

Qbf generate_qbf(std::uint64_t seed, const GeneratorParams& params) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int blocks = uniform(params.min_blocks, params.max_blocks);
  const int vars = uniform(blocks, std::max(blocks, params.max_vars));
  // Split vars into `blocks` non-empty blocks.
  std::vector<int> cuts;
  for (int v = 1; v < vars; ++v) cuts.push_back(v);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(static_cast<std::size_t>(blocks - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(vars);

  std::vector<Block> prefix;
  Quantifier kind = uniform(0, 1) ? Quantifier::Forall : Quantifier::Exists;
  int next = 1;
  for (int cut : cuts) {
    Block b{kind, {}};
    for (; next <= cut; ++next) b.vars.push_back(next);
    prefix.push_back(std::move(b));
    kind = opposite(kind);
  }

  std::vector<int> existentials;
  std::vector<bool> is_exists(static_cast<std::size_t>(vars) + 1, false);
  for (const Block& b : prefix) {
    if (b.quantifier != Quantifier::Exists) continue;
    for (int v : b.vars) {
      existentials.push_back(v);
      is_exists[static_cast<std::size_t>(v)] = true;
    }
  }

  const int min_clauses = std::max(2, (vars + params.max_width - 1) / params.max_width);
  // Clause/variable ratio between 0.5 and 2.2 keeps TRUE and FALSE
  // instances both common.
  const double ratio = 0.5 + 1.7 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const int target = std::clamp(static_cast<int>(ratio * vars), 1, params.max_clauses);
  const int clauses = std::max(std::min(min_clauses, params.max_clauses), target);
  std::vector<Clause> matrix;
  std::vector<int> order(static_cast<std::size_t>(vars));
  for (int v = 0; v < vars; ++v) order[static_cast<std::size_t>(v)] = v + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cover = 0;  // next variable that still needs an occurrence
  for (int i = 0; i < clauses; ++i) {
    // Wide enough that the uncovered variables fit in the clauses left.
    const int remaining = static_cast<int>(order.size() - cover);
    const int needed = (remaining + (clauses - i) - 1) / (clauses - i);
    const int width = std::min({std::max(uniform(params.min_width, params.max_width), needed), params.max_width, vars});
    Clause c;
    std::vector<int> chosen;
    std::size_t from_cover = 0;
    while (static_cast<int>(chosen.size()) < width && cover < order.size()) {
      chosen.push_back(order[cover++]);
      ++from_cover;
    }
    while (static_cast<int>(chosen.size()) < width) {
      const int v = uniform(1, vars);
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
    }
    // A clause without existential literals falsifies the formula outright.
    if (!existentials.empty() && std::none_of(chosen.begin(), chosen.end(), [&](int v) { return is_exists[v]; })) {
      for (int tries = 0; tries < 8; ++tries) {
        const int e = existentials[static_cast<std::size_t>(uniform(0, static_cast<int>(existentials.size()) - 1))];
        if (std::find(chosen.begin(), chosen.end(), e) == chosen.end()) {
          if (static_cast<int>(chosen.size()) < params.max_width) {
            chosen.push_back(e);
          } else {
            // A displaced coverage variable goes back in the queue.
            if (from_cover == chosen.size()) --cover;
            chosen.back() = e;
          }
          break;
        }
      }
    }
    for (int v : chosen) c.push_back(Lit::make(v, uniform(0, 1) == 1));
    matrix.push_back(std::move(c));
  }
  // Leftover variables when there were too few clauses.
  while (cover < order.size()) {
    Clause c;
    bool has_exists = false;
    for (int k = 0; k + 1 < params.max_width && cover < order.size(); ++k) {
      has_exists = has_exists || is_exists[static_cast<std::size_t>(order[cover])];
      c.push_back(Lit::make(order[cover++], uniform(0, 1) == 1));
    }
    if (!has_exists && !existentials.empty()) {
      const int e = existentials[static_cast<std::size_t>(uniform(0, static_cast<int>(existentials.size()) - 1))];
      c.push_back(Lit::make(e, uniform(0, 1) == 1));
    }
    matrix.push_back(std::move(c));
  }
  return Qbf(std::move(prefix), std::move(matrix));
}

}  // namespace expqbf
