#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "expqbf/formula.hpp"

namespace expqbf {

struct ParseWarning {
  std::size_t line;
  std::string message;
};

struct ParseDiagnostics {
  std::vector<ParseWarning> warnings;
  std::size_t free_variable_count = 0;
};

struct ParsedQbf {
  Qbf qbf;
  ParseDiagnostics diagnostics;
};

// Parses QDIMACS text. Free variables go to a new outermost existential
// block; the result is prefix-normalized. Throws ParseError.
ParsedQbf parse_qdimacs(std::string_view text);

// Reads and parses a file; throws IoError if it cannot be read.
ParsedQbf parse_qdimacs_file(const std::filesystem::path& path);

// Canonical QDIMACS rendering of `q`.
std::string write_qdimacs(const Qbf& q);

}  // namespace expqbf
