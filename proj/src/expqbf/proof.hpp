#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expqbf/formula.hpp"

namespace expqbf {

struct CertificateAxiom {
  std::size_t clause_index;   // into the normalized matrix
  std::vector<int> alpha;     // full universal assignment as signed variable ids
  std::vector<int> literals;  // resulting annotated clause over dictionary ids
};

struct DictionaryEntry {
  int id;
  int var;
  std::string bits;  // annotation, "" when empty
};

// Axiom instantiations plus a clausal trace over annotated variables whose
// every clause follows by unit propagation from what precedes it.
struct Certificate {
  std::vector<DictionaryEntry> dictionary;
  std::vector<CertificateAxiom> axioms;
  std::vector<std::vector<int>> trace;
};

// Builds a certificate from universal assignments whose instantiations are
// jointly unsatisfiable. Throws InvariantViolation if they are not.
Certificate extract_certificate(const Qbf& q, std::span<const Assignment> core);

enum class CheckFailure {
  None,
  BadDictionary,
  BadClauseIndex,
  NotFullUniversal,
  AxiomMismatch,
  UnknownVariable,
  RupFailure,
  MissingEmptyClause,
};

const char* to_string(CheckFailure f);

struct CheckResult {
  CheckFailure failure = CheckFailure::None;
  std::size_t index = 0;  // offending dictionary entry, axiom or trace clause
  std::string detail;

  bool valid() const { return failure == CheckFailure::None; }
};

CheckResult check_certificate(const Qbf& q, const Certificate& c);

std::string write_certificate(const Certificate& c);
// Throws ParseError on malformed input.
Certificate read_certificate(std::string_view text);
Certificate read_certificate_file(const std::filesystem::path& path);

}  // namespace expqbf
