#include "expqbf/proof.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "expqbf/annotate.hpp"
#include "expqbf/cdcl.hpp"
#include "expqbf/error.hpp"
#include "expqbf/rup.hpp"

namespace expqbf {

namespace {

std::vector<int> signed_vars(const Qbf& q, const Assignment& a) {
  std::vector<int> out;
  for (int u : q.universals()) {
    const Value v = a.value_of(q, u);
    if (v != Value::Unassigned) out.push_back(v == Value::True ? u : -u);
  }
  return out;
}

}  // namespace

Certificate extract_certificate(const Qbf& q, std::span<const Assignment> core) {
  InternTable table(Side::Forall);
  Certificate cert;
  for (const Assignment& alpha : core) {
    const Instantiation inst = instantiate(q, alpha, table);
    for (const InstantiatedClause& ic : inst.clauses) {
      if (ic.duplicate) continue;
      CertificateAxiom axiom{ic.clause_index, signed_vars(q, alpha), ic.literals};
      if (ic.literals.empty()) {
        // The axiom itself is the empty clause.
        cert.axioms.assign(1, std::move(axiom));
        cert.trace.assign(1, {});
        return cert;
      }
      cert.axioms.push_back(std::move(axiom));
    }
  }
  for (int id = 1; id <= table.max_id(); ++id) {
    if (auto av = table.reverse(id)) cert.dictionary.push_back({id, av->base, av->annotation.to_string()});
  }

  sat::CdclOptions options;
  options.record_trace = true;
  sat::CdclSolver solver(options);
  for (const CertificateAxiom& a : cert.axioms) solver.add_clause(a.literals);
  if (solver.solve({}) != sat::Status::Unsat) {
    throw InvariantViolation("core instantiations are satisfiable; no refutation exists");
  }
  for (const sat::TraceRecord& r : solver.proof_trace()) {
    if (!r.deletion) cert.trace.push_back(r.literals);
  }
  return cert;
}

const char* to_string(CheckFailure f) {
  switch (f) {
    case CheckFailure::None: return "valid";
    case CheckFailure::BadDictionary: return "bad-dictionary";
    case CheckFailure::BadClauseIndex: return "bad-clause-index";
    case CheckFailure::NotFullUniversal: return "not-full-universal";
    case CheckFailure::AxiomMismatch: return "axiom-mismatch";
    case CheckFailure::UnknownVariable: return "unknown-variable";
    case CheckFailure::RupFailure: return "rup-failure";
    case CheckFailure::MissingEmptyClause: return "missing-empty-clause";
  }
  return "unknown";
}

CheckResult check_certificate(const Qbf& q, const Certificate& c) {
  auto fail = [](CheckFailure f, std::size_t index, std::string detail) {
    return CheckResult{f, index, std::move(detail)};
  };

  // Number of universals before each prefix position.
  std::vector<std::size_t> universals_before(q.num_vars() + 1, 0);
  for (std::size_t p = 0; p < q.num_vars(); ++p) {
    universals_before[p + 1] = universals_before[p] + (q.quantifier_at(p) == Quantifier::Forall ? 1 : 0);
  }

  std::unordered_map<int, std::pair<int, std::string>> dict;
  std::set<std::pair<int, std::string>> seen_keys;
  for (std::size_t i = 0; i < c.dictionary.size(); ++i) {
    const DictionaryEntry& e = c.dictionary[i];
    if (e.id <= 0 || dict.count(e.id)) return fail(CheckFailure::BadDictionary, i, "id reused or not positive");
    if (!q.contains(e.var) || q.info(e.var).quantifier != Quantifier::Exists) {
      return fail(CheckFailure::BadDictionary, i, "not an existential variable");
    }
    const std::size_t expected = universals_before[static_cast<std::size_t>(q.position(e.var))];
    if (e.bits.size() != expected || e.bits.find_first_not_of("01") != std::string::npos) {
      return fail(CheckFailure::BadDictionary, i, "annotation length does not match the prefix");
    }
    if (!seen_keys.insert({e.var, e.bits}).second) {
      return fail(CheckFailure::BadDictionary, i, "annotated variable listed twice");
    }
    dict.emplace(e.id, std::make_pair(e.var, e.bits));
  }

  RupChecker rup;
  for (std::size_t i = 0; i < c.axioms.size(); ++i) {
    const CertificateAxiom& ax = c.axioms[i];
    if (ax.clause_index >= q.matrix().size()) return fail(CheckFailure::BadClauseIndex, i, "clause index out of range");

    // Universal values by prefix position.
    std::vector<int> value(q.num_vars(), 0);
    std::size_t assigned = 0;
    for (int l : ax.alpha) {
      const int v = std::abs(l);
      if (l == 0 || !q.contains(v) || q.info(v).quantifier != Quantifier::Forall) {
        return fail(CheckFailure::NotFullUniversal, i, "assignment mentions a non-universal variable");
      }
      int& slot = value[static_cast<std::size_t>(q.position(v))];
      if (slot != 0) return fail(CheckFailure::NotFullUniversal, i, "variable assigned twice");
      slot = l > 0 ? 1 : -1;
      ++assigned;
    }
    if (assigned != q.universals().size()) {
      return fail(CheckFailure::NotFullUniversal, i, "assignment does not cover every universal variable");
    }

    // Recompute the instantiated clause as (var, annotation, negative).
    std::set<std::tuple<int, std::string, bool>> expected;
    bool satisfied = false;
    for (Lit l : q.matrix()[ax.clause_index]) {
      const std::size_t p = static_cast<std::size_t>(q.position(l.var()));
      if (q.quantifier_at(p) == Quantifier::Forall) {
        if ((value[p] > 0) != l.negative()) satisfied = true;
        continue;
      }
      std::string bits;
      for (std::size_t k = 0; k < p; ++k) {
        if (q.quantifier_at(k) == Quantifier::Forall) bits.push_back(value[k] > 0 ? '1' : '0');
      }
      expected.emplace(l.var(), std::move(bits), l.negative());
    }
    if (satisfied) return fail(CheckFailure::AxiomMismatch, i, "the assignment satisfies the clause");
    std::set<std::tuple<int, std::string, bool>> actual;
    for (int l : ax.literals) {
      auto it = dict.find(std::abs(l));
      if (l == 0 || it == dict.end()) return fail(CheckFailure::UnknownVariable, i, "axiom literal not in dictionary");
      actual.emplace(it->second.first, it->second.second, l < 0);
    }
    if (actual != expected) return fail(CheckFailure::AxiomMismatch, i, "axiom differs from the instantiation");
    rup.add_clause(ax.literals);
  }

  if (c.trace.empty()) return fail(CheckFailure::MissingEmptyClause, 0, "empty trace");
  for (std::size_t i = 0; i < c.trace.size(); ++i) {
    for (int l : c.trace[i]) {
      if (l == 0 || !dict.count(std::abs(l))) {
        return fail(CheckFailure::UnknownVariable, i, "trace literal not in dictionary");
      }
    }
    if (!rup.implies(c.trace[i])) return fail(CheckFailure::RupFailure, i, "clause is not implied by unit propagation");
    rup.add_clause(c.trace[i]);
  }
  if (!c.trace.back().empty()) return fail(CheckFailure::MissingEmptyClause, c.trace.size() - 1, "last clause not empty");
  return {};
}

std::string write_certificate(const Certificate& c) {
  std::ostringstream out;
  out << "c expqbf certificate\n";
  for (const DictionaryEntry& e : c.dictionary) {
    out << "d " << e.id << ' ' << e.var << ' ' << (e.bits.empty() ? "-" : e.bits) << '\n';
  }
  for (const CertificateAxiom& a : c.axioms) {
    out << "a " << a.clause_index;
    for (int l : a.alpha) out << ' ' << l;
    out << " 0";
    for (int l : a.literals) out << ' ' << l;
    out << " 0\n";
  }
  for (const auto& clause : c.trace) {
    out << 'r';
    for (int l : clause) out << ' ' << l;
    out << " 0\n";
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long to_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v > INT32_MAX || v < -INT32_MAX) {
    throw ParseError(ParseErrorKind::InvalidToken, line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

// Reads signed ints up to a terminating 0 starting at tokens[i].
std::vector<int> read_zero_terminated(const std::vector<std::string_view>& tokens, std::size_t& i, std::size_t line) {
  std::vector<int> out;
  for (; i < tokens.size(); ++i) {
    const long long v = to_int(tokens[i], line);
    if (v == 0) {
      ++i;
      return out;
    }
    out.push_back(static_cast<int>(v));
  }
  throw ParseError(ParseErrorKind::UnterminatedClause, line, "missing terminating 0");
}

}  // namespace

Certificate read_certificate(std::string_view text) {
  Certificate c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto tokens = split(line);
    if (tokens.empty() || tokens[0] == "c") continue;
    const std::string_view kind = tokens[0];
    std::size_t i = 1;
    if (kind == "d") {
      if (tokens.size() != 4) throw ParseError(ParseErrorKind::InvalidToken, line_no, "expected 'd <id> <var> <bits>'");
      const int id = static_cast<int>(to_int(tokens[1], line_no));
      const int var = static_cast<int>(to_int(tokens[2], line_no));
      std::string bits = tokens[3] == "-" ? std::string() : std::string(tokens[3]);
      if (bits.find_first_not_of("01") != std::string::npos) {
        throw ParseError(ParseErrorKind::InvalidToken, line_no, "annotation must be a 0/1 string or '-'");
      }
      c.dictionary.push_back({id, var, std::move(bits)});
    } else if (kind == "a") {
      if (tokens.size() < 2) throw ParseError(ParseErrorKind::InvalidToken, line_no, "missing clause index");
      const long long idx = to_int(tokens[1], line_no);
      if (idx < 0) throw ParseError(ParseErrorKind::InvalidToken, line_no, "negative clause index");
      i = 2;
      CertificateAxiom axiom{static_cast<std::size_t>(idx), {}, {}};
      axiom.alpha = read_zero_terminated(tokens, i, line_no);
      axiom.literals = read_zero_terminated(tokens, i, line_no);
      if (i != tokens.size()) throw ParseError(ParseErrorKind::InvalidToken, line_no, "trailing tokens");
      c.axioms.push_back(std::move(axiom));
    } else if (kind == "r") {
      auto clause = read_zero_terminated(tokens, i, line_no);
      if (i != tokens.size()) throw ParseError(ParseErrorKind::InvalidToken, line_no, "trailing tokens");
      c.trace.push_back(std::move(clause));
    } else {
      throw ParseError(ParseErrorKind::InvalidToken, line_no, "unknown line kind '" + std::string(kind) + "'");
    }
  }
  return c;
}

Certificate read_certificate_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_certificate(buf.str());
}

}  // namespace expqbf
