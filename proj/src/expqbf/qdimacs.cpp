#include "expqbf/qdimacs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "expqbf/error.hpp"

namespace expqbf {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long to_integer(std::string_view tok, std::size_t line) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(ParseErrorKind::LiteralOutOfRange, line, "'" + std::string(tok) + "' does not fit");
  }
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(ParseErrorKind::InvalidToken, line, "'" + std::string(tok) + "' is not an integer");
  }
  return v;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParsedQbf run() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no_;
      handle_line(text_.substr(pos, end - pos));
      pos = end + 1;
    }
    if (!have_header_) throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "missing 'p cnf' line");
    if (!pending_.empty()) {
      throw ParseError(ParseErrorKind::UnterminatedClause, pending_line_, "clause not terminated by 0");
    }
    return finish();
  }

 private:
  void handle_line(std::string_view line) {
    const auto toks = tokenize(line);
    if (toks.empty()) return;
    const std::string_view head = toks.front();
    if (head == "c" || head.front() == 'c') return;

    if (head == "p") {
      parse_header(toks);
      return;
    }
    if (!have_header_) {
      throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "content before 'p cnf' line");
    }
    if (head == "a" || head == "e") {
      parse_quantifier(toks, head == "a" ? Quantifier::Forall : Quantifier::Exists);
      return;
    }
    parse_clause_tokens(toks);
  }

  void parse_header(const std::vector<std::string_view>& toks) {
    if (have_header_) throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "duplicate 'p' line");
    if (toks.size() != 4 || toks[1] != "cnf") {
      throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "expected 'p cnf <vars> <clauses>'");
    }
    long long nv = 0;
    long long nc = 0;
    try {
      nv = to_integer(toks[2], line_no_);
      nc = to_integer(toks[3], line_no_);
    } catch (const ParseError&) {
      throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "non-numeric counts");
    }
    if (nv < 0 || nc < 0 || nv > (1LL << 26)) {
      throw ParseError(ParseErrorKind::MalformedHeader, line_no_, "counts out of range");
    }
    num_vars_ = static_cast<int>(nv);
    declared_clauses_ = static_cast<std::size_t>(nc);
    quantified_.assign(static_cast<std::size_t>(num_vars_) + 1, 0);
    have_header_ = true;
  }

  void parse_quantifier(const std::vector<std::string_view>& toks, Quantifier q) {
    if (seen_clause_ || !pending_.empty()) {
      throw ParseError(ParseErrorKind::QuantifierAfterClauses, line_no_, "quantifier line after the first clause");
    }
    if (toks.size() < 2 || toks.back() != "0") {
      throw ParseError(ParseErrorKind::UnterminatedQuantifier, line_no_, "quantifier line must end with 0");
    }
    Block block{q, {}};
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
      const long long v = to_integer(toks[i], line_no_);
      if (v <= 0 || v > num_vars_) {
        throw ParseError(ParseErrorKind::LiteralOutOfRange, line_no_,
                         "variable " + std::string(toks[i]) + " outside 1.." + std::to_string(num_vars_));
      }
      if (quantified_[v]) {
        throw ParseError(ParseErrorKind::DuplicateQuantification, line_no_, "variable " + std::string(toks[i]));
      }
      quantified_[v] = 1;
      block.vars.push_back(static_cast<int>(v));
    }
    prefix_.push_back(std::move(block));
  }

  void parse_clause_tokens(const std::vector<std::string_view>& toks) {
    for (std::string_view tok : toks) {
      const long long l = to_integer(tok, line_no_);
      if (l == 0) {
        clauses_.push_back(std::move(pending_));
        pending_.clear();
        seen_clause_ = true;
        continue;
      }
      const long long mag = l < 0 ? -l : l;
      if (mag > num_vars_) {
        throw ParseError(ParseErrorKind::LiteralOutOfRange, line_no_,
                         "literal " + std::string(tok) + " exceeds header bound " + std::to_string(num_vars_));
      }
      if (pending_.empty()) pending_line_ = line_no_;
      pending_.push_back(Lit(static_cast<int>(l)));
    }
  }

  ParsedQbf finish() {
    ParseDiagnostics diag;
    if (clauses_.size() != declared_clauses_) {
      diag.warnings.push_back({line_no_, "header declares " + std::to_string(declared_clauses_) +
                                             " clauses, found " + std::to_string(clauses_.size())});
    }
    std::vector<char> occurs(quantified_.size(), 0);
    for (const Clause& c : clauses_) {
      for (Lit l : c) occurs[l.var()] = 1;
    }
    Block free_block{Quantifier::Exists, {}};
    for (std::size_t v = 1; v < occurs.size(); ++v) {
      if (occurs[v] && !quantified_[v]) free_block.vars.push_back(static_cast<int>(v));
    }
    if (!free_block.vars.empty()) {
      diag.free_variable_count = free_block.vars.size();
      diag.warnings.push_back({line_no_, std::to_string(free_block.vars.size()) +
                                             " free variable(s) bound in an outermost existential block"});
      prefix_.insert(prefix_.begin(), std::move(free_block));
    }
    Qbf raw(std::move(prefix_), std::move(clauses_));
    if (raw.removed_tautologies() > 0) {
      diag.warnings.push_back({line_no_, std::to_string(raw.removed_tautologies()) + " tautological clause(s) removed"});
    }
    return ParsedQbf{normalize_prefix(raw), std::move(diag)};
  }

  std::string_view text_;
  std::size_t line_no_ = 0;
  bool have_header_ = false;
  bool seen_clause_ = false;
  int num_vars_ = 0;
  std::size_t declared_clauses_ = 0;
  std::vector<char> quantified_;
  std::vector<Block> prefix_;
  std::vector<Clause> clauses_;
  Clause pending_;
  std::size_t pending_line_ = 0;
};

}  // namespace

ParsedQbf parse_qdimacs(std::string_view text) { return Parser(text).run(); }

ParsedQbf parse_qdimacs_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_qdimacs(buf.str());
}

std::string write_qdimacs(const Qbf& q) {
  std::ostringstream out;
  out << "p cnf " << std::max(q.max_var(), 0) << ' ' << q.matrix().size() << '\n';
  for (const Block& b : q.prefix()) {
    if (b.vars.empty()) continue;
    out << (b.quantifier == Quantifier::Forall ? 'a' : 'e');
    for (int v : b.vars) out << ' ' << v;
    out << " 0\n";
  }
  for (const Clause& c : q.matrix()) {
    for (Lit l : c) out << l.dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace expqbf
