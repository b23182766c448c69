#include "expqbf/expqbf.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "expqbf/error.hpp"
#include "expqbf/expand.hpp"
#include "expqbf/oracle.hpp"
#include "expqbf/proof.hpp"
#include "expqbf/qdimacs.hpp"

struct expqbf_formula {
  expqbf::Qbf qbf;
  std::vector<std::string> warnings;
  std::vector<std::size_t> warning_lines;
};

struct expqbf_solver {
  std::atomic<bool> cancel{false};
  expqbf::Qbf qbf;
  expqbf::SolveConfig config;
  std::optional<expqbf::SolveResult> result;
};

struct expqbf_certificate {
  expqbf::Certificate cert;
};

namespace {

thread_local std::string last_error;

expqbf_status fail(expqbf_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
expqbf_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return EXPQBF_OK;
  } catch (const expqbf::ParseError& e) {
    return fail(EXPQBF_ERR_PARSE, e.what());
  } catch (const expqbf::IoError& e) {
    return fail(EXPQBF_ERR_IO, e.what());
  } catch (const expqbf::FormulaError& e) {
    return fail(EXPQBF_ERR_FORMULA, e.what());
  } catch (const expqbf::WrongDomain& e) {
    return fail(EXPQBF_ERR_WRONG_DOMAIN, e.what());
  } catch (const expqbf::ConflictingAssignments& e) {
    return fail(EXPQBF_ERR_CONFLICTING_ASSIGNMENTS, e.what());
  } catch (const expqbf::TooLarge& e) {
    return fail(EXPQBF_ERR_TOO_LARGE, e.what());
  } catch (const expqbf::TraceUnavailable& e) {
    return fail(EXPQBF_ERR_TRACE_UNAVAILABLE, e.what());
  } catch (const expqbf::InvariantViolation& e) {
    return fail(EXPQBF_ERR_INVARIANT_VIOLATION, e.what());
  } catch (const expqbf::SpawnFailure& e) {
    return fail(EXPQBF_ERR_SPAWN_FAILURE, e.what());
  } catch (const expqbf::ProtocolViolation& e) {
    return fail(EXPQBF_ERR_PROTOCOL_VIOLATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EXPQBF_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(EXPQBF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EXPQBF_ERR_INTERNAL, "unknown exception");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

expqbf_formula* wrap(expqbf::ParsedQbf parsed) {
  auto f = std::make_unique<expqbf_formula>();
  f->qbf = std::move(parsed.qbf);
  for (const auto& w : parsed.diagnostics.warnings) {
    f->warnings.push_back(w.message);
    f->warning_lines.push_back(w.line);
  }
  return f.release();
}

}  // namespace

extern "C" {

const char* expqbf_version(void) { return "1.0.0"; }

const char* expqbf_last_error(void) { return last_error.c_str(); }

const char* expqbf_status_name(expqbf_status status) {
  switch (status) {
    case EXPQBF_OK: return "ok";
    case EXPQBF_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case EXPQBF_ERR_PARSE: return "parse-error";
    case EXPQBF_ERR_IO: return "io-error";
    case EXPQBF_ERR_FORMULA: return "formula-error";
    case EXPQBF_ERR_WRONG_DOMAIN: return "wrong-domain";
    case EXPQBF_ERR_CONFLICTING_ASSIGNMENTS: return "conflicting-assignments";
    case EXPQBF_ERR_TOO_LARGE: return "too-large";
    case EXPQBF_ERR_TRACE_UNAVAILABLE: return "trace-unavailable";
    case EXPQBF_ERR_INVARIANT_VIOLATION: return "invariant-violation";
    case EXPQBF_ERR_SPAWN_FAILURE: return "spawn-failure";
    case EXPQBF_ERR_PROTOCOL_VIOLATION: return "protocol-violation";
    case EXPQBF_ERR_OUT_OF_MEMORY: return "out-of-memory";
    case EXPQBF_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

void expqbf_string_free(char* s) { std::free(s); }

expqbf_status expqbf_formula_parse_file(const char* path, expqbf_formula** out) {
  if (path == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(expqbf::parse_qdimacs_file(path)); });
}

expqbf_status expqbf_formula_parse_string(const char* text, size_t length, expqbf_formula** out) {
  if ((text == nullptr && length > 0) || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(expqbf::parse_qdimacs(std::string_view(text == nullptr ? "" : text, length))); });
}

void expqbf_formula_free(expqbf_formula* f) { delete f; }

size_t expqbf_formula_num_vars(const expqbf_formula* f) { return f ? f->qbf.num_vars() : 0; }
size_t expqbf_formula_num_universals(const expqbf_formula* f) { return f ? f->qbf.universals().size() : 0; }
size_t expqbf_formula_num_existentials(const expqbf_formula* f) { return f ? f->qbf.existentials().size() : 0; }
size_t expqbf_formula_num_clauses(const expqbf_formula* f) { return f ? f->qbf.matrix().size() : 0; }
size_t expqbf_formula_num_blocks(const expqbf_formula* f) { return f ? f->qbf.prefix().size() : 0; }

size_t expqbf_formula_warning_count(const expqbf_formula* f) { return f ? f->warnings.size() : 0; }

const char* expqbf_formula_warning(const expqbf_formula* f, size_t index, size_t* line) {
  if (f == nullptr || index >= f->warnings.size()) return nullptr;
  if (line != nullptr) *line = f->warning_lines[index];
  return f->warnings[index].c_str();
}

expqbf_status expqbf_formula_write(const expqbf_formula* f, char** out) {
  if (f == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(expqbf::write_qdimacs(f->qbf)); });
}

void expqbf_generator_params_init(expqbf_generator_params* params) {
  if (params == nullptr) return;
  const expqbf::GeneratorParams d;
  *params = {d.min_blocks, d.max_blocks, d.max_vars, d.max_clauses, d.min_width, d.max_width};
}

expqbf_status expqbf_formula_generate(uint64_t seed, const expqbf_generator_params* params, expqbf_formula** out) {
  if (out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  expqbf::GeneratorParams p;
  if (params != nullptr) {
    p = {params->min_blocks, params->max_blocks, params->max_vars,
         params->max_clauses, params->min_width, params->max_width};
  }
  if (p.min_blocks < 1 || p.max_blocks < p.min_blocks || p.max_vars < p.max_blocks || p.max_clauses < 1 ||
      p.min_width < 1 || p.max_width < p.min_width) {
    return fail(EXPQBF_ERR_INVALID_ARGUMENT, "inconsistent generator parameters");
  }
  return guarded([&] {
    auto f = std::make_unique<expqbf_formula>();
    f->qbf = expqbf::generate_qbf(seed, p);
    *out = f.release();
  });
}

expqbf_status expqbf_oracle_decide(const expqbf_formula* f, expqbf_verdict* out) {
  if (f == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = static_cast<expqbf_verdict>(expqbf::decide_semantic(f->qbf)); });
}

void expqbf_config_init(expqbf_config* config) {
  if (config == nullptr) return;
  const expqbf::SolveConfig d;
  config->init_mode = EXPQBF_INIT_PER_BLOCK;
  config->seed = d.seed;
  config->reset_period = d.reset_period;
  config->reset_memory_threshold = d.reset_memory_threshold;
  config->multi_extract = d.multi_extract ? 1 : 0;
  config->verify_invariants = 0;
  config->rebuild_on_reset = 0;
  config->certificate = 0;
  config->time_limit_seconds = 0.0;
  config->max_iterations = 0;
  config->external_solver = nullptr;
}

expqbf_status expqbf_solver_new(const expqbf_formula* f, const expqbf_config* config, expqbf_solver** out) {
  if (f == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  expqbf_config c;
  expqbf_config_init(&c);
  if (config != nullptr) c = *config;
  if (c.init_mode < EXPQBF_INIT_PER_BLOCK || c.init_mode > EXPQBF_INIT_ALL_TRUE) {
    return fail(EXPQBF_ERR_INVALID_ARGUMENT, "unknown init mode");
  }
  return guarded([&] {
    auto s = std::make_unique<expqbf_solver>();
    s->qbf = f->qbf;
    expqbf::SolveConfig& sc = s->config;
    sc.init_mode = static_cast<expqbf::InitMode>(c.init_mode);
    sc.seed = c.seed;
    sc.reset_period = c.reset_period;
    sc.reset_memory_threshold = c.reset_memory_threshold;
    sc.multi_extract = c.multi_extract != 0;
    sc.verify_invariants = c.verify_invariants != 0;
    sc.rebuild_on_reset = c.rebuild_on_reset != 0;
    sc.certificate = c.certificate != 0;
    if (c.time_limit_seconds > 0.0) sc.time_limit_seconds = c.time_limit_seconds;
    if (c.max_iterations > 0) sc.max_iterations = c.max_iterations;
    sc.backend.cdcl.seed ^= c.seed;
    if (c.external_solver != nullptr) {
      sc.backend.kind = expqbf::sat::BackendSpec::Kind::External;
      sc.backend.external_path = c.external_solver;
    }
    sc.cancel = &s->cancel;
    *out = s.release();
  });
}

expqbf_status expqbf_solver_run(expqbf_solver* s, expqbf_verdict* out) {
  if (s == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    s->result = expqbf::solve(s->qbf, s->config);
    if (out != nullptr) *out = static_cast<expqbf_verdict>(s->result->verdict);
  });
}

void expqbf_solver_interrupt(expqbf_solver* s) {
  if (s != nullptr) s->cancel.store(true, std::memory_order_relaxed);
}

void expqbf_solver_free(expqbf_solver* s) { delete s; }

size_t expqbf_solver_iteration_count(const expqbf_solver* s) {
  return s && s->result ? s->result->stats.iterations.size() : 0;
}

expqbf_status expqbf_solver_iteration(const expqbf_solver* s, size_t index, expqbf_iteration_stats* out) {
  if (s == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  if (!s->result || index >= s->result->stats.iterations.size()) {
    return fail(EXPQBF_ERR_INVALID_ARGUMENT, "iteration index out of range");
  }
  const expqbf::IterationStats& it = s->result->stats.iterations[index];
  *out = {it.iteration,        it.a_size,         it.s_size,         it.new_a,
          it.new_s,            it.forall_conflicts, it.exists_conflicts, it.forall_clauses,
          it.exists_clauses,   it.forall_seconds, it.exists_seconds, it.reset ? 1 : 0,
          static_cast<expqbf_verdict>(it.terminal)};
  return EXPQBF_OK;
}

expqbf_status expqbf_solver_summary(const expqbf_solver* s, expqbf_summary* out) {
  if (s == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  if (!s->result) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "solver has not run");
  const expqbf::SolveResult& r = *s->result;
  *out = {static_cast<expqbf_verdict>(r.verdict), r.iterations, r.a_size, r.s_size, r.stats.resets,
          r.stats.growth_violations, r.stats.completion_violations, r.stats.bound_violations, r.stats.seconds};
  return EXPQBF_OK;
}

expqbf_status expqbf_solver_certificate(const expqbf_solver* s, expqbf_certificate** out) {
  if (s == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!s->result || s->result->verdict != expqbf::Verdict::False) {
    return fail(EXPQBF_ERR_TRACE_UNAVAILABLE, "certificates exist only for FALSE verdicts");
  }
  if (!s->result->certificate) return fail(EXPQBF_ERR_TRACE_UNAVAILABLE, "certificate extraction was not enabled");
  return guarded([&] { *out = new expqbf_certificate{*s->result->certificate}; });
}

expqbf_status expqbf_certificate_read_file(const char* path, expqbf_certificate** out) {
  if (path == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new expqbf_certificate{expqbf::read_certificate_file(path)}; });
}

expqbf_status expqbf_certificate_read_string(const char* text, size_t length, expqbf_certificate** out) {
  if ((text == nullptr && length > 0) || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new expqbf_certificate{expqbf::read_certificate(std::string_view(text == nullptr ? "" : text, length))};
  });
}

expqbf_status expqbf_certificate_write_file(const expqbf_certificate* c, const char* path) {
  if (c == nullptr || path == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    out << expqbf::write_certificate(c->cert);
    out.close();
    if (!out) throw expqbf::IoError(std::string("cannot write ") + path);
  });
}

expqbf_status expqbf_certificate_write(const expqbf_certificate* c, char** out) {
  if (c == nullptr || out == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(expqbf::write_certificate(c->cert)); });
}

size_t expqbf_certificate_axiom_count(const expqbf_certificate* c) { return c ? c->cert.axioms.size() : 0; }
size_t expqbf_certificate_trace_length(const expqbf_certificate* c) { return c ? c->cert.trace.size() : 0; }

expqbf_status expqbf_certificate_check(const expqbf_formula* f, const expqbf_certificate* c, int* valid,
                                       const char** reason) {
  if (f == nullptr || c == nullptr || valid == nullptr) return fail(EXPQBF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const expqbf::CheckResult r = expqbf::check_certificate(f->qbf, c->cert);
    *valid = r.valid() ? 1 : 0;
    if (reason != nullptr) *reason = expqbf::to_string(r.failure);
    if (!r.valid()) last_error = std::string(expqbf::to_string(r.failure)) + " at " + std::to_string(r.index) + ": " + r.detail;
  });
}

void expqbf_certificate_free(expqbf_certificate* c) { delete c; }

}  // extern "C"
