// expqbf command-line front end. Exit codes: 10 TRUE, 20 FALSE,
// 0 UNKNOWN, 1 error; `check` exits 0 when the certificate is valid and 2
// when it is rejected.
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "expqbf/expqbf.h"

namespace {

struct FormulaDeleter {
  void operator()(expqbf_formula* f) const { expqbf_formula_free(f); }
};
struct SolverDeleter {
  void operator()(expqbf_solver* s) const { expqbf_solver_free(s); }
};
struct CertificateDeleter {
  void operator()(expqbf_certificate* c) const { expqbf_certificate_free(c); }
};
using Formula = std::unique_ptr<expqbf_formula, FormulaDeleter>;
using Solver = std::unique_ptr<expqbf_solver, SolverDeleter>;
using Certificate = std::unique_ptr<expqbf_certificate, CertificateDeleter>;

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ok(expqbf_status st, const std::string& what) {
  if (st != EXPQBF_OK) throw Failure(what + ": " + expqbf_last_error());
}

Formula load(const std::string& path, bool warn) {
  expqbf_formula* f = nullptr;
  ok(expqbf_formula_parse_file(path.c_str(), &f), path);
  Formula owned(f);
  if (warn) {
    for (size_t i = 0; i < expqbf_formula_warning_count(f); ++i) {
      size_t line = 0;
      const char* msg = expqbf_formula_warning(f, i, &line);
      std::cerr << "c warning: " << path << ":" << line << ": " << msg << '\n';
    }
  }
  return owned;
}

const char* verdict_name(expqbf_verdict v) {
  return v == EXPQBF_TRUE ? "TRUE" : v == EXPQBF_FALSE ? "FALSE" : "UNKNOWN";
}

const char* verdict_line(expqbf_verdict v) {
  return v == EXPQBF_TRUE ? "s cnf 1" : v == EXPQBF_FALSE ? "s cnf 0" : "s cnf -1";
}

// Interrupts the solver once `seconds` pass unless stopped first.
class Watchdog {
 public:
  Watchdog(expqbf_solver* solver, double seconds) {
    thread_ = std::thread([this, solver, seconds] {
      std::unique_lock lock(mutex_);
      const auto until = std::chrono::steady_clock::now() +
                         std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(seconds));
      if (!cv_.wait_until(lock, until, [this] { return done_; })) expqbf_solver_interrupt(solver);
    });
  }
  ~Watchdog() {
    {
      std::lock_guard lock(mutex_);
      done_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  bool done_ = false;
  std::thread thread_;
};

struct SolveArgs {
  std::string file;
  std::string init = "per-block";
  uint64_t seed = 0;
  uint64_t reset_period = 64;
  uint64_t reset_mem = 2000000;
  bool no_multi_extract = false;
  bool verify = false;
  bool rebuild = false;
  std::string cert;
  double timeout = 0.0;
  uint64_t max_iterations = 0;
  std::string backend = "bundled";
  std::string stats = "none";
  std::string stats_file;
  bool stats_timing = false;
};

expqbf_config make_config(const SolveArgs& a, std::string& external) {
  expqbf_config c;
  expqbf_config_init(&c);
  if (a.init == "per-block") {
    c.init_mode = EXPQBF_INIT_PER_BLOCK;
  } else if (a.init == "random") {
    c.init_mode = EXPQBF_INIT_RANDOM;
  } else if (a.init == "all-false") {
    c.init_mode = EXPQBF_INIT_ALL_FALSE;
  } else {
    c.init_mode = EXPQBF_INIT_ALL_TRUE;
  }
  c.seed = a.seed;
  c.reset_period = a.reset_period;
  c.reset_memory_threshold = a.reset_mem;
  c.multi_extract = a.no_multi_extract ? 0 : 1;
  c.verify_invariants = a.verify ? 1 : 0;
  c.rebuild_on_reset = a.rebuild ? 1 : 0;
  c.certificate = a.cert.empty() ? 0 : 1;
  c.max_iterations = a.max_iterations;
  if (a.backend != "bundled") {
    const std::string prefix = "external:";
    if (a.backend.rfind(prefix, 0) != 0 || a.backend.size() == prefix.size()) {
      throw Failure("--backend must be 'bundled' or 'external:<path>'");
    }
    external = a.backend.substr(prefix.size());
    c.external_solver = external.c_str();
  }
  return c;
}

nlohmann::ordered_json iteration_json(const expqbf_iteration_stats& it, bool timing) {
  nlohmann::ordered_json j;
  j["iteration"] = it.iteration;
  j["A"] = it.a_size;
  j["S"] = it.s_size;
  j["new_A"] = it.new_a;
  j["new_S"] = it.new_s;
  j["forall_conflicts"] = it.forall_conflicts;
  j["exists_conflicts"] = it.exists_conflicts;
  j["forall_clauses"] = it.forall_clauses;
  j["exists_clauses"] = it.exists_clauses;
  j["reset"] = it.reset != 0;
  if (it.terminal != EXPQBF_UNKNOWN) j["terminal"] = verdict_name(it.terminal);
  if (timing) {
    j["forall_seconds"] = it.forall_seconds;
    j["exists_seconds"] = it.exists_seconds;
  }
  return j;
}

int run_solve(const SolveArgs& a) {
  Formula f = load(a.file, true);
  std::string external;
  const expqbf_config config = make_config(a, external);
  expqbf_solver* raw = nullptr;
  ok(expqbf_solver_new(f.get(), &config, &raw), "solver");
  Solver solver(raw);

  expqbf_verdict verdict = EXPQBF_UNKNOWN;
  {
    std::optional<Watchdog> watchdog;
    if (a.timeout > 0.0) watchdog.emplace(solver.get(), a.timeout);
    ok(expqbf_solver_run(solver.get(), &verdict), "solve");
  }
  expqbf_summary summary;
  ok(expqbf_solver_summary(solver.get(), &summary), "summary");

  if (a.stats == "human") {
    for (size_t i = 0; i < expqbf_solver_iteration_count(solver.get()); ++i) {
      expqbf_iteration_stats it;
      ok(expqbf_solver_iteration(solver.get(), i, &it), "stats");
      std::printf("c iteration %llu |A|=%zu |S|=%zu new_A=%zu new_S=%zu conflicts=%llu/%llu%s\n",
                  static_cast<unsigned long long>(it.iteration), it.a_size, it.s_size, it.new_a, it.new_s,
                  static_cast<unsigned long long>(it.forall_conflicts),
                  static_cast<unsigned long long>(it.exists_conflicts), it.reset ? " reset" : "");
    }
    std::printf("c verdict %s iterations %llu |A|=%zu |S|=%zu resets %llu\n", verdict_name(verdict),
                static_cast<unsigned long long>(summary.iterations), summary.a_size, summary.s_size,
                static_cast<unsigned long long>(summary.resets));
    if (a.verify) {
      std::printf("c violations growth=%llu completion=%llu bound=%llu\n",
                  static_cast<unsigned long long>(summary.growth_violations),
                  static_cast<unsigned long long>(summary.completion_violations),
                  static_cast<unsigned long long>(summary.bound_violations));
    }
    if (a.stats_timing) std::printf("c seconds %.3f\n", summary.seconds);
  } else if (a.stats == "json-lines") {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!a.stats_file.empty()) {
      file.open(a.stats_file, std::ios::binary);
      if (!file) throw Failure("cannot write " + a.stats_file);
      out = &file;
    }
    for (size_t i = 0; i < expqbf_solver_iteration_count(solver.get()); ++i) {
      expqbf_iteration_stats it;
      ok(expqbf_solver_iteration(solver.get(), i, &it), "stats");
      *out << iteration_json(it, a.stats_timing).dump() << '\n';
    }
    nlohmann::ordered_json s;
    s["summary"] = true;
    s["verdict"] = verdict_name(verdict);
    s["iterations"] = summary.iterations;
    s["A"] = summary.a_size;
    s["S"] = summary.s_size;
    s["resets"] = summary.resets;
    s["growth_violations"] = summary.growth_violations;
    s["completion_violations"] = summary.completion_violations;
    s["bound_violations"] = summary.bound_violations;
    if (a.stats_timing) s["seconds"] = summary.seconds;
    *out << s.dump() << '\n';
    out->flush();
  }

  if (!a.cert.empty() && verdict == EXPQBF_FALSE) {
    expqbf_certificate* c = nullptr;
    ok(expqbf_solver_certificate(solver.get(), &c), "certificate");
    Certificate cert(c);
    ok(expqbf_certificate_write_file(cert.get(), a.cert.c_str()), "certificate");
  }
  std::printf("%s\n", verdict_line(verdict));
  std::fflush(stdout);
  return static_cast<int>(verdict);
}

int run_check(const std::string& file, const std::string& cert_path) {
  Formula f = load(file, false);
  expqbf_certificate* c = nullptr;
  ok(expqbf_certificate_read_file(cert_path.c_str(), &c), cert_path);
  Certificate cert(c);
  int valid = 0;
  const char* reason = nullptr;
  ok(expqbf_certificate_check(f.get(), cert.get(), &valid, &reason), "check");
  if (valid) {
    std::printf("valid\n");
    return 0;
  }
  std::printf("invalid: %s\n", expqbf_last_error());
  return 2;
}

int run_oracle(const std::string& file) {
  Formula f = load(file, false);
  expqbf_verdict v = EXPQBF_UNKNOWN;
  ok(expqbf_oracle_decide(f.get(), &v), "oracle");
  std::printf("%s\n", verdict_line(v));
  return static_cast<int>(v);
}

struct FuzzArgs {
  uint64_t count = 100;
  uint64_t seed = 1;
  expqbf_generator_params gen{};
  uint64_t reset_period = 64;
  bool verify = false;
  bool cert = false;
};

int run_fuzz(const FuzzArgs& a) {
  uint64_t trues = 0;
  uint64_t falses = 0;
  uint64_t mismatches = 0;
  uint64_t bad_certs = 0;
  for (uint64_t i = 0; i < a.count; ++i) {
    const uint64_t seed = a.seed + i;
    expqbf_formula* raw = nullptr;
    ok(expqbf_formula_generate(seed, &a.gen, &raw), "generate");
    Formula f(raw);
    expqbf_verdict expected = EXPQBF_UNKNOWN;
    ok(expqbf_oracle_decide(f.get(), &expected), "oracle");

    expqbf_config config;
    expqbf_config_init(&config);
    config.reset_period = a.reset_period;
    config.verify_invariants = a.verify ? 1 : 0;
    config.certificate = a.cert ? 1 : 0;
    expqbf_solver* s = nullptr;
    ok(expqbf_solver_new(f.get(), &config, &s), "solver");
    Solver solver(s);
    expqbf_verdict got = EXPQBF_UNKNOWN;
    ok(expqbf_solver_run(solver.get(), &got), "solve");
    (expected == EXPQBF_TRUE ? trues : falses) += 1;
    if (got != expected) {
      ++mismatches;
      std::printf("c mismatch seed %llu: expected %s, got %s\n", static_cast<unsigned long long>(seed),
                  verdict_name(expected), verdict_name(got));
      continue;
    }
    if (a.cert && got == EXPQBF_FALSE) {
      expqbf_certificate* c = nullptr;
      ok(expqbf_solver_certificate(solver.get(), &c), "certificate");
      Certificate cert(c);
      int valid = 0;
      ok(expqbf_certificate_check(f.get(), cert.get(), &valid, nullptr), "check");
      if (!valid) {
        ++bad_certs;
        std::printf("c rejected certificate seed %llu: %s\n", static_cast<unsigned long long>(seed),
                    expqbf_last_error());
      }
    }
  }
  std::printf("c fuzz instances=%llu true=%llu false=%llu mismatches=%llu rejected_certificates=%llu\n",
              static_cast<unsigned long long>(a.count), static_cast<unsigned long long>(trues),
              static_cast<unsigned long long>(falses), static_cast<unsigned long long>(mismatches),
              static_cast<unsigned long long>(bad_certs));
  return mismatches == 0 && bad_certs == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expansion-based QBF solver"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Decide a QDIMACS formula");
  solve_cmd->add_option("file", solve.file, "QDIMACS input")->required();
  solve_cmd->add_option("--init", solve.init, "Initial universal assignments")
      ->check(CLI::IsMember({"per-block", "random", "all-false", "all-true"}));
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--reset-period", solve.reset_period, "Reset A every N iterations (0 = never)");
  solve_cmd->add_option("--reset-mem", solve.reset_mem, "Reset A above N live literals (0 = never)");
  solve_cmd->add_flag("--no-multi-extract", solve.no_multi_extract, "Extract one new assignment per iteration");
  solve_cmd->add_flag("--verify-invariants", solve.verify, "Check growth and completion invariants online");
  solve_cmd->add_flag("--rebuild-on-reset", solve.rebuild, "Rebuild the universal abstraction on reset");
  solve_cmd->add_option("--cert", solve.cert, "Write a refutation certificate for FALSE formulas");
  solve_cmd->add_option("--timeout", solve.timeout, "Wall-clock limit in seconds");
  solve_cmd->add_option("--max-iterations", solve.max_iterations, "Iteration limit");
  solve_cmd->add_option("--backend", solve.backend, "bundled or external:<path>");
  solve_cmd->add_option("--stats", solve.stats, "Statistics output")
      ->check(CLI::IsMember({"none", "human", "json-lines"}));
  solve_cmd->add_option("--stats-file", solve.stats_file, "Write json-lines statistics here");
  solve_cmd->add_flag("--stats-timing", solve.stats_timing, "Include wall-clock times in statistics");

  std::string check_file;
  std::string check_cert;
  auto* check_cmd = app.add_subcommand("check", "Validate a refutation certificate");
  check_cmd->add_option("file", check_file, "QDIMACS input")->required();
  check_cmd->add_option("certificate", check_cert, "Certificate file")->required();

  FuzzArgs fuzz;
  expqbf_generator_params_init(&fuzz.gen);
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Differential testing against the brute-force oracle");
  fuzz_cmd->add_option("--count", fuzz.count, "Number of instances");
  fuzz_cmd->add_option("--seed", fuzz.seed, "First generator seed");
  fuzz_cmd->add_option("--min-blocks", fuzz.gen.min_blocks);
  fuzz_cmd->add_option("--max-blocks", fuzz.gen.max_blocks);
  fuzz_cmd->add_option("--max-vars", fuzz.gen.max_vars)->check(CLI::Range(1, 22));
  fuzz_cmd->add_option("--max-clauses", fuzz.gen.max_clauses);
  fuzz_cmd->add_option("--min-width", fuzz.gen.min_width);
  fuzz_cmd->add_option("--max-width", fuzz.gen.max_width);
  fuzz_cmd->add_option("--reset-period", fuzz.reset_period);
  fuzz_cmd->add_flag("--verify-invariants", fuzz.verify);
  fuzz_cmd->add_flag("--cert", fuzz.cert, "Extract and check certificates for FALSE instances");

  std::string oracle_file;
  auto* oracle_cmd = app.add_subcommand("oracle", "Decide a small formula by brute force");
  oracle_cmd->add_option("file", oracle_file, "QDIMACS input")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*check_cmd) return run_check(check_file, check_cert);
    if (*fuzz_cmd) return run_fuzz(fuzz);
    if (*oracle_cmd) return run_oracle(oracle_file);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
