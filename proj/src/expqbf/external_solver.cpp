#include "expqbf/external_solver.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "expqbf/error.hpp"

extern char** environ;

namespace expqbf::sat {

namespace {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "expqbf-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) throw SpawnFailure("cannot create temporary directory");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

int max_var(const std::vector<std::vector<int>>& cnf) {
  int m = 0;
  for (const auto& c : cnf)
    for (int l : c) m = std::max(m, std::abs(l));
  return m;
}

}  // namespace

SolveOutcome external_solve(const std::filesystem::path& solver, const std::vector<std::vector<int>>& cnf) {
  TempDir dir;
  const auto input = dir.path() / "input.cnf";
  const auto output = dir.path() / "output.txt";
  const int n = max_var(cnf);
  {
    std::ofstream out(input);
    out << "p cnf " << n << ' ' << cnf.size() << '\n';
    for (const auto& c : cnf) {
      for (int l : c) out << l << ' ';
      out << "0\n";
    }
    if (!out) throw SpawnFailure("cannot write " + input.string());
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, output.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  const std::string program = solver.string();
  const std::string arg = input.string();
  char* argv[] = {const_cast<char*>(program.c_str()), const_cast<char*>(arg.c_str()), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, program.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw SpawnFailure("cannot run " + program + ": " + std::strerror(rc));
  int wstatus = 0;
  if (waitpid(pid, &wstatus, 0) < 0) throw SpawnFailure("waitpid failed for " + program);
  if (!WIFEXITED(wstatus)) throw SpawnFailure(program + " terminated abnormally");
  const int code = WEXITSTATUS(wstatus);
  if (code == 127) throw SpawnFailure("cannot execute " + program);

  std::ifstream in(output);
  std::string line;
  SolveOutcome result;
  bool have_status = false;
  std::vector<int> values;
  bool terminated = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line.substr(1));
    if (line[0] == 's') {
      std::string word;
      ls >> word;
      if (have_status) throw ProtocolViolation("more than one status line");
      if (word == "SATISFIABLE") {
        result.status = Status::Sat;
      } else if (word == "UNSATISFIABLE") {
        result.status = Status::Unsat;
      } else if (word == "UNKNOWN") {
        result.status = Status::Unknown;
      } else {
        throw ProtocolViolation("unrecognized status line: " + line);
      }
      have_status = true;
    } else if (line[0] == 'v') {
      std::string tok;
      while (ls >> tok) {
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (*end != '\0' || std::labs(v) > n) throw ProtocolViolation("bad model token: " + tok);
        if (v == 0) {
          terminated = true;
        } else {
          values.push_back(static_cast<int>(v));
        }
      }
    } else {
      throw ProtocolViolation("unexpected output line: " + line);
    }
  }
  if (!have_status) throw ProtocolViolation("no status line in solver output");
  const int expected = result.status == Status::Sat ? 10 : result.status == Status::Unsat ? 20 : 0;
  if (expected != 0 && code != expected) {
    throw ProtocolViolation("exit code " + std::to_string(code) + " does not match status line");
  }
  if (result.status == Status::Sat) {
    if (!values.empty() && !terminated) throw ProtocolViolation("model not terminated by 0");
    result.model.assign(static_cast<std::size_t>(n) + 1, Value::Unassigned);
    for (int v : values) result.model[std::abs(v)] = to_value(v > 0);
    // Unlisted variables default to false.
    for (std::size_t v = 1; v < result.model.size(); ++v) {
      if (result.model[v] == Value::Unassigned) result.model[v] = Value::False;
    }
    for (const auto& c : cnf) {
      bool sat = false;
      for (int l : c) sat = sat || result.model[std::abs(l)] == to_value(l > 0);
      if (!sat) throw ProtocolViolation("reported model falsifies a clause");
    }
  }
  return result;
}

void ExternalSolver::add_clause(std::span<const int> lits) {
  std::vector<int> c;
  for (int l : lits) {
    if (l == 0) continue;
    num_vars_ = std::max(num_vars_, std::abs(l));
    c.push_back(l);
  }
  clauses_.push_back(std::move(c));
}

Status ExternalSolver::solve(std::span<const int> assumptions, const Budget& budget) {
  const auto started = std::chrono::steady_clock::now();
  ++stats_.solves;
  model_.clear();
  failed_.clear();
  if (budget.exhausted()) return Status::Unknown;
  auto cnf = clauses_;
  for (int a : assumptions) {
    num_vars_ = std::max(num_vars_, std::abs(a));
    cnf.push_back({a});
  }
  // Pin the variable count so the model covers every registered variable.
  if (num_vars_ > 0) cnf.push_back({num_vars_, -num_vars_});
  SolveOutcome r = external_solve(solver_, cnf);
  if (r.status == Status::Sat) {
    model_ = std::move(r.model);
  } else if (r.status == Status::Unsat) {
    failed_.assign(assumptions.begin(), assumptions.end());
  }
  stats_.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r.status;
}

}  // namespace expqbf::sat
