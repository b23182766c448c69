#include "expqbf/ipasir.h"

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "expqbf/cdcl.hpp"

#define IPASIR_API extern "C" __attribute__((visibility("default")))

namespace {

struct IpasirSolver {
  expqbf::sat::CdclSolver solver;
  std::vector<int> clause;
  std::vector<int> assumptions;
  std::vector<int> last_failed;
  expqbf::sat::Status last = expqbf::sat::Status::Unknown;
  void* terminate_data = nullptr;
  int (*terminate)(void*) = nullptr;
};

IpasirSolver* cast(void* s) { return static_cast<IpasirSolver*>(s); }

}  // namespace

IPASIR_API const char* ipasir_signature(void) { return "expqbf-cdcl-1.0.0"; }

IPASIR_API void* ipasir_init(void) { return new IpasirSolver(); }

IPASIR_API void ipasir_release(void* solver) { delete cast(solver); }

IPASIR_API void ipasir_add(void* solver, int32_t lit_or_zero) {
  IpasirSolver* s = cast(solver);
  if (lit_or_zero != 0) {
    s->clause.push_back(lit_or_zero);
    return;
  }
  s->solver.add_clause(s->clause);
  s->clause.clear();
}

IPASIR_API void ipasir_assume(void* solver, int32_t lit) { cast(solver)->assumptions.push_back(lit); }

IPASIR_API int ipasir_solve(void* solver) {
  IpasirSolver* s = cast(solver);
  expqbf::sat::Budget budget;
  if (s->terminate != nullptr) {
    budget.terminate = [s] { return s->terminate(s->terminate_data) != 0; };
  }
  s->last = s->solver.solve(s->assumptions, budget);
  const auto failed = s->solver.failed_assumptions();
  s->last_failed.assign(failed.begin(), failed.end());
  s->assumptions.clear();
  return static_cast<int>(s->last);
}

IPASIR_API int32_t ipasir_val(void* solver, int32_t lit) {
  IpasirSolver* s = cast(solver);
  const expqbf::Value v = s->solver.value(std::abs(lit));
  if (v == expqbf::Value::Unassigned) return 0;
  const bool positive = (v == expqbf::Value::True) == (lit > 0);
  return positive ? lit : -lit;
}

IPASIR_API int ipasir_failed(void* solver, int32_t lit) {
  const auto& f = cast(solver)->last_failed;
  return std::find(f.begin(), f.end(), lit) != f.end() ? 1 : 0;
}

IPASIR_API void ipasir_set_terminate(void* solver, void* data, int (*terminate)(void* data)) {
  IpasirSolver* s = cast(solver);
  s->terminate_data = data;
  s->terminate = terminate;
}

IPASIR_API void ipasir_set_learn(void* solver, void* data, int max_length, void (*learn)(void* data, int32_t* clause)) {
  IpasirSolver* s = cast(solver);
  if (learn == nullptr) {
    s->solver.set_learn_callback(0, nullptr);
    return;
  }
  s->solver.set_learn_callback(max_length, [data, learn](std::span<const int> c) {
    std::vector<int32_t> buf(c.begin(), c.end());
    buf.push_back(0);
    learn(data, buf.data());
  });
}
