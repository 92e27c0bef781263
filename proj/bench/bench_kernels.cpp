// Serial reference vs OpenMP kernel timings for CK verification and sweeps.
//   cea_bench [repeats]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cea/analysis.hpp"
#include "cea/chain.hpp"
#include "cea/config.hpp"

using namespace cea;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void line(const char* what, const std::string& preset, double serial, double parallel, bool same) {
  std::printf("%-8s %-26s serial %8.4f s  omp %8.4f s  x%5.2f  %s\n", what, preset.c_str(), serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  const std::string dir = CEA_PRESET_DIR;

  for (const char* name : {"prop1-exp.json", "case111-trig.json", "case222-generic.json", "symmetric-generic.json"}) {
    const ChainFamily c = load_chain(dir + "/" + name).chain;
    SamplingPlan plan;
    plan.count = 20000;
    const auto triples = sample_triples(c, plan);
    CkReport a, b;
    const double ts = best_of(repeats, [&] { a = verify_ck_serial(c, triples, 1e-9); });
    const double tp = best_of(repeats, [&] { b = verify_ck(c, triples, 1e-9); });
    line("verify", name, ts, tp, a.max_residual == b.max_residual && a.passed == b.passed);
  }

  for (const char* name : {"case111-d1-fixture.json", "case122-generic.json"}) {
    const ChainFamily c = load_chain(dir + "/" + name).chain;
    const SweepSpec spec{0.0, 5.0, 0.0, 5.0, 200, 200};
    SweepReport a, b;
    const double ts = best_of(repeats, [&] { a = sweep_serial(c, spec); });
    const double tp = best_of(repeats, [&] { b = sweep(c, spec); });
    line("sweep", name, ts, tp, a.crossings.size() == b.crossings.size() && a.d_crossings == b.d_crossings);
  }
  return 0;
}
