// Serial reference vs OpenMP kernels.
#include "critsense/fermion.hpp"
#include "critsense/models.hpp"
#include "critsense/state.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

using namespace critsense;

namespace {

double time_ms(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const std::string& name, double serial, double parallel, const char* label = "openmp") {
    std::printf("%-28s serial %10.3f ms   %-6s %10.3f ms   speedup %6.2f\n", name.c_str(), serial, label, parallel,
                serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 16;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
    std::printf("threads %d, n = %d qubits, %d repetitions\n", omp_get_max_threads(), n, reps);

    ModelSpec spec;
    spec.L = n;
    const PauliOperator H = build_hamiltonian(spec);
    const CompiledOperator op(H);
    const PureState psi = random_state(n, 7);
    Vec out;
    report("apply (tfim H)", time_ms([&] { op.apply_serial(psi.amplitudes(), out); }, reps),
           time_ms([&] { op.apply(psi.amplitudes(), out); }, reps));

    volatile double sink = 0.0;
    report("expectation (tfim H)", time_ms([&] { sink = expectation_serial(psi, H).real(); }, reps),
           time_ms([&] { sink = expectation(psi, H).real(); }, reps));

    const FermionSolution sol = solve_tfim_fermion(512, 1.0, 1.0);
    report("zz_correlators L=512", time_ms([&] { sink = zz_correlators_serial(sol, 256).back(); }, 1),
           time_ms([&] { sink = zz_correlators(sol, 256).back(); }, 1));
    report("zz_correlators_fast L=512", time_ms([&] { sink = zz_correlators_serial(sol, 256).back(); }, 1),
           time_ms([&] { sink = zz_correlators_fast(sol, 256).back(); }, 1), "fast");
    (void)sink;
    return 0;
}
