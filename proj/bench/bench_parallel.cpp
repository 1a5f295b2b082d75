// Compares the OpenMP kernels against their serial reference on the three
// hot paths: zero-table construction, the sphere resonance sweep, and the
// random-data wellposedness stress.  The two modes share one slot-indexed
// code path, so beyond the timing table this doubles as a regression check
// that every result is bit-identical.  Exit status 1 flags a mismatch.
//
// RESLAB_THREADS caps the parallel worker count; run with different values
// to map the scaling curve.

#include <chrono>
#include <cstdio>
#include <utility>

#include "reslab/airy.hpp"
#include "reslab/grushin.hpp"
#include "reslab/sphere.hpp"

using namespace reslab;

namespace {

template <typename Fn>
std::pair<double, decltype(std::declval<Fn>()())> timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    const auto t1 = std::chrono::steady_clock::now();
    return {std::chrono::duration<double, std::milli>(t1 - t0).count(),
            std::move(result)};
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
    std::printf("%-28s %10.1f ms %10.1f ms %7.2fx  %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms,
                identical ? "identical" : "MISMATCH");
}

bool same_table(const AiryZeroTable& a, const AiryZeroTable& b) {
    return a.zeros_ai == b.zeros_ai && a.zeros_ai_prime == b.zeros_ai_prime &&
           a.boundary_values == b.boundary_values && a.norms == b.norms;
}

bool same_sweep(const SphereSweep& a, const SphereSweep& b) {
    if (a.failed_l != b.failed_l || a.records.size() != b.records.size())
        return false;
    for (size_t i = 0; i < a.records.size(); ++i) {
        const ResonanceRecord &x = a.records[i], &y = b.records[i];
        if (x.lambda != y.lambda || x.l != y.l || x.multiplicity != y.multiplicity ||
            !(x.band == y.band))
            return false;
    }
    return true;
}

}  // namespace

int main() {
    std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel",
                "speedup");
    bool all_identical = true;

    auto [ts_table, serial_table] =
        timed([] { return build_zero_table(500, ExecMode::Serial); });
    auto [tp_table, parallel_table] =
        timed([] { return build_zero_table(500, ExecMode::Parallel); });
    const bool table_ok = same_table(serial_table, parallel_table);
    report("zero table (J=500)", ts_table, tp_table, table_ok);
    all_identical = all_identical && table_ok;

    const AiryZeroTable& table = parallel_table;
    BandConstants constants =
        band_constants(ObstacleModel::sphere(1.0), table);
    auto sweep = [&](ExecMode mode) {
        return compute_resonances(BoundaryCondition::Neumann, 1.0, 100, 1e-4,
                                  constants, table.zeros_ai_prime, 1.0, 0.0,
                                  12.0, mode);
    };
    auto [ts_sweep, serial_sweep] = timed([&] { return sweep(ExecMode::Serial); });
    auto [tp_sweep, parallel_sweep] =
        timed([&] { return sweep(ExecMode::Parallel); });
    const bool sweep_ok = same_sweep(serial_sweep, parallel_sweep);
    report("resonance sweep (l<=100)", ts_sweep, tp_sweep, sweep_ok);
    all_identical = all_identical && sweep_ok;

    ModelParameters params =
        make_model_parameters(0.0, Complex(0.3, 0.3), 1.0, 6.0, table);
    auto stress = [&](ExecMode mode) {
        return verify_wellposedness(params, 400, default_j_trunc(params), 2024,
                                    table, {0.0, 10.0, 40.0, 160.0}, mode);
    };
    auto [ts_wp, serial_wp] = timed([&] { return stress(ExecMode::Serial); });
    auto [tp_wp, parallel_wp] = timed([&] { return stress(ExecMode::Parallel); });
    const bool wp_ok = serial_wp.max_ratio == parallel_wp.max_ratio &&
                       serial_wp.slope == parallel_wp.slope;
    report("wellposedness (400 trials)", ts_wp, tp_wp, wp_ok);
    all_identical = all_identical && wp_ok;

    return all_identical ? 0 : 1;
}
