#ifndef RESLAB_PARALLEL_HPP
#define RESLAB_PARALLEL_HPP

#include <cstddef>
#include <cstdlib>

#ifdef RESLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace reslab {

// Every parallel kernel in the library also has a serial path selected by this
// flag.  The two paths write per-index slots and fold them in a fixed serial
// order afterwards, so results are bit-identical; tests rely on that.
enum class ExecMode { Serial, Parallel };

// Worker count: OpenMP's limit capped by the RESLAB_THREADS environment
// variable.  Returns 1 when OpenMP is unavailable.
inline int thread_cap() {
#ifdef RESLAB_HAVE_OPENMP
    int cap = omp_get_max_threads();
    if (const char* env = std::getenv("RESLAB_THREADS")) {
        int requested = std::atoi(env);
        if (requested >= 1 && requested < cap) cap = requested;
    }
    return cap;
#else
    return 1;
#endif
}

// Runs body(i) for i in [0, n).  Bodies must only write state owned by
// index i (slot arrays); any reduction happens in the caller, serially.
template <class Body>
void parallel_for(std::size_t n, ExecMode mode, Body&& body) {
#ifdef RESLAB_HAVE_OPENMP
    if (mode == ExecMode::Parallel && thread_cap() > 1 && n > 1) {
        const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
        for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace reslab

#endif
