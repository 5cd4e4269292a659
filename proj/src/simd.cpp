#include "cellload/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace cellload::simd {

namespace {

struct KernelTable {
    double (*squared_distance)(const double*, const double*, std::size_t);
    double (*sup_abs_diff)(const double*, const double*, std::size_t);
    ConeSquares (*cone_squares)(const double*, const double*, std::size_t);
    void (*axpy)(std::size_t, double, const double*, double*);
};

constexpr KernelTable kScalarTable{scalar::squared_distance, scalar::sup_abs_diff,
                                   scalar::cone_squares, scalar::axpy};

#if defined(CELLLOAD_HAVE_AVX2)
constexpr KernelTable kAvx2Table{avx2::squared_distance, avx2::sup_abs_diff, avx2::cone_squares,
                                 avx2::axpy};
#endif

bool cpu_has_avx2() {
#if defined(CELLLOAD_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("CELLLOAD_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        // "auto" or anything unrecognized falls through to detection.
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current_backend() {
    static std::atomic<Backend> backend{detect_backend()};
    return backend;
}

const KernelTable& table_for(Backend b) {
#if defined(CELLLOAD_HAVE_AVX2)
    if (b == Backend::avx2) return kAvx2Table;
#endif
    (void)b;
    return kScalarTable;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_supported(Backend b) {
    if (b == Backend::scalar) return true;
    return cpu_has_avx2();
}

Backend active_backend() { return current_backend().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
    if (!backend_supported(b)) {
        throw std::invalid_argument(std::string("simd backend not supported on this host: ") +
                                    backend_name(b));
    }
    current_backend().store(b, std::memory_order_relaxed);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    return table_for(active_backend()).squared_distance(a, b, n);
}

double sup_abs_diff(const double* a, const double* b, std::size_t n) {
    return table_for(active_backend()).sup_abs_diff(a, b, n);
}

ConeSquares cone_squares(const double* a, const double* b, std::size_t n) {
    return table_for(active_backend()).cone_squares(a, b, n);
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    table_for(active_backend()).axpy(n, alpha, x, y);
}

}  // namespace cellload::simd
