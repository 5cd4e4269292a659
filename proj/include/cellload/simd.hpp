#pragma once

#include <cstddef>

// Data-parallel inner-loop kernels used by the solvers and predictors.
//
// Every kernel exists as a plain scalar reference implementation and, on
// x86-64 builds, as an AVX2/FMA variant.  The free functions at namespace
// scope dispatch through a table selected at runtime: the AVX2 path is used
// when the CPU supports it, unless overridden by force_backend() or the
// CELLLOAD_SIMD environment variable ("scalar", "avx2", "auto").
//
// Vector backends reduce in lane order, so results may differ from the
// scalar reference by normal floating-point reassociation error; the test
// suite pins the two implementations against each other.

namespace cellload::simd {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Currently active backend (resolved on first use).
Backend active_backend();

// Force a specific backend, e.g. to compare implementations in tests.
// Throws std::invalid_argument if the backend is not supported here.
void force_backend(Backend b);

struct ConeSquares {
    double above;  // sum of max(a[i] - b[i], 0)^2
    double below;  // sum of max(b[i] - a[i], 0)^2
};

double squared_distance(const double* a, const double* b, std::size_t n);
double sup_abs_diff(const double* a, const double* b, std::size_t n);
ConeSquares cone_squares(const double* a, const double* b, std::size_t n);
// y[i] += alpha * x[i]
void axpy(std::size_t n, double alpha, const double* x, double* y);

namespace scalar {
double squared_distance(const double* a, const double* b, std::size_t n);
double sup_abs_diff(const double* a, const double* b, std::size_t n);
ConeSquares cone_squares(const double* a, const double* b, std::size_t n);
void axpy(std::size_t n, double alpha, const double* x, double* y);
}  // namespace scalar

#if defined(CELLLOAD_HAVE_AVX2)
namespace avx2 {
double squared_distance(const double* a, const double* b, std::size_t n);
double sup_abs_diff(const double* a, const double* b, std::size_t n);
ConeSquares cone_squares(const double* a, const double* b, std::size_t n);
void axpy(std::size_t n, double alpha, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace cellload::simd
