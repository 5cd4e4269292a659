#include "cellload/simd.hpp"

#include <algorithm>
#include <cmath>

namespace cellload::simd::scalar {

double squared_distance(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double sup_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

ConeSquares cone_squares(const double* a, const double* b, std::size_t n) {
    double above = 0.0;
    double below = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        const double up = std::max(d, 0.0);
        const double dn = std::min(d, 0.0);
        above += up * up;
        below += dn * dn;
    }
    return {above, below};
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace cellload::simd::scalar
