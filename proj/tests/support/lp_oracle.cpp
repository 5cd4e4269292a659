#include "support/lp_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cellload::testing {

namespace {

constexpr double kTol = 1e-9;

struct Tableau {
    std::size_t rows = 0;  // constraints
    std::size_t cols = 0;  // variables incl. rhs column
    std::vector<double> t;
    std::vector<double> obj;  // reduced-cost row, obj.back() = -objective value
    std::vector<std::size_t> basis;

    double& at(std::size_t i, std::size_t j) { return t[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * cols + j]; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t j = 0; j < cols; ++j) at(pr, j) /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == pr) continue;
            const double f = at(i, pc);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) at(i, j) -= f * at(pr, j);
        }
        const double f = obj[pc];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * at(pr, j);
        }
        basis[pr] = pc;
    }

    // Bland's rule keeps the oracle cycle-free.
    bool iterate(std::size_t usable_cols) {
        for (std::size_t it = 0; it < 200000; ++it) {
            std::size_t pc = usable_cols;
            for (std::size_t j = 0; j < usable_cols; ++j) {
                if (obj[j] < -kTol) {
                    pc = j;
                    break;
                }
            }
            if (pc == usable_cols) return true;  // optimal
            std::size_t pr = rows;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                if (at(i, pc) > kTol) {
                    const double ratio = at(i, cols - 1) / at(i, pc);
                    if (ratio < best_ratio - kTol ||
                        (ratio < best_ratio + kTol && (pr == rows || basis[i] < basis[pr]))) {
                        best_ratio = ratio;
                        pr = i;
                    }
                }
            }
            if (pr == rows) {
                throw std::runtime_error("lp oracle: unbounded program");
            }
            pivot(pr, pc);
        }
        throw std::runtime_error("lp oracle: iteration cap hit");
    }
};

}  // namespace

LpResult solve_lp_min(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                      const std::vector<double>& b) {
    const std::size_t n = c.size();
    const std::size_t m = A.size();
    if (b.size() != m) throw std::invalid_argument("lp oracle: b size mismatch");

    std::size_t n_art = 0;
    for (double bi : b) {
        if (bi < 0.0) ++n_art;
    }

    Tableau tab;
    tab.rows = m;
    tab.cols = n + m + n_art + 1;
    tab.t.assign(tab.rows * tab.cols, 0.0);
    tab.obj.assign(tab.cols, 0.0);
    tab.basis.assign(m, 0);

    std::size_t art = n + m;
    for (std::size_t i = 0; i < m; ++i) {
        if (A[i].size() != n) throw std::invalid_argument("lp oracle: A row size mismatch");
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * A[i][j];
        tab.at(i, n + i) = sign;  // slack
        tab.at(i, tab.cols - 1) = sign * b[i];
        if (b[i] < 0.0) {
            tab.at(i, art) = 1.0;
            tab.basis[i] = art;
            ++art;
        } else {
            tab.basis[i] = n + i;
        }
    }

    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] >= n + m) {
                for (std::size_t j = 0; j < tab.cols; ++j) tab.obj[j] -= tab.at(i, j);
            }
        }
        tab.iterate(tab.cols - 1);
        if (-tab.obj.back() > 1e-7) {
            return {};  // infeasible
        }
        // Kick degenerate artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] >= n + m) {
                for (std::size_t j = 0; j < n + m; ++j) {
                    if (std::fabs(tab.at(i, j)) > kTol) {
                        tab.pivot(i, j);
                        break;
                    }
                }
            }
        }
    }

    // Phase 2 with the real costs; artificial columns are frozen out.
    std::fill(tab.obj.begin(), tab.obj.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) tab.obj[j] = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] < n && c[tab.basis[i]] != 0.0) {
            const double f = c[tab.basis[i]];
            for (std::size_t j = 0; j < tab.cols; ++j) tab.obj[j] -= f * tab.at(i, j);
        }
    }
    tab.iterate(n + m);

    LpResult result;
    result.optimal = true;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] < n) result.x[tab.basis[i]] = tab.at(i, tab.cols - 1);
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
    return result;
}

double smoothing_objective_oracle(const std::vector<double>& y, double lip, const Matrix& cone) {
    const std::size_t count = y.size();
    const std::size_t n = 2 * count;  // q = q+ - q-
    std::vector<double> c(n, 1.0);
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t j = 0; j < count; ++j) {
            if (j == k) continue;
            std::vector<double> row(n, 0.0);
            row[k] = 1.0;
            row[count + k] = -1.0;
            row[j] = -1.0;
            row[count + j] = 1.0;
            A.push_back(std::move(row));
            b.push_back(y[j] - y[k] + lip * cone(k, j));
        }
    }
    const LpResult res = solve_lp_min(c, A, b);
    if (!res.optimal) {
        throw std::runtime_error("smoothing oracle: LP reported infeasible");
    }
    return res.objective;
}

}  // namespace cellload::testing
