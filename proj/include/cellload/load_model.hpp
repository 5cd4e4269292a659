#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cellload/matrix.hpp"

#include "json.hpp"

namespace cellload {

// Per-TP downlink rate demand in bits/s (strictly positive) and per-BS
// cell-load (fraction of bandwidth resources in use; feasible when <= 1).
using RateVector = std::vector<double>;
using LoadVector = std::vector<double>;

// Fixed network state: transmit powers, linear channel gains, the TP -> BS
// serving assignment, total bandwidth resources and noise power.  Power and
// assignment are fixed for the lifetime of a scenario; all operations on it
// are pure, so scenarios can be shared freely across threads.
struct NetworkScenario {
    std::size_t num_bs = 0;
    std::size_t num_tp = 0;
    std::vector<double> power;        // W, length num_bs, strictly positive
    Matrix gain;                      // num_bs x num_tp, linear, non-negative
    std::vector<std::size_t> assignment;  // serving BS index per TP (0-based)
    double resources_hz = 0.0;        // product of RB count and RB bandwidth
    double noise_power_w = 0.0;

    // Throws std::invalid_argument if any structural invariant is broken
    // (non-positive power, missing serving gain, partial assignment, ...).
    void validate() const;
};

nlohmann::json scenario_to_json(const NetworkScenario& scenario);
NetworkScenario scenario_from_json(const nlohmann::json& doc);

struct FixedPointResult {
    LoadVector load;
    double residual = 0.0;  // sup-norm of load - q(load, rates)
    std::size_t iterations = 0;
    bool converged = false;
    bool feasible = false;  // converged with every component <= 1 + feasibility tol
};

struct EigenSolution {
    LoadVector eigvec;      // sup-norm 1
    double eigval = 0.0;    // > 0
    std::size_t iterations = 0;
    bool converged = false;
};

struct FeasibilityResult {
    bool feasible = false;
    double eigval = 0.0;
};

inline constexpr double kDefaultTol = 1e-10;
inline constexpr std::size_t kDefaultMaxIter = 10000;
inline constexpr double kFeasibilityTol = 1e-9;
// An increasing iteration that overshoots feasible loads by three orders of
// magnitude cannot come back down; treat it as divergence.
inline constexpr double kDivergenceCeiling = 1e3;

// SINR of the link BS i -> TP j at the given interference load.
// Throws InvalidLinkError when gain(i, j) == 0.
double sinr(const NetworkScenario& scenario, const LoadVector& load, std::size_t bs,
            std::size_t tp);

// One application of the load mapping: component i sums r_j over served TPs
// divided by the spectral efficiency log2(1 + SINR), normalized by the
// bandwidth resources.  Monotone in both arguments, concave in the load.
LoadVector load_map(const NetworkScenario& scenario, const LoadVector& load,
                    const RateVector& rates);

// Fixed-point iteration of the load mapping from the all-zero vector.  The
// iteration is increasing; it stops when the sup-norm residual drops below
// tol, the iterate passes the divergence ceiling, or max_iter is exhausted.
FixedPointResult solve_fixed_point(const NetworkScenario& scenario, const RateVector& rates,
                                   double tol = kDefaultTol,
                                   std::size_t max_iter = kDefaultMaxIter);

// Conditional eigenvalue problem: find (rho, lambda) with
// q(rho, rates) = lambda * rho and sup-norm(rho) = 1, by normalized
// fixed-point iteration from the all-ones vector.
EigenSolution solve_conditional_eigen(const NetworkScenario& scenario, const RateVector& rates,
                                      double tol = kDefaultTol,
                                      std::size_t max_iter = kDefaultMaxIter);

// Rate demand feasibility: feasible iff the conditional eigenvalue is
// <= 1 + feas_tol.  Throws SolverError when the eigensolver does not
// converge (indeterminate verdict).
FeasibilityResult is_feasible(const NetworkScenario& scenario, const RateVector& rates,
                              double feas_tol = kFeasibilityTol);

}  // namespace cellload
