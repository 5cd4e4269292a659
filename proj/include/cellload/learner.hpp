#pragma once

#include <vector>

#include "cellload/matrix.hpp"
#include "cellload/scenario.hpp"

#include "json.hpp"

namespace cellload {

// State of the fitted minimax predictor: per-BS Lipschitz constants plus the
// smoothed training pairs.  Immutable after fit; predict is pure and safe to
// call concurrently.
struct LearnerModel {
    std::vector<double> lipschitz;  // length M, load per bits/s (Euclidean norm)
    double noise_bound = 0.0;       // eps used at fit time
    Matrix anchors;                 // K x N training rate vectors
    Matrix values;                  // K x M smoothed load values in [0, 1]

    std::size_t num_bs() const { return values.cols; }
    std::size_t num_anchors() const { return anchors.rows; }
    std::size_t num_dims() const { return anchors.cols; }

    void validate() const;

    // Largest violation of v_ik - v_ij <= L_i * ||(r^k - r^j)_+|| over all
    // BSs and anchor pairs; <= ~1e-12 on fitted models.
    double max_compatibility_violation() const;
};

nlohmann::json model_to_json(const LearnerModel& model);
LearnerModel model_from_json(const nlohmann::json& doc);

// Pointwise bounds on every function of the hypothesis class consistent with
// the training data, intersected with [0, 1].
struct Envelope {
    LoadVector lower;
    LoadVector upper;
};

// ||(x - anchor)_+||: Euclidean norm of the componentwise positive part.
// Zero iff x <= anchor componentwise; non-decreasing in every x component.
double cone_distance(const RateVector& x, const RateVector& anchor);

// Per-BS Lipschitz estimate max_{k != j} (|y_k - y_j| - 2 eps) / ||r^k - r^j||,
// clamped below at zero.  Throws DuplicateAnchorError on coinciding anchors.
std::vector<double> estimate_lipschitz(const TrainingSet& dataset, double eps);

// Minimal L1 adjustment of the observations so that, per BS, the values
// admit a monotone L-Lipschitz extension:
//   min sum_k |q_k|  s.t.  q_k - q_j <= y_j - y_k + L ||(r^k - r^j)_+||.
// Solved exactly; adjusted values are clamped to [0, 1].
TrainingSet smooth_monotone(const TrainingSet& dataset, const std::vector<double>& lipschitz,
                            double eps);

// Lipschitz estimation followed by monotone smoothing.
LearnerModel fit(const TrainingSet& dataset, double eps);

Envelope envelope(const LearnerModel& model, const RateVector& x);

// Midpoint of the envelope; O(K) distance evaluations per BS per query.
LoadVector predict(const LearnerModel& model, const RateVector& x);

namespace detail {

// Exact solver for  min sum_k |q_k|  s.t.  q_k - q_j <= y[j] - y[k] + lip * cone(k, j),
// where cone(k, j) = ||(r^k - r^j)_+|| >= 0 (row-major K x K).  The bound
// structure guarantees feasibility for every lip >= 0 (q = -y + const always
// satisfies the constraints), so the underlying min-cost circulation has no
// negative cycles.  Among tied optima the common-shift degree of freedom is
// centered on the median interval, which makes the output symmetric and
// deterministic.
std::vector<double> smooth_values_lp(const std::vector<double>& y, double lip,
                                     const Matrix& cone);

}  // namespace detail

}  // namespace cellload
