#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cellload/scenario.hpp"

#include "json.hpp"

namespace cellload {

// sqrt(mean squared difference).  Throws on length mismatch or empty input.
double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

// Sample Pearson correlation.  Throws UndefinedCorrelationError when either
// sequence is constant.
double pearson(const std::vector<double>& pred, const std::vector<double>& truth);

// Largest absolute componentwise deviation over all samples.
double sup_error(const std::vector<LoadVector>& pred, const std::vector<LoadVector>& truth);

using Predictor = std::function<LoadVector(const RateVector&)>;

struct MonotonicityReport {
    long violating_pairs = 0;        // pairs where any component decreases
    std::vector<long> per_bs;        // pairs violating in a given component
};

// Draws `num_pairs` ordered query pairs x <= y (y = x plus a non-negative
// perturbation within the rate range) and counts predictions where a
// component of predict(x) exceeds predict(y) by more than 1e-12.
MonotonicityReport count_monotonicity_violations(const Predictor& predictor, std::size_t num_dims,
                                                 double rate_min, double rate_max,
                                                 std::size_t num_pairs, std::uint64_t seed);

struct BenchConfig {
    ScenarioParams scenario_params;
    std::vector<std::size_t> k_grid{25, 50, 100, 200, 400, 600};
    std::size_t num_test = 10000;
    double noise_eps = 0.05;
    std::size_t num_seeds = 10;
    std::vector<std::string> methods{"minimax", "kernel", "knn"};

    void validate() const;
};

nlohmann::json bench_config_to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(const nlohmann::json& doc);

struct BenchRow {
    std::uint64_t seed = 0;  // repetition index (0-based)
    std::size_t k = 0;
    std::string method;
    std::size_t bs = 0;
    double rmse = 0.0;
    double pearson = 0.0;
    double sup_error = 0.0;
    long mono_violations = 0;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
    bool failed = false;  // cell raised; metric fields are NaN
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

// Full evaluation protocol: per repetition, generate a scenario; per K,
// draw a training set, fit each method and score num_test fresh feasible
// queries against exact fixed-point ground truth.  Cells of the
// (seed x K) grid run in parallel on `threads` workers (0 = hardware
// concurrency); rows are sorted before emission, so the CSV content does
// not depend on scheduling.
BenchReport run_benchmark(const BenchConfig& config, unsigned threads = 0);

// Header: seed,k,method,bs,rmse,pearson,sup_error,mono_violations,fit_s,predict_s
void write_csv(const BenchReport& report, std::ostream& out);

// Mean and standard deviation per (k, method) over seeds and BSs.
void write_summary_csv(const BenchReport& report, std::ostream& out);

}  // namespace cellload
