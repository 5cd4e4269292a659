#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cellload/load_model.hpp"
#include "cellload/matrix.hpp"
#include "cellload/rng.hpp"

#include "json.hpp"

namespace cellload {

// Parameters of the random urban-macro deployment used for simulation.
struct ScenarioParams {
    std::size_t num_bs = 10;
    std::size_t num_tp = 50;
    double area_side_m = 1000.0;
    double min_bs_tp_distance_m = 35.0;
    double power_w = 1.0;
    double resources_hz = 2e7;
    double temperature_k = 300.0;
    double rate_min_bps = 1e6;
    double rate_max_bps = 1e7;
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json params_to_json(const ScenarioParams& params);
ScenarioParams params_from_json(const nlohmann::json& doc);

// K training pairs of rate demand and observed (noisy or smoothed) loads.
struct TrainingSet {
    std::vector<RateVector> inputs;  // K rate vectors, length N each
    Matrix outputs;                  // K x M load observations
    double noise_bound = 0.0;        // per-component bound on the observation noise
    bool smoothed = false;

    std::size_t size() const { return inputs.size(); }
};

void write_csv(const TrainingSet& dataset, std::ostream& out);
// Reads the `r_1,...,r_N,y_1,...,y_M` CSV; noise_bound/smoothed are not part
// of the file format and are left at their defaults.
TrainingSet training_set_from_csv(std::istream& in);

// Urban-macro pathloss, 128.1 + 37.6 log10(d/km); distances below min_d are
// clamped to min_d.
double pathloss_db(double distance_m, double min_distance_m = 35.0);

// Random deployment on a square: uniform BS and TP positions, gains from the
// pathloss model, each TP served by the BS with the best received SNR (ties
// to the lowest BS index), thermal noise k_B * T * resources.
NetworkScenario generate_scenario(const ScenarioParams& params);

// Draws a rate vector uniformly from [rate_min, rate_max]^N, resampling
// until it passes the eigenvalue feasibility test.  `draws` (if non-null)
// accumulates the number of attempts.  Throws InfeasibleRangeError when the
// rejection rate exceeds 99% over 1e5 draws.
RateVector draw_feasible_rates(const NetworkScenario& scenario, const ScenarioParams& params,
                               Rng& rng, std::uint64_t* draws = nullptr);

// Feasible rate vectors with noisy fixed-point load observations.  The noise
// is Gaussian with standard deviation noise_eps, hard-clipped to
// [-noise_eps, +noise_eps] per component; observations are clipped to [0, 1].
TrainingSet generate_dataset(const NetworkScenario& scenario, const ScenarioParams& params,
                             std::size_t count, double noise_eps, std::uint64_t seed);

}  // namespace cellload
