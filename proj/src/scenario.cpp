#include "cellload/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cellload/errors.hpp"
#include "cellload/format.hpp"

namespace cellload {

namespace {

constexpr double kBoltzmann = 1.380649e-23;  // J/K, exact SI value

struct Point {
    double x;
    double y;
};

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

void ScenarioParams::validate() const {
    if (num_bs == 0 || num_tp == 0) {
        throw std::invalid_argument("scenario params need positive BS and TP counts");
    }
    if (!(area_side_m > 0.0)) {
        throw std::invalid_argument("area_side_m must be positive");
    }
    if (!(min_bs_tp_distance_m >= 0.0)) {
        throw std::invalid_argument("min_bs_tp_distance_m must be non-negative");
    }
    if (!(power_w > 0.0) || !(resources_hz > 0.0) || !(temperature_k > 0.0)) {
        throw std::invalid_argument("power, resources and temperature must be positive");
    }
    if (!(rate_min_bps > 0.0) || !(rate_min_bps < rate_max_bps)) {
        throw std::invalid_argument("rate range must satisfy 0 < rate_min < rate_max");
    }
}

nlohmann::json params_to_json(const ScenarioParams& p) {
    return nlohmann::json{{"num_bs", p.num_bs},
                          {"num_tp", p.num_tp},
                          {"area_side_m", p.area_side_m},
                          {"min_bs_tp_distance_m", p.min_bs_tp_distance_m},
                          {"power_w", p.power_w},
                          {"resources_hz", p.resources_hz},
                          {"temperature_k", p.temperature_k},
                          {"rate_min_bps", p.rate_min_bps},
                          {"rate_max_bps", p.rate_max_bps},
                          {"seed", p.seed}};
}

ScenarioParams params_from_json(const nlohmann::json& doc) {
    ScenarioParams p;
    if (doc.contains("num_bs")) p.num_bs = doc.at("num_bs").get<std::size_t>();
    if (doc.contains("num_tp")) p.num_tp = doc.at("num_tp").get<std::size_t>();
    if (doc.contains("area_side_m")) p.area_side_m = doc.at("area_side_m").get<double>();
    if (doc.contains("min_bs_tp_distance_m")) {
        p.min_bs_tp_distance_m = doc.at("min_bs_tp_distance_m").get<double>();
    }
    if (doc.contains("power_w")) p.power_w = doc.at("power_w").get<double>();
    if (doc.contains("resources_hz")) p.resources_hz = doc.at("resources_hz").get<double>();
    if (doc.contains("temperature_k")) p.temperature_k = doc.at("temperature_k").get<double>();
    if (doc.contains("rate_min_bps")) p.rate_min_bps = doc.at("rate_min_bps").get<double>();
    if (doc.contains("rate_max_bps")) p.rate_max_bps = doc.at("rate_max_bps").get<double>();
    if (doc.contains("seed")) p.seed = doc.at("seed").get<std::uint64_t>();
    p.validate();
    return p;
}

double pathloss_db(double distance_m, double min_distance_m) {
    const double d = std::max(distance_m, min_distance_m);
    return 128.1 + 37.6 * std::log10(d / 1000.0);
}

namespace {

// Cellular-style randomized layout: `count` cells of a near-square grid over
// the area, one point per cell.  BS sites sit near their cell centers
// (jittered by up to +-15% of the pitch); TPs are the service-area pixels,
// placed uniformly inside their own pixel.  This keeps the per-BS demand
// spread even enough that the configured rate range stays feasible, while
// every position is still random and seed-reproducible.
std::vector<Point> grid_layout(Rng& rng, std::size_t count, double side, bool center_jitter) {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    const std::size_t rows = (count + cols - 1) / cols;
    const double pitch_x = side / static_cast<double>(cols);
    const double pitch_y = side / static_cast<double>(rows);
    std::vector<Point> points(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double cx = static_cast<double>(i % cols);
        const double cy = static_cast<double>(i / cols);
        if (center_jitter) {
            points[i].x = (cx + 0.5 + rng.uniform(-0.15, 0.15)) * pitch_x;
            points[i].y = (cy + 0.5 + rng.uniform(-0.15, 0.15)) * pitch_y;
        } else {
            points[i].x = (cx + rng.uniform()) * pitch_x;
            points[i].y = (cy + rng.uniform()) * pitch_y;
        }
    }
    return points;
}

}  // namespace

NetworkScenario generate_scenario(const ScenarioParams& params) {
    params.validate();
    Rng rng(derive_seed(params.seed, streams::placement));

    // Draw order is part of the determinism contract: BS positions first,
    // then TP positions, interleaved x/y.
    const std::vector<Point> bs = grid_layout(rng, params.num_bs, params.area_side_m, true);
    const std::vector<Point> tp = grid_layout(rng, params.num_tp, params.area_side_m, false);

    NetworkScenario scenario;
    scenario.num_bs = params.num_bs;
    scenario.num_tp = params.num_tp;
    scenario.power.assign(params.num_bs, params.power_w);
    scenario.gain = Matrix(params.num_bs, params.num_tp);
    for (std::size_t i = 0; i < params.num_bs; ++i) {
        for (std::size_t j = 0; j < params.num_tp; ++j) {
            const double pl = pathloss_db(distance(bs[i], tp[j]), params.min_bs_tp_distance_m);
            scenario.gain(i, j) = std::pow(10.0, -pl / 10.0);
        }
    }
    scenario.assignment.resize(params.num_tp);
    for (std::size_t j = 0; j < params.num_tp; ++j) {
        std::size_t best = 0;
        double best_snr = scenario.power[0] * scenario.gain(0, j);
        for (std::size_t i = 1; i < params.num_bs; ++i) {
            const double snr = scenario.power[i] * scenario.gain(i, j);
            if (snr > best_snr) {
                best = i;
                best_snr = snr;
            }
        }
        scenario.assignment[j] = best;
    }
    scenario.resources_hz = params.resources_hz;
    scenario.noise_power_w = kBoltzmann * params.temperature_k * params.resources_hz;
    scenario.validate();
    return scenario;
}

RateVector draw_feasible_rates(const NetworkScenario& scenario, const ScenarioParams& params,
                               Rng& rng, std::uint64_t* draws) {
    constexpr std::uint64_t kDrawWindow = 100000;
    std::uint64_t attempts = 0;
    std::uint64_t rejections = 0;
    RateVector rates(scenario.num_tp);
    while (true) {
        for (auto& r : rates) r = rng.uniform(params.rate_min_bps, params.rate_max_bps);
        ++attempts;
        if (draws) ++(*draws);
        if (is_feasible(scenario, rates).feasible) {
            return rates;
        }
        ++rejections;
        if (attempts >= kDrawWindow && rejections * 100 > attempts * 99) {
            throw InfeasibleRangeError(
                "rate range appears infeasible: rejection rate above 99% over " +
                std::to_string(attempts) + " draws");
        }
    }
}

TrainingSet generate_dataset(const NetworkScenario& scenario, const ScenarioParams& params,
                             std::size_t count, double noise_eps, std::uint64_t seed) {
    params.validate();
    if (count == 0) {
        throw std::invalid_argument("generate_dataset: need at least one sample");
    }
    if (!(noise_eps >= 0.0)) {
        throw std::invalid_argument("generate_dataset: noise_eps must be non-negative");
    }
    // Separate rate and noise streams so the noise sequence does not depend
    // on how many draws the rejection step consumed.
    Rng rate_rng(derive_seed(seed, streams::rates));
    Rng noise_rng(derive_seed(seed, streams::noise));

    TrainingSet dataset;
    dataset.noise_bound = noise_eps;
    dataset.smoothed = false;
    dataset.inputs.reserve(count);
    dataset.outputs = Matrix(count, scenario.num_bs);

    for (std::size_t k = 0; k < count; ++k) {
        RateVector rates = draw_feasible_rates(scenario, params, rate_rng);
        const FixedPointResult fp = solve_fixed_point(scenario, rates);
        if (!fp.converged) {
            throw SolverError("fixed point did not converge on a feasible draw");
        }
        for (std::size_t i = 0; i < scenario.num_bs; ++i) {
            double noise = 0.0;
            if (noise_eps > 0.0) {
                noise = std::clamp(noise_rng.normal() * noise_eps, -noise_eps, noise_eps);
            }
            dataset.outputs(k, i) = std::clamp(fp.load[i] + noise, 0.0, 1.0);
        }
        dataset.inputs.push_back(std::move(rates));
    }
    return dataset;
}

void write_csv(const TrainingSet& dataset, std::ostream& out) {
    const std::size_t n = dataset.inputs.empty() ? 0 : dataset.inputs.front().size();
    const std::size_t m = dataset.outputs.cols;
    for (std::size_t j = 0; j < n; ++j) out << "r_" << (j + 1) << ",";
    for (std::size_t i = 0; i < m; ++i) out << "y_" << (i + 1) << (i + 1 < m ? "," : "");
    out << "\n";
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        for (std::size_t j = 0; j < n; ++j) out << format_double(dataset.inputs[k][j]) << ",";
        for (std::size_t i = 0; i < m; ++i) {
            out << format_double(dataset.outputs(k, i)) << (i + 1 < m ? "," : "");
        }
        out << "\n";
    }
}

TrainingSet training_set_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("dataset CSV is empty");
    }
    const auto header = split_csv_line(line);
    std::size_t n = 0;
    std::size_t m = 0;
    for (const auto& field : header) {
        if (field.rfind("r_", 0) == 0) {
            ++n;
        } else if (field.rfind("y_", 0) == 0) {
            ++m;
        } else {
            throw std::invalid_argument("dataset CSV header field '" + std::string(field) +
                                        "' is neither r_* nor y_*");
        }
    }
    if (n == 0 || m == 0) {
        throw std::invalid_argument("dataset CSV header must list r_* and y_* columns");
    }

    TrainingSet dataset;
    std::vector<double> outputs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != n + m) {
            throw std::invalid_argument("dataset CSV row has " + std::to_string(fields.size()) +
                                        " fields, expected " + std::to_string(n + m));
        }
        RateVector rates(n);
        for (std::size_t j = 0; j < n; ++j) rates[j] = parse_double(fields[j]);
        dataset.inputs.push_back(std::move(rates));
        for (std::size_t i = 0; i < m; ++i) outputs.push_back(parse_double(fields[n + i]));
    }
    dataset.outputs = Matrix(dataset.inputs.size(), m);
    dataset.outputs.data = std::move(outputs);
    return dataset;
}

}  // namespace cellload
