#include "cellload/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cellload/baselines.hpp"
#include "cellload/errors.hpp"
#include "cellload/format.hpp"
#include "cellload/learner.hpp"

namespace cellload {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Cell {
    std::size_t rep = 0;
    std::size_t k = 0;
};

struct FittedMethod {
    Predictor predictor;
    double fit_seconds = 0.0;
};

FittedMethod fit_method(const std::string& method, const TrainingSet& train, double eps) {
    const auto start = std::chrono::steady_clock::now();
    FittedMethod fitted;
    if (method == "minimax") {
        auto model = std::make_shared<LearnerModel>(fit(train, eps));
        fitted.predictor = [model](const RateVector& x) { return predict(*model, x); };
    } else if (method == "kernel") {
        auto model = std::make_shared<KernelModel>(kernel_fit(train));
        fitted.predictor = [model](const RateVector& x) { return kernel_predict(*model, x); };
    } else if (method == "knn") {
        auto model = std::make_shared<KnnModel>(knn_fit(train, 2));
        fitted.predictor = [model](const RateVector& x) { return knn_predict(*model, x); };
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    fitted.fit_seconds = elapsed_seconds(start);
    return fitted;
}

}  // namespace

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("rmse: length mismatch");
    }
    if (pred.empty()) {
        throw std::invalid_argument("rmse: empty input");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

double pearson(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    const std::size_t n = pred.size();
    if (n < 2) {
        throw std::invalid_argument("pearson: need at least two samples");
    }
    double mean_p = 0.0;
    double mean_t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_p += pred[i];
        mean_t += truth[i];
    }
    mean_p /= static_cast<double>(n);
    mean_t /= static_cast<double>(n);
    double spt = 0.0;
    double spp = 0.0;
    double stt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = pred[i] - mean_p;
        const double dt = truth[i] - mean_t;
        spt += dp * dt;
        spp += dp * dp;
        stt += dt * dt;
    }
    if (spp == 0.0 || stt == 0.0) {
        throw UndefinedCorrelationError("pearson undefined for a constant sequence");
    }
    return spt / std::sqrt(spp * stt);
}

double sup_error(const std::vector<LoadVector>& pred, const std::vector<LoadVector>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("sup_error: sample count mismatch");
    }
    double worst = 0.0;
    for (std::size_t s = 0; s < pred.size(); ++s) {
        if (pred[s].size() != truth[s].size()) {
            throw std::invalid_argument("sup_error: component count mismatch");
        }
        for (std::size_t i = 0; i < pred[s].size(); ++i) {
            worst = std::max(worst, std::fabs(pred[s][i] - truth[s][i]));
        }
    }
    return worst;
}

MonotonicityReport count_monotonicity_violations(const Predictor& predictor, std::size_t num_dims,
                                                 double rate_min, double rate_max,
                                                 std::size_t num_pairs, std::uint64_t seed) {
    constexpr double kSlack = 1e-12;
    Rng rng(derive_seed(seed, streams::mono_pairs));
    MonotonicityReport report;
    RateVector x(num_dims);
    RateVector y(num_dims);
    for (std::size_t p = 0; p < num_pairs; ++p) {
        for (std::size_t d = 0; d < num_dims; ++d) {
            x[d] = rng.uniform(rate_min, rate_max);
            y[d] = x[d] + rng.uniform() * (rate_max - x[d]);
        }
        const LoadVector fx = predictor(x);
        const LoadVector fy = predictor(y);
        if (report.per_bs.empty()) report.per_bs.assign(fx.size(), 0);
        bool violated = false;
        for (std::size_t i = 0; i < fx.size(); ++i) {
            if (fx[i] > fy[i] + kSlack) {
                ++report.per_bs[i];
                violated = true;
            }
        }
        if (violated) ++report.violating_pairs;
    }
    return report;
}

void BenchConfig::validate() const {
    scenario_params.validate();
    if (k_grid.empty() || !std::is_sorted(k_grid.begin(), k_grid.end()) ||
        std::adjacent_find(k_grid.begin(), k_grid.end()) != k_grid.end()) {
        throw std::invalid_argument("k_grid must be non-empty and strictly ascending");
    }
    if (k_grid.front() == 0) {
        throw std::invalid_argument("k_grid entries must be positive");
    }
    if (num_test == 0 || num_seeds == 0) {
        throw std::invalid_argument("num_test and num_seeds must be positive");
    }
    if (!(noise_eps >= 0.0)) {
        throw std::invalid_argument("noise_eps must be non-negative");
    }
    if (methods.empty()) {
        throw std::invalid_argument("methods must be non-empty");
    }
    for (const auto& m : methods) {
        if (m != "minimax" && m != "kernel" && m != "knn") {
            throw std::invalid_argument("unknown method '" + m + "'");
        }
    }
}

nlohmann::json bench_config_to_json(const BenchConfig& c) {
    return nlohmann::json{{"scenario", params_to_json(c.scenario_params)},
                          {"k_grid", c.k_grid},
                          {"num_test", c.num_test},
                          {"noise_eps", c.noise_eps},
                          {"num_seeds", c.num_seeds},
                          {"methods", c.methods}};
}

BenchConfig bench_config_from_json(const nlohmann::json& doc) {
    BenchConfig c;
    if (doc.contains("scenario")) c.scenario_params = params_from_json(doc.at("scenario"));
    if (doc.contains("k_grid")) c.k_grid = doc.at("k_grid").get<std::vector<std::size_t>>();
    if (doc.contains("num_test")) c.num_test = doc.at("num_test").get<std::size_t>();
    if (doc.contains("noise_eps")) c.noise_eps = doc.at("noise_eps").get<double>();
    if (doc.contains("num_seeds")) c.num_seeds = doc.at("num_seeds").get<std::size_t>();
    if (doc.contains("methods")) c.methods = doc.at("methods").get<std::vector<std::string>>();
    c.validate();
    return c;
}

BenchReport run_benchmark(const BenchConfig& config, unsigned threads) {
    config.validate();
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }

    std::vector<Cell> cells;
    for (std::size_t rep = 0; rep < config.num_seeds; ++rep) {
        for (std::size_t k : config.k_grid) cells.push_back({rep, k});
    }

    // Scenarios are shared across the K grid of one repetition.
    std::vector<NetworkScenario> scenarios(config.num_seeds);
    std::vector<std::uint64_t> rep_seeds(config.num_seeds);
    for (std::size_t rep = 0; rep < config.num_seeds; ++rep) {
        rep_seeds[rep] = derive_seed(config.scenario_params.seed, streams::bench_rep + rep);
        ScenarioParams params = config.scenario_params;
        params.seed = rep_seeds[rep];
        scenarios[rep] = generate_scenario(params);
    }

    std::vector<std::vector<BenchRow>> cell_rows(cells.size());
    std::atomic<std::size_t> next_cell{0};
    std::atomic<std::size_t> cells_done{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t c = next_cell.fetch_add(1);
            if (c >= cells.size()) return;
            const Cell cell = cells[c];
            const NetworkScenario& scenario = scenarios[cell.rep];
            ScenarioParams params = config.scenario_params;
            params.seed = rep_seeds[cell.rep];
            const std::uint64_t cell_seed = derive_seed(rep_seeds[cell.rep], cell.k);

            std::vector<BenchRow>& rows = cell_rows[c];
            try {
                const TrainingSet train = generate_dataset(scenario, params, cell.k,
                                                           config.noise_eps, cell_seed);

                // Fresh feasible test queries with exact ground truth.
                Rng test_rng(derive_seed(cell_seed, streams::test_queries));
                std::vector<RateVector> queries(config.num_test);
                std::vector<LoadVector> truths(config.num_test);
                for (std::size_t t = 0; t < config.num_test; ++t) {
                    queries[t] = draw_feasible_rates(scenario, params, test_rng);
                    const FixedPointResult fp = solve_fixed_point(scenario, queries[t]);
                    if (!fp.converged) {
                        throw SolverError("ground-truth fixed point did not converge");
                    }
                    truths[t] = fp.load;
                }

                for (const std::string& method : config.methods) {
                    const FittedMethod fitted = fit_method(method, train, config.noise_eps);

                    const auto start = std::chrono::steady_clock::now();
                    std::vector<LoadVector> preds(config.num_test);
                    for (std::size_t t = 0; t < config.num_test; ++t) {
                        preds[t] = fitted.predictor(queries[t]);
                    }
                    const double predict_seconds = elapsed_seconds(start);

                    const MonotonicityReport mono = count_monotonicity_violations(
                        fitted.predictor, scenario.num_tp, params.rate_min_bps,
                        params.rate_max_bps, config.num_test, cell_seed);

                    std::vector<double> pred_col(config.num_test);
                    std::vector<double> truth_col(config.num_test);
                    for (std::size_t i = 0; i < scenario.num_bs; ++i) {
                        for (std::size_t t = 0; t < config.num_test; ++t) {
                            pred_col[t] = preds[t][i];
                            truth_col[t] = truths[t][i];
                        }
                        BenchRow row;
                        row.seed = cell.rep;
                        row.k = cell.k;
                        row.method = method;
                        row.bs = i;
                        row.rmse = rmse(pred_col, truth_col);
                        try {
                            row.pearson = pearson(pred_col, truth_col);
                        } catch (const UndefinedCorrelationError&) {
                            row.pearson = kNan;
                        }
                        double worst = 0.0;
                        for (std::size_t t = 0; t < config.num_test; ++t) {
                            worst = std::max(worst, std::fabs(pred_col[t] - truth_col[t]));
                        }
                        row.sup_error = worst;
                        row.mono_violations = mono.per_bs[i];
                        row.fit_seconds = fitted.fit_seconds;
                        row.predict_seconds = predict_seconds;
                        rows.push_back(std::move(row));
                    }
                }
            } catch (const std::exception& e) {
                std::cerr << "bench cell (rep " << cell.rep << ", k " << cell.k
                          << ") failed: " << e.what() << "\n";
                rows.clear();
                for (const std::string& method : config.methods) {
                    for (std::size_t i = 0; i < scenario.num_bs; ++i) {
                        BenchRow row;
                        row.seed = cell.rep;
                        row.k = cell.k;
                        row.method = method;
                        row.bs = i;
                        row.rmse = row.pearson = row.sup_error = kNan;
                        row.mono_violations = -1;
                        row.fit_seconds = row.predict_seconds = kNan;
                        row.failed = true;
                        rows.push_back(std::move(row));
                    }
                }
            }
            const std::size_t done = cells_done.fetch_add(1) + 1;
            std::cerr << "bench: " << done << "/" << cells.size() << " cells\n";
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    BenchReport report;
    for (auto& rows : cell_rows) {
        for (auto& row : rows) report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.seed, a.k, a.method, a.bs) < std::tie(b.seed, b.k, b.method, b.bs);
    });
    return report;
}

void write_csv(const BenchReport& report, std::ostream& out) {
    out << "seed,k,method,bs,rmse,pearson,sup_error,mono_violations,fit_s,predict_s\n";
    for (const auto& row : report.rows) {
        out << row.seed << ',' << row.k << ',' << row.method << ',' << row.bs << ','
            << format_double(row.rmse) << ',' << format_double(row.pearson) << ','
            << format_double(row.sup_error) << ',' << row.mono_violations << ','
            << format_double(row.fit_seconds) << ',' << format_double(row.predict_seconds)
            << '\n';
    }
}

void write_summary_csv(const BenchReport& report, std::ostream& out) {
    struct Acc {
        std::vector<double> rmse, pearson, sup;
    };
    std::map<std::pair<std::size_t, std::string>, Acc> groups;
    for (const auto& row : report.rows) {
        if (row.failed) continue;
        auto& acc = groups[{row.k, row.method}];
        acc.rmse.push_back(row.rmse);
        if (!std::isnan(row.pearson)) acc.pearson.push_back(row.pearson);
        acc.sup.push_back(row.sup_error);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? kNan : s / static_cast<double>(v.size());
    };
    auto stddev = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    out << "k,method,rmse_mean,rmse_std,pearson_mean,pearson_std,sup_error_mean,sup_error_std\n";
    for (const auto& [key, acc] : groups) {
        out << key.first << ',' << key.second << ',' << format_double(mean(acc.rmse)) << ','
            << format_double(stddev(acc.rmse)) << ',' << format_double(mean(acc.pearson)) << ','
            << format_double(stddev(acc.pearson)) << ',' << format_double(mean(acc.sup)) << ','
            << format_double(stddev(acc.sup)) << '\n';
    }
}

}  // namespace cellload
