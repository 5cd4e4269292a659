// cellload: simulate load-coupled networks, test rate feasibility, and fit
// load predictors from small training sets.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cellload/baselines.hpp"
#include "cellload/bench.hpp"
#include "cellload/format.hpp"
#include "cellload/learner.hpp"
#include "cellload/load_model.hpp"
#include "cellload/scenario.hpp"

namespace {

using namespace cellload;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + out_path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed while writing '" + out_path + "'");
    }
}

nlohmann::json parse_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

NetworkScenario load_scenario(const std::string& path) {
    try {
        return scenario_from_json(parse_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("'" + path + "' is not a scenario file: " + e.what());
    }
}

// Rate-vector rows: either headerless numeric CSV or any CSV with r_* columns
// (y_* columns, e.g. from a dataset file, are ignored).
std::vector<RateVector> parse_query_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("'" + path + "' is empty");
    }
    std::vector<std::size_t> rate_cols;
    std::vector<RateVector> rows;
    const auto first = split_csv_line(line);
    bool header = false;
    for (const auto& f : first) {
        if (f.rfind("r_", 0) == 0 || f.rfind("y_", 0) == 0) {
            header = true;
            break;
        }
    }
    if (header) {
        for (std::size_t c = 0; c < first.size(); ++c) {
            if (first[c].rfind("r_", 0) == 0) rate_cols.push_back(c);
        }
        if (rate_cols.empty()) {
            throw std::runtime_error("'" + path + "' has a header but no r_* columns");
        }
    } else {
        for (std::size_t c = 0; c < first.size(); ++c) rate_cols.push_back(c);
        RateVector row(first.size());
        for (std::size_t c = 0; c < first.size(); ++c) row[c] = parse_double(first[c]);
        rows.push_back(std::move(row));
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        RateVector row(rate_cols.size());
        for (std::size_t c = 0; c < rate_cols.size(); ++c) {
            if (rate_cols[c] >= fields.size()) {
                throw std::runtime_error("'" + path + "' row has too few fields");
            }
            row[c] = parse_double(fields[rate_cols[c]]);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("'" + path + "' contains no data rows");
    }
    return rows;
}

int run(int argc, char** argv) {
    CLI::App app{"load-coupled cellular network simulator and load predictor"};
    app.require_subcommand(1);

    // gen-scenario
    auto* gen_scenario = app.add_subcommand("gen-scenario", "generate a random deployment");
    ScenarioParams params;
    std::string out_path;
    gen_scenario->add_option("--seed", params.seed, "placement seed");
    gen_scenario->add_option("--m,--num-bs", params.num_bs, "number of base stations");
    gen_scenario->add_option("--n,--num-tp", params.num_tp, "number of test points");
    gen_scenario->add_option("--area", params.area_side_m, "square side length [m]");
    gen_scenario->add_option("--min-dist", params.min_bs_tp_distance_m,
                             "minimum BS-TP distance [m]");
    gen_scenario->add_option("--power", params.power_w, "per-BS transmit power [W]");
    gen_scenario->add_option("--resources", params.resources_hz, "bandwidth resources [Hz]");
    gen_scenario->add_option("--temperature", params.temperature_k, "noise temperature [K]");
    gen_scenario->add_option("--out", out_path, "output scenario JSON (default: stdout)");

    // gen-data
    auto* gen_data = app.add_subcommand("gen-data", "sample a feasible noisy training set");
    std::string scenario_path;
    std::size_t sample_count = 50;
    double eps = 0.05;
    std::uint64_t data_seed = 0;
    double rate_min = 1e6;
    double rate_max = 1e7;
    gen_data->add_option("--scenario", scenario_path, "scenario JSON")->required();
    gen_data->add_option("--k", sample_count, "number of samples");
    gen_data->add_option("--eps", eps, "observation noise bound");
    gen_data->add_option("--seed", data_seed, "sampling seed");
    gen_data->add_option("--rate-min", rate_min, "minimum per-TP rate [bit/s]");
    gen_data->add_option("--rate-max", rate_max, "maximum per-TP rate [bit/s]");
    gen_data->add_option("--out", out_path, "output dataset CSV (default: stdout)");

    // feasible
    auto* feasible = app.add_subcommand("feasible", "rate feasibility via the eigenvalue test");
    std::string rates_path;
    std::vector<double> inline_rates;
    feasible->add_option("--scenario", scenario_path, "scenario JSON")->required();
    feasible->add_option("--rates", rates_path, "CSV of rate vectors (one per row)");
    feasible->add_option("--rate", inline_rates, "inline rate values (repeat per TP)");
    feasible->add_option("--out", out_path, "output CSV (default: stdout)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a load predictor from a dataset");
    std::string data_path;
    std::string method = "minimax";
    fit_cmd->add_option("--data", data_path, "training dataset CSV")->required();
    fit_cmd->add_option("--eps", eps, "observation noise bound");
    fit_cmd->add_option("--method", method, "minimax|kernel|knn")
        ->check(CLI::IsMember({"minimax", "kernel", "knn"}));
    fit_cmd->add_option("--out", out_path, "output model JSON (default: stdout)");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "predict loads for rate queries");
    std::string model_path;
    std::string queries_path;
    predict_cmd->add_option("--model", model_path, "model JSON")->required();
    predict_cmd->add_option("--queries", queries_path, "CSV of rate vectors")->required();
    predict_cmd->add_option("--out", out_path, "output CSV (default: stdout)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run the evaluation protocol");
    std::string config_path;
    std::string summary_path;
    unsigned threads = 0;
    std::optional<std::uint64_t> override_seed;
    std::optional<double> override_eps;
    std::optional<std::size_t> override_m, override_n, override_seeds, override_test;
    bench_cmd->add_option("--config", config_path, "bench config JSON");
    bench_cmd->add_option("--seed", override_seed, "override base seed");
    bench_cmd->add_option("--eps", override_eps, "override noise bound");
    bench_cmd->add_option("--m", override_m, "override number of base stations");
    bench_cmd->add_option("--n", override_n, "override number of test points");
    bench_cmd->add_option("--seeds", override_seeds, "override number of repetitions");
    bench_cmd->add_option("--num-test", override_test, "override test queries per cell");
    bench_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    bench_cmd->add_option("--out", out_path, "report CSV (default: stdout)");
    bench_cmd->add_option("--summary", summary_path, "also write an aggregated summary CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        std::cerr << e.what() << "\n";
        return 1;
    }

    if (gen_scenario->parsed()) {
        const NetworkScenario scenario = generate_scenario(params);
        write_output(scenario_to_json(scenario).dump(2) + "\n", out_path);
    } else if (gen_data->parsed()) {
        const NetworkScenario scenario = load_scenario(scenario_path);
        ScenarioParams p;
        p.num_bs = scenario.num_bs;
        p.num_tp = scenario.num_tp;
        p.resources_hz = scenario.resources_hz;
        p.rate_min_bps = rate_min;
        p.rate_max_bps = rate_max;
        const TrainingSet dataset = generate_dataset(scenario, p, sample_count, eps, data_seed);
        std::ostringstream csv;
        write_csv(dataset, csv);
        write_output(csv.str(), out_path);
    } else if (feasible->parsed()) {
        const NetworkScenario scenario = load_scenario(scenario_path);
        std::vector<RateVector> rows;
        if (!rates_path.empty()) {
            rows = parse_query_rows(rates_path);
        } else if (!inline_rates.empty()) {
            rows.push_back(inline_rates);
        } else {
            std::cerr << "feasible: provide --rates or --rate values\n";
            return 1;
        }
        std::ostringstream csv;
        csv << "verdict,lambda\n";
        for (const auto& rates : rows) {
            if (rates.size() != scenario.num_tp) {
                throw std::runtime_error("rate vector has " + std::to_string(rates.size()) +
                                         " entries, scenario expects " +
                                         std::to_string(scenario.num_tp));
            }
            const FeasibilityResult res = is_feasible(scenario, rates);
            csv << (res.feasible ? "feasible" : "infeasible") << ','
                << format_double(res.eigval) << '\n';
        }
        write_output(csv.str(), out_path);
    } else if (fit_cmd->parsed()) {
        std::ifstream in(data_path);
        if (!in) {
            throw std::runtime_error("cannot open '" + data_path + "' for reading");
        }
        TrainingSet dataset = training_set_from_csv(in);
        dataset.noise_bound = eps;
        nlohmann::json doc;
        if (method == "minimax") {
            doc = model_to_json(fit(dataset, eps));
        } else if (method == "kernel") {
            doc = kernel_model_to_json(kernel_fit(dataset));
        } else {
            doc = knn_model_to_json(knn_fit(dataset, 2));
        }
        write_output(doc.dump(2) + "\n", out_path);
    } else if (predict_cmd->parsed()) {
        const nlohmann::json doc = parse_json_file(model_path);
        const std::string type = doc.value("type", "minimax");
        std::function<LoadVector(const RateVector&)> predictor;
        if (type == "minimax") {
            auto model = std::make_shared<LearnerModel>(model_from_json(doc));
            predictor = [model](const RateVector& x) { return predict(*model, x); };
        } else if (type == "kernel") {
            auto model = std::make_shared<KernelModel>(kernel_model_from_json(doc));
            predictor = [model](const RateVector& x) { return kernel_predict(*model, x); };
        } else if (type == "knn") {
            auto model = std::make_shared<KnnModel>(knn_model_from_json(doc));
            predictor = [model](const RateVector& x) { return knn_predict(*model, x); };
        } else {
            throw std::runtime_error("unknown model type '" + type + "' in '" + model_path + "'");
        }
        const std::vector<RateVector> rows = parse_query_rows(queries_path);
        std::ostringstream csv;
        const LoadVector first = predictor(rows.front());
        for (std::size_t i = 0; i < first.size(); ++i) {
            csv << "y_" << (i + 1) << (i + 1 < first.size() ? "," : "");
        }
        csv << "\n";
        for (const auto& row : rows) {
            const LoadVector loads = predictor(row);
            for (std::size_t i = 0; i < loads.size(); ++i) {
                csv << format_double(loads[i]) << (i + 1 < loads.size() ? "," : "");
            }
            csv << "\n";
        }
        write_output(csv.str(), out_path);
    } else if (bench_cmd->parsed()) {
        BenchConfig config;
        if (!config_path.empty()) {
            config = bench_config_from_json(parse_json_file(config_path));
        }
        if (override_seed) config.scenario_params.seed = *override_seed;
        if (override_eps) config.noise_eps = *override_eps;
        if (override_m) config.scenario_params.num_bs = *override_m;
        if (override_n) config.scenario_params.num_tp = *override_n;
        if (override_seeds) config.num_seeds = *override_seeds;
        if (override_test) config.num_test = *override_test;
        const BenchReport report = run_benchmark(config, threads);
        std::ostringstream csv;
        write_csv(report, csv);
        write_output(csv.str(), out_path);
        if (!summary_path.empty()) {
            std::ostringstream summary;
            write_summary_csv(report, summary);
            write_output(summary.str(), summary_path);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
