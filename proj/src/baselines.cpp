#include "cellload/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cellload/simd.hpp"

namespace cellload {

namespace {

Matrix anchors_matrix(const TrainingSet& dataset) {
    if (dataset.inputs.empty()) {
        throw std::invalid_argument("training set is empty");
    }
    const std::size_t n = dataset.inputs.front().size();
    Matrix anchors(dataset.size(), n);
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        if (dataset.inputs[k].size() != n) {
            throw std::invalid_argument("training inputs have inconsistent dimensions");
        }
        std::copy(dataset.inputs[k].begin(), dataset.inputs[k].end(), anchors.row(k));
    }
    return anchors;
}

void check_query(const Matrix& anchors, const RateVector& x) {
    if (x.size() != anchors.cols) {
        throw std::invalid_argument("query dimension does not match model dimension");
    }
}

nlohmann::json rows_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < m.rows; ++k) {
        rows.push_back(std::vector<double>(m.row(k), m.row(k) + m.cols));
    }
    return rows;
}

Matrix rows_from_json(const nlohmann::json& rows, const char* what) {
    if (!rows.is_array() || rows.empty()) {
        throw std::invalid_argument(std::string(what) + " must be a non-empty array");
    }
    const std::size_t cols = rows.at(0).size();
    Matrix m(rows.size(), cols);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto row = rows.at(k).get<std::vector<double>>();
        if (row.size() != cols) {
            throw std::invalid_argument(std::string(what) + " rows have inconsistent lengths");
        }
        std::copy(row.begin(), row.end(), m.row(k));
    }
    return m;
}

}  // namespace

KernelModel kernel_fit(const TrainingSet& dataset) {
    if (dataset.size() < 2) {
        throw std::invalid_argument("kernel regression needs at least two samples");
    }
    KernelModel model;
    model.anchors = anchors_matrix(dataset);
    model.values = dataset.outputs;

    std::vector<double> dists;
    dists.reserve(dataset.size() * (dataset.size() - 1) / 2);
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        for (std::size_t j = k + 1; j < dataset.size(); ++j) {
            dists.push_back(std::sqrt(
                simd::squared_distance(model.anchors.row(k), model.anchors.row(j),
                                       model.anchors.cols)));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t count = dists.size();
    model.bandwidth = (count % 2 == 1) ? dists[count / 2]
                                       : 0.5 * (dists[count / 2 - 1] + dists[count / 2]);
    if (!(model.bandwidth > 0.0)) {
        throw std::invalid_argument("kernel bandwidth is zero (duplicate anchors)");
    }
    return model;
}

LoadVector kernel_predict(const KernelModel& model, const RateVector& x) {
    check_query(model.anchors, x);
    const std::size_t count = model.anchors.rows;
    const std::size_t m = model.values.cols;
    const double inv_two_h2 = 1.0 / (2.0 * model.bandwidth * model.bandwidth);

    LoadVector out(m, 0.0);
    double weight_sum = 0.0;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double d2 = simd::squared_distance(x.data(), model.anchors.row(k), x.size());
        if (d2 < best_d2) {
            best_d2 = d2;
            nearest = k;
        }
        const double w = std::exp(-d2 * inv_two_h2);
        weight_sum += w;
        simd::axpy(m, w, model.values.row(k), out.data());
    }
    if (weight_sum <= 0.0) {
        // All weights underflowed; fall back to the nearest anchor.
        return LoadVector(model.values.row(nearest), model.values.row(nearest) + m);
    }
    for (double& v : out) v /= weight_sum;
    return out;
}

KnnModel knn_fit(const TrainingSet& dataset, std::size_t k_neighbors) {
    if (k_neighbors == 0 || k_neighbors > dataset.size()) {
        throw std::invalid_argument("k_neighbors must be in [1, K]");
    }
    KnnModel model;
    model.anchors = anchors_matrix(dataset);
    model.values = dataset.outputs;
    model.k_neighbors = k_neighbors;
    return model;
}

LoadVector knn_predict(const KnnModel& model, const RateVector& x) {
    check_query(model.anchors, x);
    const std::size_t count = model.anchors.rows;
    const std::size_t m = model.values.cols;

    // Selection by (distance, index) keeps ties deterministic.
    std::vector<std::pair<double, std::size_t>> order(count);
    for (std::size_t k = 0; k < count; ++k) {
        order[k] = {simd::squared_distance(x.data(), model.anchors.row(k), x.size()), k};
    }
    const std::size_t kn = std::min(model.k_neighbors, count);
    std::partial_sort(order.begin(), order.begin() + kn, order.end());

    LoadVector out(m, 0.0);
    for (std::size_t s = 0; s < kn; ++s) {
        simd::axpy(m, 1.0, model.values.row(order[s].second), out.data());
    }
    for (double& v : out) v /= static_cast<double>(kn);
    return out;
}

nlohmann::json kernel_model_to_json(const KernelModel& model) {
    return nlohmann::json{{"type", "kernel"},
                          {"bandwidth", model.bandwidth},
                          {"anchors", rows_to_json(model.anchors)},
                          {"values", rows_to_json(model.values)}};
}

KernelModel kernel_model_from_json(const nlohmann::json& doc) {
    if (doc.value("type", "") != "kernel") {
        throw std::invalid_argument("model type is not 'kernel'");
    }
    KernelModel model;
    model.bandwidth = doc.at("bandwidth").get<double>();
    model.anchors = rows_from_json(doc.at("anchors"), "anchors");
    model.values = rows_from_json(doc.at("values"), "values");
    if (!(model.bandwidth > 0.0) || model.anchors.rows != model.values.rows) {
        throw std::invalid_argument("kernel model is malformed");
    }
    return model;
}

nlohmann::json knn_model_to_json(const KnnModel& model) {
    return nlohmann::json{{"type", "knn"},
                          {"k_neighbors", model.k_neighbors},
                          {"anchors", rows_to_json(model.anchors)},
                          {"values", rows_to_json(model.values)}};
}

KnnModel knn_model_from_json(const nlohmann::json& doc) {
    if (doc.value("type", "") != "knn") {
        throw std::invalid_argument("model type is not 'knn'");
    }
    KnnModel model;
    model.k_neighbors = doc.at("k_neighbors").get<std::size_t>();
    model.anchors = rows_from_json(doc.at("anchors"), "anchors");
    model.values = rows_from_json(doc.at("values"), "values");
    if (model.k_neighbors == 0 || model.k_neighbors > model.anchors.rows ||
        model.anchors.rows != model.values.rows) {
        throw std::invalid_argument("knn model is malformed");
    }
    return model;
}

}  // namespace cellload
