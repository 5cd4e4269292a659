#pragma once

#include <vector>

#include "cellload/matrix.hpp"
#include "cellload/scenario.hpp"

#include "json.hpp"

namespace cellload {

// Nadaraya-Watson regression with a Gaussian kernel; the bandwidth comes
// from the median heuristic over pairwise anchor distances.
struct KernelModel {
    Matrix anchors;  // K x N
    Matrix values;   // K x M
    double bandwidth = 0.0;
};

// Plain k-nearest-neighbor interpolation (k = 2 in the benchmarks).
struct KnnModel {
    Matrix anchors;
    Matrix values;
    std::size_t k_neighbors = 2;
};

KernelModel kernel_fit(const TrainingSet& dataset);
LoadVector kernel_predict(const KernelModel& model, const RateVector& x);

KnnModel knn_fit(const TrainingSet& dataset, std::size_t k_neighbors = 2);
LoadVector knn_predict(const KnnModel& model, const RateVector& x);

// Same layout as the minimax model JSON plus a "type" discriminator.
nlohmann::json kernel_model_to_json(const KernelModel& model);
KernelModel kernel_model_from_json(const nlohmann::json& doc);
nlohmann::json knn_model_to_json(const KnnModel& model);
KnnModel knn_model_from_json(const nlohmann::json& doc);

}  // namespace cellload
