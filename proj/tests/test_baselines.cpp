#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cellload/baselines.hpp"
#include "cellload/rng.hpp"

using namespace cellload;

namespace {

TrainingSet make_set(std::vector<RateVector> inputs, std::vector<std::vector<double>> outputs) {
    TrainingSet set;
    set.inputs = std::move(inputs);
    set.outputs = Matrix(outputs.size(), outputs.front().size());
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        std::copy(outputs[k].begin(), outputs[k].end(), set.outputs.row(k));
    }
    return set;
}

}  // namespace

TEST_CASE("kernel bandwidth is the median pairwise distance") {
    CHECK(kernel_fit(make_set({{0.0}, {2.0}}, {{0.1}, {0.9}})).bandwidth == 2.0);
    // Distances of {0, 1, 3} are {1, 2, 3}; the median is 2.
    CHECK(kernel_fit(make_set({{0.0}, {1.0}, {3.0}}, {{0.1}, {0.5}, {0.9}})).bandwidth == 2.0);
    CHECK_THROWS_AS(kernel_fit(make_set({{0.0}}, {{0.1}})), std::invalid_argument);
}

TEST_CASE("kernel prediction worked examples") {
    // Equidistant anchors average their values with equal weights.
    const KernelModel sym = kernel_fit(make_set({{0.0}, {1.0}}, {{0.0}, {1.0}}));
    CHECK(kernel_predict(sym, {0.5})[0] == 0.5);

    // The circumcenter of this right triangle is (1, 1), equidistant from
    // all three anchors, so the prediction is their plain mean.
    const KernelModel tri =
        kernel_fit(make_set({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}}, {{0.3}, {0.6}, {0.9}}));
    const LoadVector center = kernel_predict(tri, {1.0, 1.0});
    CHECK(center[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("kernel prediction falls back to the nearest anchor on underflow") {
    KernelModel model = kernel_fit(make_set({{0.0}, {1.0}}, {{0.25}, {0.75}}));
    model.bandwidth = 1e-3;  // query far away underflows every weight
    const LoadVector out = kernel_predict(model, {5.0});
    CHECK(out[0] == 0.75);
    const LoadVector at_anchor = kernel_predict(model, {0.0});
    CHECK(at_anchor[0] == 0.25);  // dominant weight at the coincident anchor
}

TEST_CASE("kernel output stays inside the convex hull of values") {
    Rng rng(7);
    std::vector<RateVector> inputs;
    std::vector<std::vector<double>> outputs;
    for (int k = 0; k < 12; ++k) {
        inputs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        outputs.push_back({rng.uniform(), rng.uniform()});
    }
    const KernelModel model = kernel_fit(make_set(inputs, outputs));
    double lo0 = 1.0, hi0 = 0.0, lo1 = 1.0, hi1 = 0.0;
    for (const auto& v : outputs) {
        lo0 = std::min(lo0, v[0]);
        hi0 = std::max(hi0, v[0]);
        lo1 = std::min(lo1, v[1]);
        hi1 = std::max(hi1, v[1]);
    }
    for (int rep = 0; rep < 200; ++rep) {
        const LoadVector out = kernel_predict(model, {rng.uniform(-1.0, 2.0),
                                                      rng.uniform(-1.0, 2.0),
                                                      rng.uniform(-1.0, 2.0)});
        CHECK(out[0] >= lo0 - 1e-12);
        CHECK(out[0] <= hi0 + 1e-12);
        CHECK(out[1] >= lo1 - 1e-12);
        CHECK(out[1] <= hi1 + 1e-12);
    }
}

TEST_CASE("knn prediction worked examples") {
    // With K = 2 every query averages both values.
    const KnnModel pair = knn_fit(make_set({{0.0}, {1.0}}, {{0.2}, {0.8}}), 2);
    CHECK(knn_predict(pair, {-3.0})[0] == 0.5);
    CHECK(knn_predict(pair, {9.0})[0] == 0.5);

    const KnnModel tri = knn_fit(make_set({{0.0}, {1.0}, {2.0}}, {{0.0}, {1.0}, {0.5}}), 2);
    // Distances from 0.9: {0.9, 0.1, 1.1} -> anchors 1 and 0.
    CHECK(knn_predict(tri, {0.9})[0] == 0.5);
    // From 1.0 the tie between anchors 0 and 2 breaks to the lower index.
    CHECK(knn_predict(tri, {1.0})[0] == doctest::Approx(0.5 * (1.0 + 0.0)).epsilon(1e-15));
}

TEST_CASE("knn output is the exact mean of the selected neighbors") {
    Rng rng(9);
    std::vector<RateVector> inputs;
    std::vector<std::vector<double>> outputs;
    for (int k = 0; k < 9; ++k) {
        inputs.push_back({rng.uniform(), rng.uniform()});
        outputs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    }
    const KnnModel model = knn_fit(make_set(inputs, outputs), 3);
    for (int rep = 0; rep < 50; ++rep) {
        const RateVector x{rng.uniform(), rng.uniform()};
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < 2; ++d) {
                d2 += (x[d] - inputs[k][d]) * (x[d] - inputs[k][d]);
            }
            order.push_back({d2, k});
        }
        std::sort(order.begin(), order.end());
        const LoadVector out = knn_predict(model, x);
        for (std::size_t i = 0; i < 3; ++i) {
            const double mean = (outputs[order[0].second][i] + outputs[order[1].second][i] +
                                 outputs[order[2].second][i]) /
                                3.0;
            CHECK(out[i] == doctest::Approx(mean).epsilon(1e-15));
        }
    }
}

TEST_CASE("knn_fit validates the neighbor count") {
    CHECK_THROWS_AS(knn_fit(make_set({{0.0}}, {{0.1}}), 2), std::invalid_argument);
    CHECK_THROWS_AS(knn_fit(make_set({{0.0}}, {{0.1}}), 0), std::invalid_argument);
}

TEST_CASE("baseline models round-trip through JSON with a type tag") {
    const KernelModel kernel = kernel_fit(make_set({{0.0}, {1.0}}, {{0.2}, {0.8}}));
    const nlohmann::json kj = kernel_model_to_json(kernel);
    CHECK(kj.at("type") == "kernel");
    const KernelModel kernel_back = kernel_model_from_json(kj);
    CHECK(kernel_back.bandwidth == kernel.bandwidth);
    CHECK(kernel_back.anchors == kernel.anchors);
    CHECK(kernel_back.values == kernel.values);

    const KnnModel knn = knn_fit(make_set({{0.0}, {1.0}, {2.0}}, {{0.2}, {0.8}, {0.5}}), 2);
    const nlohmann::json nj = knn_model_to_json(knn);
    CHECK(nj.at("type") == "knn");
    const KnnModel knn_back = knn_model_from_json(nj);
    CHECK(knn_back.k_neighbors == 2);
    CHECK(knn_back.anchors == knn.anchors);
    CHECK(knn_back.values == knn.values);

    CHECK_THROWS_AS(kernel_model_from_json(nj), std::invalid_argument);
}
