#include "cellload/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cellload/errors.hpp"
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

// One pass over anchor pairs fills both directed cone distances and, if
// requested, the Euclidean distances (dist^2 = above + below).
void pairwise_matrices(const Matrix& anchors, Matrix* cone, Matrix* dist) {
    const std::size_t count = anchors.rows;
    const std::size_t n = anchors.cols;
    if (cone) *cone = Matrix(count, count);
    if (dist) *dist = Matrix(count, count);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t j = k + 1; j < count; ++j) {
            const auto cs = simd::cone_squares(anchors.row(k), anchors.row(j), n);
            if (cone) {
                (*cone)(k, j) = std::sqrt(cs.above);
                (*cone)(j, k) = std::sqrt(cs.below);
            }
            if (dist) {
                const double d = std::sqrt(cs.above + cs.below);
                (*dist)(k, j) = d;
                (*dist)(j, k) = d;
            }
        }
    }
}

std::vector<double> lipschitz_from(const Matrix& outputs, const Matrix& dist, double eps) {
    const std::size_t count = outputs.rows;
    const std::size_t m = outputs.cols;
    std::vector<double> lip(m, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t j = k + 1; j < count; ++j) {
            const double d = dist(k, j);
            if (!(d > 0.0)) {
                throw DuplicateAnchorError("anchors " + std::to_string(k) + " and " +
                                           std::to_string(j) + " coincide");
            }
            const double* yk = outputs.row(k);
            const double* yj = outputs.row(j);
            for (std::size_t i = 0; i < m; ++i) {
                const double slope = (std::fabs(yk[i] - yj[i]) - 2.0 * eps) / d;
                if (slope > lip[i]) lip[i] = slope;
            }
        }
    }
    return lip;
}

Matrix smoothed_from(const Matrix& outputs, const std::vector<double>& lipschitz,
                     const Matrix& cone) {
    const std::size_t count = outputs.rows;
    const std::size_t m = outputs.cols;
    Matrix smoothed(count, m);
    std::vector<double> column(count);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < count; ++k) column[k] = outputs(k, i);
        const std::vector<double> q = detail::smooth_values_lp(column, lipschitz[i], cone);
        for (std::size_t k = 0; k < count; ++k) {
            smoothed(k, i) = std::clamp(column[k] + q[k], 0.0, 1.0);
        }
    }
    return smoothed;
}

double compatibility_violation(const Matrix& values, const std::vector<double>& lipschitz,
                               const Matrix& cone) {
    const std::size_t count = values.rows;
    const std::size_t m = values.cols;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t j = 0; j < count; ++j) {
            if (j == k) continue;
            const double c = cone(k, j);
            for (std::size_t i = 0; i < m; ++i) {
                worst = std::max(worst, values(k, i) - values(j, i) - lipschitz[i] * c);
            }
        }
    }
    return worst;
}

void envelope_into(const LearnerModel& model, const RateVector& x, double* lower, double* upper) {
    const std::size_t m = model.num_bs();
    const std::size_t count = model.num_anchors();
    const std::size_t n = model.num_dims();
    if (x.size() != n) {
        throw std::invalid_argument("query dimension " + std::to_string(x.size()) +
                                    " does not match model dimension " + std::to_string(n));
    }
    std::fill(lower, lower + m, -std::numeric_limits<double>::infinity());
    std::fill(upper, upper + m, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < count; ++k) {
        const auto cs = simd::cone_squares(model.anchors.row(k), x.data(), n);
        const double d_low = std::sqrt(cs.above);  // ||(x^k - x)_+||
        const double d_up = std::sqrt(cs.below);   // ||(x - x^k)_+||
        const double* vals = model.values.row(k);
        for (std::size_t i = 0; i < m; ++i) {
            const double lo = vals[i] - model.lipschitz[i] * d_low;
            const double hi = vals[i] + model.lipschitz[i] * d_up;
            if (lo > lower[i]) lower[i] = lo;
            if (hi < upper[i]) upper[i] = hi;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        lower[i] = std::max(lower[i], 0.0);
        upper[i] = std::min(upper[i], 1.0);
    }
}

}  // namespace

void LearnerModel::validate() const {
    if (anchors.rows == 0) {
        throw std::invalid_argument("model has no anchors");
    }
    if (values.rows != anchors.rows) {
        throw std::invalid_argument("model anchors/values row counts differ");
    }
    if (lipschitz.size() != values.cols) {
        throw std::invalid_argument("model lipschitz length does not match value columns");
    }
    for (double l : lipschitz) {
        if (!(l >= 0.0)) {
            throw std::invalid_argument("model Lipschitz constants must be non-negative");
        }
    }
    if (!(noise_bound >= 0.0)) {
        throw std::invalid_argument("model noise bound must be non-negative");
    }
}

double LearnerModel::max_compatibility_violation() const {
    Matrix cone;
    pairwise_matrices(anchors, &cone, nullptr);
    return compatibility_violation(values, lipschitz, cone);
}

nlohmann::json model_to_json(const LearnerModel& model) {
    nlohmann::json doc;
    doc["lipschitz"] = model.lipschitz;
    doc["eps"] = model.noise_bound;
    nlohmann::json anchors = nlohmann::json::array();
    for (std::size_t k = 0; k < model.anchors.rows; ++k) {
        anchors.push_back(
            std::vector<double>(model.anchors.row(k), model.anchors.row(k) + model.anchors.cols));
    }
    doc["anchors"] = std::move(anchors);
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t k = 0; k < model.values.rows; ++k) {
        values.push_back(
            std::vector<double>(model.values.row(k), model.values.row(k) + model.values.cols));
    }
    doc["values"] = std::move(values);
    return doc;
}

LearnerModel model_from_json(const nlohmann::json& doc) {
    LearnerModel model;
    model.lipschitz = doc.at("lipschitz").get<std::vector<double>>();
    model.noise_bound = doc.at("eps").get<double>();
    const auto& anchors = doc.at("anchors");
    const auto& values = doc.at("values");
    if (!anchors.is_array() || anchors.empty() || !values.is_array() ||
        values.size() != anchors.size()) {
        throw std::invalid_argument("model anchors/values must be equal-length arrays");
    }
    const std::size_t count = anchors.size();
    const std::size_t n = anchors.at(0).size();
    const std::size_t m = values.at(0).size();
    model.anchors = Matrix(count, n);
    model.values = Matrix(count, m);
    for (std::size_t k = 0; k < count; ++k) {
        const auto arow = anchors.at(k).get<std::vector<double>>();
        const auto vrow = values.at(k).get<std::vector<double>>();
        if (arow.size() != n || vrow.size() != m) {
            throw std::invalid_argument("model row " + std::to_string(k) + " has wrong length");
        }
        std::copy(arow.begin(), arow.end(), model.anchors.row(k));
        std::copy(vrow.begin(), vrow.end(), model.values.row(k));
    }
    model.validate();
    return model;
}

double cone_distance(const RateVector& x, const RateVector& anchor) {
    if (x.size() != anchor.size()) {
        throw std::invalid_argument("cone_distance: dimension mismatch");
    }
    return std::sqrt(simd::cone_squares(x.data(), anchor.data(), x.size()).above);
}

std::vector<double> estimate_lipschitz(const TrainingSet& dataset, double eps) {
    if (dataset.size() < 2) {
        throw std::invalid_argument("Lipschitz estimation needs at least two samples");
    }
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("noise bound must be non-negative");
    }
    const Matrix anchors = anchors_matrix(dataset);
    Matrix dist;
    pairwise_matrices(anchors, nullptr, &dist);
    return lipschitz_from(dataset.outputs, dist, eps);
}

TrainingSet smooth_monotone(const TrainingSet& dataset, const std::vector<double>& lipschitz,
                            double eps) {
    if (dataset.size() == 0) {
        throw std::invalid_argument("cannot smooth an empty training set");
    }
    if (lipschitz.size() != dataset.outputs.cols) {
        throw std::invalid_argument("lipschitz length does not match observation columns");
    }
    const Matrix anchors = anchors_matrix(dataset);
    Matrix cone;
    pairwise_matrices(anchors, &cone, nullptr);

    TrainingSet smoothed = dataset;
    smoothed.outputs = smoothed_from(dataset.outputs, lipschitz, cone);
    smoothed.noise_bound = eps;
    smoothed.smoothed = true;

    const double violation = compatibility_violation(smoothed.outputs, lipschitz, cone);
    if (violation > kFeasibilityTol) {
        throw SolverError("monotone smoothing left a constraint violated by " +
                          std::to_string(violation));
    }
    return smoothed;
}

LearnerModel fit(const TrainingSet& dataset, double eps) {
    const Matrix anchors = anchors_matrix(dataset);
    Matrix cone;
    Matrix dist;
    pairwise_matrices(anchors, &cone, &dist);

    LearnerModel model;
    model.lipschitz = lipschitz_from(dataset.outputs, dist, eps);
    model.noise_bound = eps;
    model.anchors = std::move(anchors);
    model.values = smoothed_from(dataset.outputs, model.lipschitz, cone);

    const double violation = compatibility_violation(model.values, model.lipschitz, cone);
    if (violation > kFeasibilityTol) {
        throw SolverError("fit produced an incompatible model (violation " +
                          std::to_string(violation) + ")");
    }
    return model;
}

Envelope envelope(const LearnerModel& model, const RateVector& x) {
    Envelope env;
    env.lower.resize(model.num_bs());
    env.upper.resize(model.num_bs());
    envelope_into(model, x, env.lower.data(), env.upper.data());
    return env;
}

LoadVector predict(const LearnerModel& model, const RateVector& x) {
    const std::size_t m = model.num_bs();
    LoadVector lower(m);
    LoadVector upper(m);
    envelope_into(model, x, lower.data(), upper.data());
    LoadVector mid(m);
    for (std::size_t i = 0; i < m; ++i) mid[i] = 0.5 * (lower[i] + upper[i]);
    return mid;
}

}  // namespace cellload
