#include "cellload/load_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cellload/errors.hpp"
#include "cellload/simd.hpp"

namespace cellload {

namespace {

void check_sizes(const NetworkScenario& s, const LoadVector* load, const RateVector* rates) {
    if (load && load->size() != s.num_bs) {
        throw std::invalid_argument("load vector length " + std::to_string(load->size()) +
                                    " does not match num_bs " + std::to_string(s.num_bs));
    }
    if (rates && rates->size() != s.num_tp) {
        throw std::invalid_argument("rate vector length " + std::to_string(rates->size()) +
                                    " does not match num_tp " + std::to_string(s.num_tp));
    }
}

void check_rates_positive(const RateVector& rates) {
    for (std::size_t j = 0; j < rates.size(); ++j) {
        if (!(rates[j] > 0.0)) {
            throw std::invalid_argument("rate demand must be strictly positive (tp " +
                                        std::to_string(j) + ")");
        }
    }
}

double sup_norm(const LoadVector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// Total received interference-weighted power per TP: t[j] = sum_k p_k G_kj rho_k.
void accumulate_received(const NetworkScenario& s, const LoadVector& load,
                         std::vector<double>& total) {
    std::fill(total.begin(), total.end(), 0.0);
    for (std::size_t k = 0; k < s.num_bs; ++k) {
        const double w = s.power[k] * load[k];
        if (w != 0.0) {
            simd::axpy(s.num_tp, w, s.gain.row(k), total.data());
        }
    }
}

// Core of the load mapping with preallocated scratch; `out` may alias nothing.
void load_map_into(const NetworkScenario& s, const LoadVector& load, const RateVector& rates,
                   std::vector<double>& received_scratch, LoadVector& out) {
    accumulate_received(s, load, received_scratch);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < s.num_tp; ++j) {
        const std::size_t i = s.assignment[j];
        const double own = s.power[i] * s.gain(i, j);
        double interference = received_scratch[j] - own * load[i];
        if (interference < 0.0) interference = 0.0;  // cancellation guard
        const double snr = own / (interference + s.noise_power_w);
        out[i] += rates[j] / std::log2(1.0 + snr);
    }
    for (double& x : out) x /= s.resources_hz;
}

}  // namespace

void NetworkScenario::validate() const {
    if (num_bs == 0 || num_tp == 0) {
        throw std::invalid_argument("scenario needs at least one BS and one TP");
    }
    if (power.size() != num_bs) {
        throw std::invalid_argument("power vector length does not match num_bs");
    }
    if (gain.rows != num_bs || gain.cols != num_tp) {
        throw std::invalid_argument("gain matrix shape does not match (num_bs, num_tp)");
    }
    if (assignment.size() != num_tp) {
        throw std::invalid_argument("assignment length does not match num_tp");
    }
    for (std::size_t i = 0; i < num_bs; ++i) {
        if (!(power[i] > 0.0)) {
            throw std::invalid_argument("BS power must be strictly positive (bs " +
                                        std::to_string(i) + ")");
        }
    }
    for (double g : gain.data) {
        if (!(g >= 0.0)) {
            throw std::invalid_argument("channel gains must be non-negative");
        }
    }
    for (std::size_t j = 0; j < num_tp; ++j) {
        if (assignment[j] >= num_bs) {
            throw std::invalid_argument("assignment of tp " + std::to_string(j) +
                                        " is out of range");
        }
        if (!(gain(assignment[j], j) > 0.0)) {
            throw std::invalid_argument("serving gain of tp " + std::to_string(j) +
                                        " must be strictly positive");
        }
    }
    if (!(resources_hz > 0.0)) {
        throw std::invalid_argument("resources_hz must be strictly positive");
    }
    if (!(noise_power_w > 0.0)) {
        throw std::invalid_argument("noise_power_w must be strictly positive");
    }
}

nlohmann::json scenario_to_json(const NetworkScenario& s) {
    nlohmann::json doc;
    doc["num_bs"] = s.num_bs;
    doc["num_tp"] = s.num_tp;
    doc["power"] = s.power;
    nlohmann::json gain = nlohmann::json::array();
    for (std::size_t i = 0; i < s.num_bs; ++i) {
        gain.push_back(std::vector<double>(s.gain.row(i), s.gain.row(i) + s.num_tp));
    }
    doc["gain"] = std::move(gain);
    doc["assignment"] = s.assignment;
    doc["resources_hz"] = s.resources_hz;
    doc["noise_power_w"] = s.noise_power_w;
    return doc;
}

NetworkScenario scenario_from_json(const nlohmann::json& doc) {
    NetworkScenario s;
    s.num_bs = doc.at("num_bs").get<std::size_t>();
    s.num_tp = doc.at("num_tp").get<std::size_t>();
    s.power = doc.at("power").get<std::vector<double>>();
    const auto& gain = doc.at("gain");
    if (!gain.is_array() || gain.size() != s.num_bs) {
        throw std::invalid_argument("scenario gain must be an array with one row per BS");
    }
    s.gain = Matrix(s.num_bs, s.num_tp);
    for (std::size_t i = 0; i < s.num_bs; ++i) {
        const auto row = gain.at(i).get<std::vector<double>>();
        if (row.size() != s.num_tp) {
            throw std::invalid_argument("scenario gain row " + std::to_string(i) +
                                        " has wrong length");
        }
        std::copy(row.begin(), row.end(), s.gain.row(i));
    }
    s.assignment = doc.at("assignment").get<std::vector<std::size_t>>();
    s.resources_hz = doc.at("resources_hz").get<double>();
    s.noise_power_w = doc.at("noise_power_w").get<double>();
    s.validate();
    return s;
}

double sinr(const NetworkScenario& s, const LoadVector& load, std::size_t bs, std::size_t tp) {
    check_sizes(s, &load, nullptr);
    if (bs >= s.num_bs || tp >= s.num_tp) {
        throw std::invalid_argument("sinr: BS or TP index out of range");
    }
    const double own_gain = s.gain(bs, tp);
    if (!(own_gain > 0.0)) {
        throw InvalidLinkError("no link between bs " + std::to_string(bs) + " and tp " +
                               std::to_string(tp) + " (zero gain)");
    }
    double interference = 0.0;
    for (std::size_t k = 0; k < s.num_bs; ++k) {
        if (k != bs) interference += s.power[k] * s.gain(k, tp) * load[k];
    }
    return s.power[bs] * own_gain / (interference + s.noise_power_w);
}

LoadVector load_map(const NetworkScenario& s, const LoadVector& load, const RateVector& rates) {
    check_sizes(s, &load, &rates);
    check_rates_positive(rates);
    std::vector<double> received(s.num_tp);
    LoadVector out(s.num_bs);
    load_map_into(s, load, rates, received, out);
    return out;
}

FixedPointResult solve_fixed_point(const NetworkScenario& s, const RateVector& rates, double tol,
                                   std::size_t max_iter) {
    check_sizes(s, nullptr, &rates);
    check_rates_positive(rates);
    if (!(tol > 0.0) || max_iter == 0) {
        throw std::invalid_argument("solve_fixed_point: tol must be > 0 and max_iter >= 1");
    }

    std::vector<double> received(s.num_tp);
    LoadVector cur(s.num_bs, 0.0);
    LoadVector nxt(s.num_bs, 0.0);

    FixedPointResult result;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        load_map_into(s, cur, rates, received, nxt);
        const double residual = simd::sup_abs_diff(nxt.data(), cur.data(), s.num_bs);
        result.iterations = it;
        result.residual = residual;
        if (residual <= tol) {
            // `cur` is the point whose residual we just measured.
            result.load = cur;
            result.converged = true;
            result.feasible =
                std::all_of(cur.begin(), cur.end(), [](double x) { return x <= 1.0 + kFeasibilityTol; });
            return result;
        }
        cur.swap(nxt);
        if (sup_norm(cur) > kDivergenceCeiling) {
            result.load = cur;
            result.converged = false;
            result.feasible = false;
            return result;
        }
    }
    result.load = cur;
    result.converged = false;
    result.feasible = false;
    return result;
}

EigenSolution solve_conditional_eigen(const NetworkScenario& s, const RateVector& rates,
                                      double tol, std::size_t max_iter) {
    check_sizes(s, nullptr, &rates);
    check_rates_positive(rates);
    if (!(tol > 0.0) || max_iter == 0) {
        throw std::invalid_argument("solve_conditional_eigen: tol must be > 0 and max_iter >= 1");
    }

    std::vector<double> received(s.num_tp);
    LoadVector cur(s.num_bs, 1.0);
    LoadVector mapped(s.num_bs, 0.0);

    EigenSolution solution;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        load_map_into(s, cur, rates, received, mapped);
        const double lambda = sup_norm(mapped);
        for (std::size_t i = 0; i < s.num_bs; ++i) mapped[i] /= lambda;
        const double change = simd::sup_abs_diff(mapped.data(), cur.data(), s.num_bs);
        cur.swap(mapped);
        solution.iterations = it;
        solution.eigval = lambda;
        if (change <= tol) {
            // Polish the eigenvalue at the converged direction.
            load_map_into(s, cur, rates, received, mapped);
            solution.eigval = sup_norm(mapped);
            solution.eigvec = cur;
            solution.converged = true;
            return solution;
        }
    }
    solution.eigvec = cur;
    solution.converged = false;
    return solution;
}

FeasibilityResult is_feasible(const NetworkScenario& s, const RateVector& rates, double feas_tol) {
    const EigenSolution eig = solve_conditional_eigen(s, rates);
    if (!eig.converged) {
        throw SolverError("feasibility indeterminate: eigensolver did not converge within " +
                          std::to_string(kDefaultMaxIter) + " iterations");
    }
    return {eig.eigval <= 1.0 + feas_tol, eig.eigval};
}

}  // namespace cellload
