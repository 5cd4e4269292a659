#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cellload/errors.hpp"
#include "cellload/load_model.hpp"
#include "cellload/rng.hpp"
#include "cellload/scenario.hpp"
#include "support/test_oracles.hpp"

using namespace cellload;
using cellload::testing::feasible_rates_by_scaling;
using cellload::testing::single_cell_scenario;
using cellload::testing::symmetric_fixed_point_oracle;
using cellload::testing::symmetric_solvable_oracle;
using cellload::testing::symmetric_two_bs_scenario;

namespace {

NetworkScenario two_bs_one_tp() {
    NetworkScenario s;
    s.num_bs = 2;
    s.num_tp = 1;
    s.power = {1.0, 1.0};
    s.gain = Matrix(2, 1);
    s.gain(0, 0) = 1.0;
    s.gain(1, 0) = 0.5;
    s.assignment = {0};
    s.resources_hz = 1e6;
    s.noise_power_w = 0.25;
    s.validate();
    return s;
}

ScenarioParams default_params(std::uint64_t seed) {
    ScenarioParams p;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("sinr matches direct arithmetic") {
    const NetworkScenario s = two_bs_one_tp();
    CHECK(sinr(s, {0.0, 0.5}, 0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sinr(s, {0.7, 0.0}, 0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sinr(s, {0.0, 1.0}, 0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sinr rejects a zero-gain link") {
    NetworkScenario s = two_bs_one_tp();
    s.gain(1, 0) = 0.0;
    CHECK_THROWS_AS(sinr(s, {0.0, 0.5}, 1, 0), InvalidLinkError);
}

TEST_CASE("sinr is non-increasing in interfering load") {
    const NetworkScenario s = symmetric_two_bs_scenario();
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        LoadVector lo{rng.uniform(), rng.uniform()};
        LoadVector hi = lo;
        hi[1] += rng.uniform() * (1.0 - hi[1]);
        CHECK(sinr(s, hi, 0, 0) <= sinr(s, lo, 0, 0) + 1e-15);
    }
}

TEST_CASE("load_map single-cell closed form") {
    const NetworkScenario s = single_cell_scenario(15.0, 1e6);
    CHECK(load_map(s, {0.0}, {2e6})[0] == doctest::Approx(0.5).epsilon(1e-12));
    // Load is linear in rates for a fixed load argument.
    CHECK(load_map(s, {0.0}, {4e6})[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("load_map symmetric two-BS example") {
    const NetworkScenario s = symmetric_two_bs_scenario();
    const LoadVector out = load_map(s, {0.0, 0.0}, {1e6, 1e6});
    const double expected = 1.0 / std::log2(11.0);  // = 0.2890648... by direct evaluation
    CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("load_map is monotone in load and in rates") {
    const NetworkScenario s = generate_scenario(default_params(42));
    Rng rng(43);
    RateVector rates(s.num_tp);
    for (auto& r : rates) r = rng.uniform(1e6, 1e7);
    for (int rep = 0; rep < 30; ++rep) {
        LoadVector lo(s.num_bs);
        LoadVector hi(s.num_bs);
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            lo[i] = rng.uniform();
            hi[i] = lo[i] + rng.uniform() * (1.0 - lo[i]);
        }
        const LoadVector f_lo = load_map(s, lo, rates);
        const LoadVector f_hi = load_map(s, hi, rates);
        RateVector bigger = rates;
        for (auto& r : bigger) r *= 1.0 + rng.uniform();
        const LoadVector f_rates = load_map(s, lo, bigger);
        std::vector<bool> serves(s.num_bs, false);
        for (std::size_t j = 0; j < s.num_tp; ++j) serves[s.assignment[j]] = true;
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            CHECK(f_hi[i] >= f_lo[i] - 1e-15);
            CHECK(f_rates[i] >= f_lo[i] - 1e-15);
            if (serves[i]) CHECK(f_lo[i] > 0.0);
        }
    }
}

TEST_CASE("load_map is concave in the load argument") {
    const NetworkScenario s = generate_scenario(default_params(7));
    Rng rng(8);
    RateVector rates(s.num_tp);
    for (auto& r : rates) r = rng.uniform(1e6, 1e7);
    for (int rep = 0; rep < 30; ++rep) {
        LoadVector a(s.num_bs), b(s.num_bs), mix(s.num_bs);
        const double t = rng.uniform();
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            a[i] = rng.uniform();
            b[i] = rng.uniform();
            mix[i] = t * a[i] + (1.0 - t) * b[i];
        }
        const LoadVector fa = load_map(s, a, rates);
        const LoadVector fb = load_map(s, b, rates);
        const LoadVector fmix = load_map(s, mix, rates);
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            CHECK(fmix[i] >= t * fa[i] + (1.0 - t) * fb[i] - 1e-12);
        }
    }
}

TEST_CASE("fixed point of a constant single-cell mapping") {
    const NetworkScenario s = single_cell_scenario(15.0, 1e6);
    const FixedPointResult res = solve_fixed_point(s, {2e6});
    CHECK(res.converged);
    CHECK(res.feasible);
    CHECK(res.load[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.residual <= kDefaultTol);
}

TEST_CASE("symmetric fixed point matches the bisection oracle") {
    const NetworkScenario s = symmetric_two_bs_scenario();
    for (double rate : {5e5, 1e6, 1.5e6, 2e6}) {
        const double expected = symmetric_fixed_point_oracle(rate, 1e6, 0.1, 0.1);
        const FixedPointResult res = solve_fixed_point(s, {rate, rate});
        REQUIRE(res.converged);
        CHECK(std::fabs(res.load[0] - expected) <= 1e-8);
        CHECK(std::fabs(res.load[1] - expected) <= 1e-8);
    }
}

TEST_CASE("scaled-up symmetric demand is declared divergent") {
    const NetworkScenario s = symmetric_two_bs_scenario();
    CHECK_FALSE(symmetric_solvable_oracle(100e6, 1e6, 0.1, 0.1));
    const FixedPointResult res = solve_fixed_point(s, {100e6, 100e6});
    CHECK_FALSE(res.converged);
    CHECK_FALSE(res.feasible);
}

TEST_CASE("converged results satisfy the residual contract") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const NetworkScenario s = generate_scenario(default_params(100 + rep));
        const RateVector rates =
            feasible_rates_by_scaling(s, rng, 1e6, 1e7, rng.uniform(0.3, 0.95));
        const FixedPointResult res = solve_fixed_point(s, rates);
        REQUIRE(res.converged);
        const LoadVector mapped = load_map(s, res.load, rates);
        double resid = 0.0;
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            resid = std::max(resid, std::fabs(mapped[i] - res.load[i]));
        }
        CHECK(resid <= kDefaultTol);
        CHECK(resid == doctest::Approx(res.residual).epsilon(1e-9));
    }
}

TEST_CASE("fixed points are monotone in the rate demand") {
    Rng rng(19);
    for (int rep = 0; rep < 40; ++rep) {
        const NetworkScenario s = generate_scenario(default_params(200 + rep));
        RateVector r = feasible_rates_by_scaling(s, rng, 1e6, 1e7, rng.uniform(0.3, 0.8));
        RateVector r_hi = r;
        for (auto& x : r_hi) x *= 1.0 + 0.1 * rng.uniform();
        if (!is_feasible(s, r_hi).feasible) continue;
        const FixedPointResult lo = solve_fixed_point(s, r);
        const FixedPointResult hi = solve_fixed_point(s, r_hi);
        REQUIRE(lo.converged);
        REQUIRE(hi.converged);
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            CHECK(hi.load[i] >= lo.load[i] - 1e-9);
        }
    }
}

TEST_CASE("fixed-point iteration from zero is increasing") {
    const NetworkScenario s = symmetric_two_bs_scenario();
    LoadVector cur{0.0, 0.0};
    LoadVector prev = cur;
    for (int it = 0; it < 30; ++it) {
        cur = load_map(s, cur, {1.2e6, 1.2e6});
        CHECK(cur[0] >= prev[0]);
        CHECK(cur[1] >= prev[1]);
        prev = cur;
    }
}

TEST_CASE("conditional eigen solution of a constant mapping") {
    const NetworkScenario s = single_cell_scenario(15.0, 1e6);
    const EigenSolution eig = solve_conditional_eigen(s, {2e6});
    CHECK(eig.converged);
    CHECK(eig.eigvec[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig.eigval == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eigen pair satisfies the defining identity") {
    Rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const NetworkScenario s = generate_scenario(default_params(300 + rep));
        RateVector rates(s.num_tp);
        for (auto& r : rates) r = rng.uniform(1e6, 1e7);
        const EigenSolution eig = solve_conditional_eigen(s, rates);
        REQUIRE(eig.converged);
        CHECK(eig.eigval > 0.0);
        double norm = 0.0;
        for (double x : eig.eigvec) norm = std::max(norm, std::fabs(x));
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
        const LoadVector mapped = load_map(s, eig.eigvec, rates);
        for (std::size_t i = 0; i < s.num_bs; ++i) {
            CHECK(mapped[i] == doctest::Approx(eig.eigval * eig.eigvec[i]).epsilon(1e-7));
        }
    }
}

TEST_CASE("rescaled demand sits on the feasibility boundary") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const NetworkScenario s = generate_scenario(default_params(400 + rep));
        RateVector rates(s.num_tp);
        for (auto& r : rates) r = rng.uniform(1e6, 1e7);
        const EigenSolution eig = solve_conditional_eigen(s, rates);
        REQUIRE(eig.converged);
        RateVector rescaled = rates;
        for (auto& r : rescaled) r /= eig.eigval;
        const EigenSolution boundary = solve_conditional_eigen(s, rescaled);
        REQUIRE(boundary.converged);
        CHECK(std::fabs(boundary.eigval - 1.0) <= 10.0 * kDefaultTol);
    }
}

TEST_CASE("eigenvalue scales linearly with the demand") {
    const NetworkScenario s = generate_scenario(default_params(55));
    Rng rng(56);
    RateVector rates(s.num_tp);
    for (auto& r : rates) r = rng.uniform(1e6, 1e7);
    const double lambda = solve_conditional_eigen(s, rates).eigval;
    for (double scale : {0.25, 0.5, 2.0, 7.5}) {
        RateVector scaled = rates;
        for (auto& r : scaled) r *= scale;
        CHECK(solve_conditional_eigen(s, scaled).eigval ==
              doctest::Approx(scale * lambda).epsilon(1e-8));
    }
}

TEST_CASE("is_feasible on constant single-cell mappings") {
    const FeasibilityResult ok = is_feasible(single_cell_scenario(15.0, 1e6), {2e6});
    CHECK(ok.feasible);
    CHECK(ok.eigval == doctest::Approx(0.5).epsilon(1e-12));
    const FeasibilityResult bad = is_feasible(single_cell_scenario(15.0, 1e6), {4.8e6});
    CHECK_FALSE(bad.feasible);
    CHECK(bad.eigval == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("eigen verdict agrees with direct fixed-point solvability") {
    Rng rng(37);
    int feasible_seen = 0;
    int infeasible_seen = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const NetworkScenario s = generate_scenario(default_params(500 + rep));
        RateVector rates(s.num_tp);
        for (auto& r : rates) r = rng.uniform(1e6, 1e7);
        const double lambda = solve_conditional_eigen(s, rates).eigval;
        const double scale = rng.uniform(0.5, 2.0) / lambda;
        for (auto& r : rates) r *= scale;

        const FeasibilityResult verdict = is_feasible(s, rates);
        const FixedPointResult fp = solve_fixed_point(s, rates);
        const bool solvable = fp.converged && fp.feasible;
        CHECK(verdict.feasible == solvable);
        (verdict.feasible ? feasible_seen : infeasible_seen)++;
    }
    CHECK(feasible_seen > 20);
    CHECK(infeasible_seen > 20);
}

TEST_CASE("scenario JSON round trip is value-exact") {
    const NetworkScenario s = generate_scenario(default_params(77));
    const NetworkScenario back =
        scenario_from_json(nlohmann::json::parse(scenario_to_json(s).dump()));
    CHECK(back.num_bs == s.num_bs);
    CHECK(back.num_tp == s.num_tp);
    CHECK(back.power == s.power);
    CHECK(back.gain == s.gain);
    CHECK(back.assignment == s.assignment);
    CHECK(back.resources_hz == s.resources_hz);
    CHECK(back.noise_power_w == s.noise_power_w);
}

TEST_CASE("scenario validation rejects broken inputs") {
    NetworkScenario s = symmetric_two_bs_scenario();
    s.power[0] = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = symmetric_two_bs_scenario();
    s.gain(0, 0) = 0.0;  // serving link of tp 0
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = symmetric_two_bs_scenario();
    s.assignment = {0, 5};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = symmetric_two_bs_scenario();
    s.noise_power_w = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    CHECK_THROWS_AS(solve_fixed_point(symmetric_two_bs_scenario(), {1e6, -1e6}),
                    std::invalid_argument);
}
