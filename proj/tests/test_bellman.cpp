#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ehpc/bellman.hpp"
#include "ehpc/errors.hpp"
#include "ehpc/threshold.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace ehpc;

namespace {

const RewardFunction kAwgn = RewardFunction::awgn();

std::vector<EnergyDistribution> families() {
    return {EnergyDistribution::bernoulli(0.0, 5.0, 0.5),
            EnergyDistribution::finite_discrete({{0.0, 0.2}, {1.0, 0.5}, {4.0, 0.3}}),
            EnergyDistribution::geometric(0.5),
            EnergyDistribution::poisson(2.0),
            EnergyDistribution::uniform(2.0),
            EnergyDistribution::exponential(1.0),
            EnergyDistribution::rayleigh(2.0 / std::numbers::pi)};
}

BellmanOptions grid(std::size_t n) {
    BellmanOptions o;
    o.grid_n = n;
    return o;
}

void check_invariants(const BellmanSolution& s, const EnergyDistribution& d, double c) {
    CHECK(s.h.front() == 0.0);
    CHECK(s.residual <= 1e-8);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        CHECK(s.policy[i] >= 0.0);
        CHECK(s.policy[i] <= s.grid[i]);
    }
    CHECK(s.gamma >= greedy_throughput(d, kAwgn, c) - 1e-6);
    CHECK(s.gamma <= throughput_upper(d, kAwgn, c) + 1e-6);
}

}  // namespace

TEST_CASE("below the threshold the solver returns the greedy throughput") {
    const auto d = EnergyDistribution::bernoulli(0.0, 5.0, 0.5);
    const auto s = solve(d, kAwgn, 0.5);
    CHECK(std::abs(s.gamma - 0.25 * std::log(1.5)) <= 1e-4);
    for (std::size_t i = 0; i < s.grid.size(); ++i) CHECK(s.policy[i] == s.grid[i]);
    check_invariants(s, d, 0.5);
}

TEST_CASE("above the threshold the solver beats greedy") {
    const auto d = EnergyDistribution::bernoulli(0.0, 5.0, 0.5);
    const auto s = solve(d, kAwgn, 2.0);
    CHECK(s.gamma > 0.25 * std::log(3.0) + 1e-3);
    CHECK(s.gamma < 0.5 * std::log(2.0));
    check_invariants(s, d, 2.0);
}

TEST_CASE("grid refinement is stable") {
    for (const auto& d : families()) {
        const double c = 1.5 * c_star(d, kAwgn);
        INFO(d.describe());
        CHECK(std::abs(solve(d, kAwgn, c, grid(64)).gamma - solve(d, kAwgn, c, grid(1024)).gamma) <= 5e-3);
    }
}

TEST_CASE("greedy optimality up to c* for every family") {
    for (const auto& d : families()) {
        const double cs = c_star(d, kAwgn);
        for (int k = 1; k <= 10; ++k) {
            const double c = cs * k / 10.0;
            const auto s = solve(d, kAwgn, c);
            const double gl = greedy_throughput(d, kAwgn, c);
            INFO(d.describe() << " c=" << c);
            CHECK(std::abs(s.gamma - gl) <= 1e-4 * gl);
            for (std::size_t i = 0; i < s.grid.size(); ++i) CHECK(s.policy[i] >= s.grid[i] - s.step());
            check_invariants(s, d, c);
        }
    }
}

TEST_CASE("greedy is strictly suboptimal at twice the threshold") {
    for (const auto& d : families()) {
        const double c = 2.0 * c_star(d, kAwgn);
        const auto s = solve(d, kAwgn, c);
        INFO(d.describe());
        CHECK(s.gamma > greedy_throughput(d, kAwgn, c) + 1e-3);
        check_invariants(s, d, c);
    }
}

TEST_CASE("solution satisfies the Bellman equation off the solver grid") {
    for (const auto& d : {EnergyDistribution::bernoulli(0.0, 5.0, 0.5), EnergyDistribution::exponential(1.0),
                          EnergyDistribution::poisson(2.0), EnergyDistribution::uniform(2.0)}) {
        const double c = 1.7 * c_star(d, kAwgn);
        const auto s = solve(d, kAwgn, c, grid(1024));
        std::vector<double> pts;
        for (int i = 0; i < 60; ++i) pts.push_back(c * (i + 0.5) / 60.0);
        INFO(d.describe());
        CHECK(bellman_residual(s, d, kAwgn, pts) <= 1e-6);
    }
}

TEST_CASE("saved energy interpolation stays admissible") {
    const auto d = EnergyDistribution::exponential(1.0);
    const auto s = solve(d, kAwgn, 2.5);
    for (int i = 0; i <= 5000; ++i) {
        const double b = 2.5 * i / 5000.0;
        const double kept = s.saved(b);
        CHECK(kept >= 0.0);
        CHECK(kept <= b);
    }
}

TEST_CASE("solver argument validation") {
    const auto d = EnergyDistribution::exponential(1.0);
    CHECK_THROWS_AS(solve(d, kAwgn, 0.0), DomainError);
    CHECK_THROWS_AS(solve(d, kAwgn, -1.0), DomainError);
    CHECK_THROWS_AS(solve(d, kAwgn, 1.0, grid(63)), DomainError);
    BellmanOptions bad;
    bad.relaxation = 0.0;
    CHECK_THROWS_AS(solve(d, kAwgn, 1.0, bad), DomainError);
    BellmanOptions short_run;
    short_run.max_sweeps = 1;
    CHECK_THROWS_AS(solve(d, kAwgn, 3.0, short_run), ConvergenceError);
    BellmanOptions damped;
    damped.relaxation = 0.7;
    const auto s = solve(d, kAwgn, 3.0, damped);
    CHECK(std::abs(s.gamma - solve(d, kAwgn, 3.0).gamma) <= 1e-7);
}

TEST_CASE("phi semi-derivative examples") {
    const auto u = EnergyDistribution::uniform(2.0);
    for (double b : {0.3, 0.8, 1.2}) {
        const auto sd = phi_semi_derivatives(u, kAwgn, 1.3, b, 0.5 * b);
        REQUIRE(sd.left.has_value());
        REQUIRE(sd.right.has_value());
        CHECK(*sd.right - *sd.left == 0.0);
    }
    const auto bern = EnergyDistribution::bernoulli(0.0, 5.0, 0.5);
    const auto at = phi_semi_derivatives(bern, kAwgn, 1.0, 1.0, 1.0);
    REQUIRE(at.left.has_value());
    CHECK_FALSE(at.right.has_value());
    CHECK(std::abs(*at.left) <= 1e-15);
    const auto zero = phi_semi_derivatives(bern, kAwgn, 1.0, 1.0, 0.0);
    CHECK_FALSE(zero.left.has_value());
    CHECK(zero.right.has_value());
    CHECK_THROWS_AS(phi_semi_derivatives(bern, kAwgn, 1.0, 0.5, 0.7), DomainError);
    CHECK_THROWS_AS(phi_value(bern, kAwgn, 1.0, 1.5, 0.7), DomainError);
}

TEST_CASE("atom correction uses the argument c - b + g") {
    // Atom at 1: with c = 1.5, b = 1, g = 0.5 the event X = c - b + g = 1 carries mass 0.4.
    const auto d = EnergyDistribution::finite_discrete({{0.0, 0.6}, {1.0, 0.4}});
    const auto sd = phi_semi_derivatives(d, kAwgn, 1.5, 1.0, 0.5);
    CHECK(*sd.left - *sd.right == doctest::Approx(0.4 * kAwgn.derivative(1.5)).epsilon(1e-15));
    // Right derivative matches a one-sided finite difference of phi.
    const double eps = 1e-7;
    const double fd = (phi_value(d, kAwgn, 1.5, 1.0, 0.5 + eps) - phi_value(d, kAwgn, 1.5, 1.0, 0.5)) / eps;
    CHECK(fd == doctest::Approx(*sd.right).epsilon(1e-5));
    const double fd_left = (phi_value(d, kAwgn, 1.5, 1.0, 0.5) - phi_value(d, kAwgn, 1.5, 1.0, 0.5 - eps)) / eps;
    CHECK(fd_left == doctest::Approx(*sd.left).epsilon(1e-5));
}

TEST_CASE("left semi-derivative is nonnegative below the threshold") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& d : families()) {
        const double c = c_star(d, kAwgn);
        for (int i = 0; i < 500; ++i) {
            const double b = c * u(gen);
            const double g = b * (1.0 - u(gen));
            if (!(g > 0.0)) continue;
            CHECK(*phi_semi_derivatives(d, kAwgn, c, b, g).left >= -1e-9);
        }
    }
}

TEST_CASE("phi is nondecreasing in g below the threshold") {
    for (const auto& d : families()) {
        const double c = 0.9 * c_star(d, kAwgn);
        for (int ib = 1; ib <= 50; ++ib) {
            const double b = ib == 50 ? c : c * ib / 50.0;
            double prev = -INFINITY;
            for (int ig = 0; ig < 200; ++ig) {
                const double g = ig == 199 ? b : b * ig / 199.0;
                const double v = phi_value(d, kAwgn, c, b, g);
                CHECK(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
