#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ehpc/errors.hpp"
#include "ehpc/threshold.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace ehpc;

namespace {

const RewardFunction kAwgn = RewardFunction::awgn();

// Frozen from independent scipy/mpmath runs (tools/oracles).
constexpr double kUniform2CStar = 1.3457507549227654;
constexpr double kExponential1CStar = 1.0888622086436393;
constexpr double kExponential1Lower = 0.8064659942363268;
constexpr double kExponential1Upper = 1.4410101703416291;
constexpr double kRayleighUnitLower = 0.9550645326013216;
constexpr double kAStar = 0.8752609633555;

std::vector<EnergyDistribution> families() {
    return {EnergyDistribution::bernoulli(0.0, 5.0, 0.5),
            EnergyDistribution::finite_discrete({{0.0, 0.2}, {1.0, 0.5}, {4.0, 0.3}}),
            EnergyDistribution::geometric(0.5),
            EnergyDistribution::poisson(2.0),
            EnergyDistribution::uniform(2.0),
            EnergyDistribution::exponential(1.0),
            EnergyDistribution::rayleigh(2.0 / std::numbers::pi)};
}

}  // namespace

TEST_CASE("c_star examples") {
    CHECK(c_star(EnergyDistribution::geometric(0.5), kAwgn) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c_star(EnergyDistribution::poisson(0.5), kAwgn) == doctest::Approx(std::expm1(0.5)).epsilon(1e-12));
    CHECK(c_star(EnergyDistribution::bernoulli(0.0, 5.0, 0.5), kAwgn) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c_star(EnergyDistribution::uniform(2.0), kAwgn) == doctest::Approx(kUniform2CStar).epsilon(1e-11));
}

TEST_CASE("discrete exact walk") {
    const auto two = EnergyDistribution::finite_discrete({{0.0, 0.5}, {5.0, 0.5}});
    CHECK(c_star_discrete_exact(two, kAwgn) == doctest::Approx(1.0).epsilon(1e-14));
    const auto skew = EnergyDistribution::finite_discrete({{0.0, 0.9}, {10.0, 0.1}});
    CHECK(c_star_discrete_exact(skew, kAwgn) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK_THROWS_AS(c_star_discrete_exact(EnergyDistribution::finite_discrete({{1.0, 1.0}}), kAwgn),
                    DegenerateThreshold);
    CHECK_THROWS_AS(c_star_discrete_exact(EnergyDistribution::uniform(1.0), kAwgn), DomainError);
    // Atom-landing threshold: Poisson(1) has c* = 1 exactly.
    CHECK(c_star_discrete_exact(EnergyDistribution::poisson(1.0), kAwgn) == 1.0);
    CHECK(c_star_discrete_exact(EnergyDistribution::bernoulli(0.0, 5.0, 0.9), kAwgn) == 5.0);
}

TEST_CASE("continuous root") {
    CHECK(c_star_continuous_awgn(EnergyDistribution::exponential(1.0)) ==
          doctest::Approx(kExponential1CStar).epsilon(1e-13));
    CHECK(c_star_continuous_awgn(EnergyDistribution::uniform(2.0)) == doctest::Approx(kUniform2CStar).epsilon(1e-13));
    const auto ray = EnergyDistribution::from_mean(Family::Rayleigh, 100.0);
    const double ratio = c_star_continuous_awgn(ray) / 100.0;
    CHECK(ratio >= 0.80);
    CHECK(ratio <= 0.95);
    CHECK_THROWS_AS(c_star_continuous_awgn(EnergyDistribution::poisson(1.0)), DomainError);
}

TEST_CASE("lower bound examples") {
    CHECK(bound_lower(EnergyDistribution::bernoulli(0.0, 5.0, 0.5), kAwgn) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bound_lower(EnergyDistribution::bernoulli(0.0, 5.0, 0.9), kAwgn) == 5.0);
    const double lo = bound_lower(EnergyDistribution::exponential(1.0), kAwgn);
    CHECK(lo == doctest::Approx(kExponential1Lower).epsilon(1e-12));
    CHECK(lo > 0.0);
    CHECK(lo <= kExponential1CStar);
    CHECK(bound_lower(EnergyDistribution::rayleigh(2.0 / std::numbers::pi), kAwgn) ==
          doctest::Approx(kRayleighUnitLower).epsilon(1e-12));
}

TEST_CASE("upper bound examples") {
    const auto b = bound_upper(EnergyDistribution::bernoulli(0.0, 5.0, 0.5), kAwgn);
    CHECK(b.value == doctest::Approx(11.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(b.unbounded_within_cap);
    CHECK(bound_upper(EnergyDistribution::bernoulli(0.0, 5.0, 0.9), kAwgn).value == 5.0);
    CHECK(bound_upper(EnergyDistribution::exponential(1.0), kAwgn).value ==
          doctest::Approx(kExponential1Upper).epsilon(1e-12));
    for (const auto& d : families()) {
        const double cs = c_star(d, kAwgn);
        const auto up = bound_upper(d, kAwgn);
        INFO(d.describe());
        CHECK(up.value >= cs - 1e-8);
        CHECK(up.value > d.mean());
    }
}

TEST_CASE("generic envelope path reproduces the closed AWGN predicates") {
    BoundOptions hull;
    hull.scan_points = 400;
    hull.envelope = EnvelopeMethod::Hull;
    BoundOptions closed;
    closed.scan_points = 400;
    for (const auto& d : {EnergyDistribution::bernoulli(0.0, 5.0, 0.5), EnergyDistribution::exponential(1.0),
                          EnergyDistribution::uniform(2.0)}) {
        INFO(d.describe());
        CHECK(std::abs(bound_lower(d, kAwgn, hull) - bound_lower(d, kAwgn, closed)) <= 1e-9);
        CHECK(std::abs(bound_upper(d, kAwgn, hull).value - bound_upper(d, kAwgn, closed).value) <= 1e-6);
    }
}

TEST_CASE("semi-universal bounds") {
    const auto a = semi_bounds_awgn(0.0, 5.0, 2.0);
    CHECK(a.lower == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto b = semi_bounds_awgn(0.0, INFINITY, 2.0);
    CHECK(b.upper == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(b.lower == 0.0);
    const auto c = semi_bounds_awgn(1.0, 5.0, 1.5);
    CHECK(c.upper == doctest::Approx((2.5 + std::sqrt(4.25)) / 2.0).epsilon(1e-15));
    CHECK(c.upper == doctest::Approx(2.28077640640441513745).epsilon(1e-14));
    CHECK_THROWS_AS(semi_bounds_awgn(2.0, 5.0, 1.0), DomainError);
    CHECK_THROWS_AS(semi_bounds_awgn(0.0, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(semi_bounds_awgn(-1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("bernoulli closed forms") {
    const auto ref = bernoulli_reference(0.0, 5.0, 0.5);
    CHECK(ref.c_star == 1.0);
    CHECK(ref.c_lower == 1.0);
    CHECK(ref.c_upper == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
    CHECK(ref.semi_lower == 1.0);
    CHECK(ref.semi_upper == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
    const auto high = bernoulli_reference(0.0, 5.0, 1.0 - 1e-9);
    CHECK(high.c_star == 5.0);
    CHECK(high.c_lower == 5.0);
    CHECK_THROWS_AS(bernoulli_reference(0.0, 5.0, 1.0), DomainError);

    const auto d = EnergyDistribution::bernoulli(0.0, 5.0, 0.5);
    CHECK(std::abs(c_star(d, kAwgn) - ref.c_star) <= 1e-8);
    CHECK(std::abs(bound_lower(d, kAwgn) - ref.c_lower) <= 1e-8);
    CHECK(std::abs(bound_upper(d, kAwgn).value - ref.c_upper) <= 1e-8);
    const auto s = semi_bounds_awgn(0.0, 5.0, 2.5);
    CHECK(std::abs(s.lower - ref.semi_lower) <= 1e-8);
    CHECK(std::abs(s.upper - ref.semi_upper) <= 1e-8);
}

TEST_CASE("rayleigh a*") {
    const double a = rayleigh_a_star();
    CHECK(std::abs(a - 0.875) <= 0.001);
    CHECK(a == doctest::Approx(kAStar).epsilon(1e-12));
    CHECK(rayleigh_a_functional(0.0) == 0.0);
    CHECK(rayleigh_a_functional(2.0) > 1.0);
    // Closed form through erf: int_0^a exp(-pi y^2/4) dy = erf(sqrt(pi) a / 2).
    const double erf_form = std::numbers::pi * a / 2.0 * std::erf(std::sqrt(std::numbers::pi) * a / 2.0);
    CHECK(erf_form == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("greedy and Jensen throughputs") {
    const auto d = EnergyDistribution::bernoulli(0.0, 5.0, 0.5);
    CHECK(greedy_throughput(d, kAwgn, 2.0) == doctest::Approx(0.25 * std::log(3.0)).epsilon(1e-15));
    CHECK(throughput_upper(d, kAwgn, 2.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(greedy_throughput(d, kAwgn, 1.0) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-15));
    for (const auto& f : families()) {
        CHECK(greedy_throughput(f, kAwgn, 0.0) == 0.0);
        CHECK(throughput_upper(f, kAwgn, 0.0) == 0.0);
        for (double c : {0.1, 0.5, 1.0, 3.0}) CHECK(greedy_throughput(f, kAwgn, c) <= throughput_upper(f, kAwgn, c));
    }
}

TEST_CASE("greedy is asymptotically optimal as c -> 0") {
    for (const auto& d : families()) {
        INFO(d.describe());
        CHECK(greedy_throughput(d, kAwgn, 1e-3) / throughput_upper(d, kAwgn, 1e-3) >= 0.99);
    }
}

TEST_CASE("degenerate rewards are rejected") {
    const auto lin = RewardFunction::linear(1.0);
    CHECK_THROWS_AS(c_star(EnergyDistribution::exponential(1.0), lin), DegenerateThreshold);
    CHECK_THROWS_AS(c_star(EnergyDistribution::bernoulli(0.0, 5.0, 1.0), kAwgn), DegenerateThreshold);
    CHECK_THROWS_AS(threshold_report(EnergyDistribution::poisson(1.0), lin), DegenerateThreshold);
}

TEST_CASE("predicate set is the interval [0, c*]") {
    std::mt19937_64 gen(17);
    for (const auto& d : families()) {
        const double cs = c_star(d, kAwgn);
        std::uniform_real_distribution<double> below(0.0, cs), above(cs, 2.0 * cs);
        int strictly_negative = 0;
        for (int i = 0; i < 200; ++i) {
            CHECK(threshold_gap(d, kAwgn, below(gen)) >= -1e-9);
            const double g = threshold_gap(d, kAwgn, std::nextafter(above(gen), INFINITY));
            CHECK(g < 1e-9);
            strictly_negative += g < 0.0;
        }
        CHECK(strictly_negative > 0);
    }
}

TEST_CASE("characterisations agree") {
    for (const auto& d : families()) {
        INFO(d.describe());
        const double generic = c_star(d, kAwgn);
        const double special = d.is_discrete() ? c_star_discrete_exact(d, kAwgn) : c_star_continuous_awgn(d);
        CHECK(std::abs(generic - special) <= 1e-8);
    }
    const auto tab = RewardFunction::tabulated({{0.0, 0.0, 1.0}, {1.0, 0.8, 0.6}, {2.0, 1.3, 0.4}, {4.0, 1.9, 0.2}});
    const auto d = EnergyDistribution::finite_discrete({{0.0, 0.3}, {1.5, 0.4}, {6.0, 0.3}});
    CHECK(std::abs(c_star(d, tab) - c_star_discrete_exact(d, tab)) <= 1e-8);
}

TEST_CASE("bound ordering on random instances") {
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BoundOptions opts;
    opts.scan_points = 20000;
    int checked = 0;
    for (int i = 0; i < 120; ++i) {
        EnergyDistribution d = EnergyDistribution::uniform(1.0);
        switch (i % 4) {
            case 0: d = EnergyDistribution::bernoulli(3.0 * u(gen), 3.5 + 6.0 * u(gen), 0.05 + 0.9 * u(gen)); break;
            case 1: {
                std::vector<Atom> atoms;
                double x = 2.0 * u(gen), left = 1.0;
                const int n = 2 + static_cast<int>(4 * u(gen));
                for (int k = 0; k < n; ++k) {
                    const double p = k + 1 == n ? left : left * (0.2 + 0.6 * u(gen));
                    atoms.push_back({x, p});
                    left -= p;
                    x += 0.2 + 3.0 * u(gen);
                }
                d = EnergyDistribution::finite_discrete(atoms);
                break;
            }
            case 2: d = EnergyDistribution::exponential(0.3 + 3.0 * u(gen)); break;
            default: d = EnergyDistribution::rayleigh(0.1 + 4.0 * u(gen)); break;
        }
        INFO(d.describe());
        const auto rep = threshold_report(d, kAwgn, opts);
        CHECK(rep.semi->lower <= rep.c_lower + 1e-8);
        CHECK(rep.c_lower <= rep.c_star + 1e-8);
        CHECK(rep.c_star <= rep.c_upper.value + 1e-8);
        CHECK(rep.c_upper.value <= rep.semi->upper + 1e-8);
        CHECK(d.mean() < rep.c_upper.value);
        ++checked;
    }
    CHECK(checked == 120);
}

TEST_CASE("tight bernoulli cases") {
    // (x_lo + p)/(1 - p) >= x_hi makes the upper bound tight.
    const auto tight_up = EnergyDistribution::bernoulli(1.0, 4.0, 0.8);
    CHECK(std::abs(bound_upper(tight_up, kAwgn).value - c_star(tight_up, kAwgn)) <= 1e-8);
    // ((2 - p) x_lo + 1)/(1 - p) <= x_hi makes the semi-universal lower bound tight.
    const auto tight_lo = EnergyDistribution::bernoulli(0.5, 9.0, 0.3);
    const auto s = semi_bounds_awgn(0.5, 9.0, tight_lo.mean());
    CHECK(std::abs(s.lower - c_star(tight_lo, kAwgn)) <= 1e-8);
}

TEST_CASE("threshold report") {
    const auto rep = threshold_report(EnergyDistribution::bernoulli(0.0, 5.0, 0.5), kAwgn);
    CHECK(rep.method == ThresholdMethod::DiscreteExact);
    CHECK(rep.c_star == doctest::Approx(1.0));
    CHECK(std::abs(rep.residual) <= 1e-12);
    CHECK(rep.scan_step_lower == doctest::Approx(5e-5));
    const auto cont = threshold_report(EnergyDistribution::exponential(1.0), kAwgn);
    CHECK(cont.method == ThresholdMethod::ContinuousRoot);
    CHECK(std::abs(cont.residual) <= 1e-9);
    CHECK(method_name(ThresholdMethod::Bisection) == "bisection");
}
