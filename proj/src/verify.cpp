#include "ehpc/verify.hpp"

#include "ehpc/analysis.hpp"
#include "ehpc/bellman.hpp"
#include "ehpc/cli.hpp"
#include "ehpc/errors.hpp"
#include "ehpc/rng.hpp"
#include "ehpc/sim.hpp"
#include "ehpc/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>

namespace ehpc {

namespace {

const RewardFunction kAwgn = RewardFunction::awgn();

std::string printf_string(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<EnergyDistribution> builtin_families() {
    return {EnergyDistribution::geometric(0.5), EnergyDistribution::poisson(1.0), EnergyDistribution::uniform(2.0),
            EnergyDistribution::exponential(1.0), EnergyDistribution::rayleigh(2.0 / std::numbers::pi)};
}

EnergyDistribution random_finite(Rng& rng) {
    std::vector<Atom> atoms;
    const int n = 2 + static_cast<int>(5 * rng.uniform());
    double x = between(rng, 0.0, 2.0), left = 1.0;
    for (int k = 0; k < n; ++k) {
        const double p = k + 1 == n ? left : left * between(rng, 0.2, 0.8);
        atoms.push_back({x, p});
        left -= p;
        x += between(rng, 0.2, 3.0);
    }
    return EnergyDistribution::finite_discrete(std::move(atoms));
}

EnergyDistribution random_discrete(Rng& rng, int kind) {
    switch (kind % 4) {
        case 0: {
            const double lo = between(rng, 0.0, 3.0);
            return EnergyDistribution::bernoulli(lo, lo + between(rng, 0.1, 8.0), between(rng, 0.02, 0.98));
        }
        case 1: return random_finite(rng);
        case 2: return EnergyDistribution::geometric(between(rng, 0.05, 0.95));
        default: return EnergyDistribution::poisson(between(rng, 0.05, 20.0));
    }
}

EnergyDistribution random_continuous(Rng& rng, int kind) {
    switch (kind % 3) {
        case 0: return EnergyDistribution::uniform(between(rng, 0.1, 10.0));
        case 1: return EnergyDistribution::exponential(between(rng, 0.1, 10.0));
        default: return EnergyDistribution::rayleigh(between(rng, 0.1, 10.0));
    }
}

// Keeps the largest error seen and the instance that produced it.
struct WorstCase {
    double error = 0.0;
    std::string where;
    std::mutex m;

    void update(double e, const std::string& what) {
        std::lock_guard<std::mutex> lock(m);
        if (!(e <= error)) {
            error = e;
            where = what;
        }
    }
};

CriterionResult closed_form_oracle(const VerifyOptions& o) {
    CriterionResult res{1, "closed-form Bernoulli oracle", false, "", 0.0};
    Rng rng(o.seed, 1);
    double worst = 0.0;
    std::string where;
    for (int i = 0; i < 500; ++i) {
        const double lo = between(rng, 0.0, 3.0);
        const double hi = lo + between(rng, 0.1, 8.0);
        const double p = between(rng, 0.02, 0.98);
        const auto d = EnergyDistribution::bernoulli(lo, hi, p);
        const auto ref = bernoulli_reference(lo, hi, p);
        const auto semi = semi_bounds_awgn(lo, hi, d.mean());
        const double e = std::max({std::abs(c_star(d, kAwgn) - ref.c_star),
                                   std::abs(bound_lower(d, kAwgn) - ref.c_lower),
                                   std::abs(bound_upper(d, kAwgn).value - ref.c_upper),
                                   std::abs(semi.lower - ref.semi_lower), std::abs(semi.upper - ref.semi_upper)});
        if (!(e <= worst)) {
            worst = e;
            where = d.describe();
        }
    }
    res.pass = worst <= 1e-8;
    res.detail = printf_string("500 triples, max |error| %.3g at %s", worst, where.c_str());
    return res;
}

CriterionResult characterisation_consistency(const VerifyOptions& o) {
    CriterionResult res{2, "discrete/continuous characterisations agree", false, "", 0.0};
    Rng rng(o.seed, 2);
    std::vector<EnergyDistribution> laws;
    for (int i = 0; i < 100; ++i) laws.push_back(random_discrete(rng, i));
    for (int i = 0; i < 100; ++i) laws.push_back(random_continuous(rng, i));
    WorstCase worst;
    parallel_for(laws.size(), o.threads, [&](std::size_t i) {
        const auto& d = laws[i];
        const double special = d.is_discrete() ? c_star_discrete_exact(d, kAwgn) : c_star_continuous_awgn(d);
        worst.update(std::abs(c_star(d, kAwgn) - special), d.describe());
    });
    res.pass = worst.error <= 1e-8;
    res.detail = printf_string("100 discrete + 100 continuous, max |difference| %.3g at %s", worst.error,
                               worst.where.c_str());
    return res;
}

CriterionResult exact_values(const VerifyOptions&) {
    CriterionResult res{3, "exact threshold values", true, "", 0.0};
    double geo = 0.0, poi = 0.0;
    for (double mu : {0.1, 0.5, 1.0}) {
        geo = std::max(geo, std::abs(c_star(EnergyDistribution::from_mean(Family::Geometric, mu), kAwgn) - mu));
    }
    for (double mu : {0.2, 0.5, std::numbers::ln2}) {
        poi = std::max(poi, std::abs(c_star(EnergyDistribution::poisson(mu), kAwgn) - std::expm1(mu)));
    }
    const double a = rayleigh_a_star();
    res.pass = geo <= 1e-9 && poi <= 1e-8 && std::abs(a - 0.875) <= 0.001;
    res.detail = printf_string("geometric |c*-mu| %.3g, Poisson |c*-(e^mu-1)| %.3g, a* = %.10f", geo, poi, a);
    return res;
}

CriterionResult greedy_below_threshold(const VerifyOptions& o) {
    CriterionResult res{4, "solver equals greedy for c <= c*", false, "", 0.0};
    const auto laws = builtin_families();
    const std::vector<double> fractions{0.2, 0.4, 0.6, 0.8, 1.0};
    WorstCase rel;
    std::atomic<int> non_greedy{0};
    parallel_for(laws.size() * fractions.size(), o.threads, [&](std::size_t k) {
        const auto& d = laws[k / fractions.size()];
        const double c = fractions[k % fractions.size()] * c_star(d, kAwgn);
        const BellmanSolution s = solve(d, kAwgn, c);
        const double greedy = greedy_throughput(d, kAwgn, c);
        rel.update(std::abs(s.gamma - greedy) / greedy, d.describe() + printf_string(" c=%.6g", c));
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            if (s.policy[i] < s.grid[i] - s.step()) ++non_greedy;
        }
    });
    res.pass = rel.error <= 1e-4 && non_greedy == 0;
    res.detail = printf_string("25 solves at grid 512, max relative gap %.3g (%s), %d non-greedy states", rel.error,
                               rel.where.c_str(), non_greedy.load());
    return res;
}

CriterionResult greedy_above_threshold(const VerifyOptions& o) {
    CriterionResult res{5, "greedy suboptimal at 2c*", true, "", 0.0};
    std::string detail;
    for (const auto& d : {EnergyDistribution::bernoulli(0.0, 5.0, 0.5), EnergyDistribution::exponential(1.0)}) {
        const double c = 2.0 * c_star(d, kAwgn);
        const double gap = solve(d, kAwgn, c).gamma - greedy_throughput(d, kAwgn, c);
        const double eps = best_modified_epsilon(d, kAwgn, c);
        const auto cmp = compare_policies(Policy::modified_greedy(eps), Policy::greedy(), d, kAwgn, c, 1000000,
                                          o.seed, 20, o.threads);
        const bool ok = gap > 1e-3 && cmp.mean_difference - cmp.ci_halfwidth_95 > 0.0;
        res.pass = res.pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += printf_string("%s: solver gap %.4g, eps %.2f gain %.4g +- %.2g", d.describe().c_str(), gap, eps,
                                cmp.mean_difference, cmp.ci_halfwidth_95);
    }
    res.detail = detail;
    return res;
}

CriterionResult bound_ordering(const VerifyOptions& o) {
    CriterionResult res{6, "bound ordering", false, "", 0.0};
    Rng rng(o.seed, 6);
    std::vector<EnergyDistribution> laws;
    for (int i = 0; i < 1000; ++i) {
        laws.push_back(i % 7 < 4 ? random_discrete(rng, i % 7) : random_continuous(rng, i % 7 - 4));
    }
    std::atomic<int> violations{0}, skipped{0};
    WorstCase worst;
    parallel_for(laws.size(), o.threads, [&](std::size_t i) {
        const auto& d = laws[i];
        const ThresholdReport rep = threshold_report(d, kAwgn);
        if (rep.c_upper.unbounded_within_cap) {
            ++skipped;
            return;
        }
        const double slack = 1e-8;
        const double v = std::max({rep.semi->lower - rep.c_lower, rep.c_lower - rep.c_star,
                                   rep.c_star - rep.c_upper.value, rep.c_upper.value - rep.semi->upper,
                                   d.mean() - rep.c_upper.value});
        worst.update(v, d.describe());
        if (v > slack || d.mean() >= rep.c_upper.value) ++violations;
    });
    res.pass = violations == 0 && skipped < 1000;
    res.detail = printf_string("%d instances checked, %d skipped (upper bound beyond cap), %d violations, worst "
                               "excess %.3g",
                               1000 - skipped.load(), skipped.load(), violations.load(), worst.error);
    return res;
}

CriterionResult phi_monotonicity(const VerifyOptions& o) {
    CriterionResult res{7, "phi monotone below c*, not above", true, "", 0.0};
    std::string failures;
    double worst_increment = INFINITY, largest_negative = -INFINITY;
    for (const auto& d : builtin_families()) {
        const double cs = c_star(d, kAwgn);
        const PhiCheck below = phi_check(d, kAwgn, 0.9 * cs, 50, 200, o.threads);
        const PhiCheck above = phi_check(d, kAwgn, 1.5 * cs, 50, 200, o.threads);
        worst_increment = std::min(worst_increment, below.worst_increment);
        largest_negative = std::max(largest_negative, above.min_left_derivative);
        if (!below.nondecreasing) failures += " " + d.describe() + " decreases at 0.9c*;";
        if (!(above.min_left_derivative < -1e-9)) failures += " " + d.describe() + " no negative slope at 1.5c*;";
    }
    res.pass = failures.empty();
    res.detail = printf_string("worst increment at 0.9c* %.3g, least negative minimum slope at 1.5c* %.3g",
                               worst_increment, largest_negative);
    if (!failures.empty()) res.detail += ";" + failures;
    return res;
}

struct SweepCase {
    Family family;
    Regime regime;
    std::vector<double> mu;
    double bound;
};

CriterionResult asymptotic_trends(const VerifyOptions& o) {
    CriterionResult res{8, "asymptotic ratio trends", true, "", 0.0};
    // Log-factor laws converge like 1/log mu, hence the far decades.
    const std::vector<SweepCase> cases{
        {Family::Geometric, Regime::Small, {1e-2, 1e-3, 1e-4}, 0.05},
        {Family::Poisson, Regime::Small, {1e-2, 1e-3, 1e-4}, 0.05},
        {Family::Uniform, Regime::Small, {1e-2, 1e-3, 1e-4}, 0.05},
        {Family::Exponential, Regime::Small, {1e-40, 1e-41, 1e-42}, 0.05},
        {Family::Rayleigh, Regime::Small, {1e-10, 1e-11, 1e-12}, 0.05},
        {Family::Geometric, Regime::Large, {1e7, 1e8, 1e9}, 0.15},
        {Family::Poisson, Regime::Large, {1e4, 1e5, 1e6}, 0.05},
        {Family::Uniform, Regime::Large, {1e6, 1e7, 1e8}, 0.15},
        {Family::Exponential, Regime::Large, {1e10, 1e11, 1e12}, 0.15},
        {Family::Rayleigh, Regime::Large, {1e2, 1e3, 1e4}, 0.05},
    };
    std::string detail;
    for (const auto& sc : cases) {
        auto mu = sc.mu;
        std::sort(mu.begin(), mu.end());
        auto rows = asymptotic_sweep(sc.family, sc.regime, mu, o.threads);
        // Walk away from the regime's limit: decreasing mu for small, increasing for large.
        if (sc.regime == Regime::Small) std::reverse(rows.begin(), rows.end());
        bool ok = true;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double prev = std::abs(rows[i - 1].ratio - 1.0), cur = std::abs(rows[i].ratio - 1.0);
            const bool both_exact = prev <= 1e-9 && cur <= 1e-9;
            ok = ok && (cur < prev || both_exact);
        }
        const double last = std::abs(rows.back().ratio - 1.0);
        ok = ok && last < sc.bound;
        res.pass = res.pass && ok;
        detail += printf_string("%s%s/%s %.4g%s", detail.empty() ? "" : ", ", family_name(sc.family).c_str(),
                                regime_name(sc.regime).c_str(), last, ok ? "" : " FAIL");
    }
    res.detail = "final |ratio-1|: " + detail;
    return res;
}

CriterionResult sandwich(const VerifyOptions& o) {
    CriterionResult res{9, "throughput sandwich and greedy segment", true, "", 0.0};
    double worst_order = -INFINITY, worst_equal = 0.0;
    for (const auto& d : {EnergyDistribution::bernoulli(0.0, 5.0, 0.5), EnergyDistribution::uniform(2.0),
                          EnergyDistribution::exponential(1.0)}) {
        const double cs = c_star(d, kAwgn);
        for (const auto& row : curves(d, kAwgn, 0.1 * cs, 2.0 * cs, 20, {}, o.threads)) {
            if (!row.ok) {
                res.pass = false;
                continue;
            }
            worst_order = std::max({worst_order, row.gamma_greedy - row.gamma_star, row.gamma_star - row.gamma_upper});
            if (row.c <= cs * (1.0 + 1e-12)) {
                worst_equal = std::max(worst_equal, std::abs(row.gamma_star - row.gamma_greedy));
            }
        }
    }
    res.pass = res.pass && worst_order <= 1e-4 && worst_equal <= 1e-4;
    res.detail = printf_string("60 capacities, worst ordering excess %.3g, worst |gamma*-greedy| on [0,c*] %.3g",
                               worst_order, worst_equal);
    return res;
}

CriterionResult determinism(const VerifyOptions& o) {
    CriterionResult res{10, "byte-identical reruns", true, "", 0.0};
    const std::string seed = std::to_string(o.seed);
    const std::vector<std::vector<std::vector<std::string>>> groups{
        {{"simulate", "--dist", "bernoulli:xlo=0,xhi=5,p=0.5", "--capacity", "2", "--policy", "modified:eps=0.25",
          "--steps", "200000", "--seed", seed}},
        {{"simulate", "--dist", "exponential:eta=1", "--capacity", "2", "--policy", "modified", "--compare",
          "greedy", "--steps", "20000", "--replicates", "12", "--seed", seed, "--threads", "1"},
         {"simulate", "--dist", "exponential:eta=1", "--capacity", "2", "--policy", "modified", "--compare",
          "greedy", "--steps", "20000", "--replicates", "12", "--seed", seed, "--threads", "4"}},
        {{"curves", "--dist", "uniform:omega=2", "--cmin", "0.2", "--cmax", "3", "--points", "8", "--seed", seed,
          "--threads", "1"},
         {"curves", "--dist", "uniform:omega=2", "--cmin", "0.2", "--cmax", "3", "--points", "8", "--seed", seed,
          "--threads", "3"}},
        {{"sweep", "--family", "poisson", "--regime", "large", "--mu", "10,100,1000", "--seed", seed}},
    };
    int runs = 0;
    std::string failures;
    for (const auto& group : groups) {
        std::string reference;
        for (std::size_t v = 0; v < group.size(); ++v) {
            for (int rep = 0; rep < 2; ++rep) {
                std::ostringstream out, err;
                const int code = cli_main(group[v], out, err);
                ++runs;
                if (code != kExitOk) {
                    failures += " " + group[v][0] + " exited " + std::to_string(code) + ";";
                    continue;
                }
                if (v == 0 && rep == 0) {
                    reference = out.str();
                } else if (out.str() != reference) {
                    failures += " " + group[v][0] + " output differs;";
                }
            }
        }
    }
    res.pass = failures.empty();
    res.detail = printf_string("%d CLI runs compared byte for byte", runs) + failures;
    return res;
}

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    if (id < 1 || id > kCriteriaCount) throw DomainError("no criterion " + std::to_string(id));
    CriterionResult res;
    try {
        switch (id) {
            case 1: res = closed_form_oracle(opts); break;
            case 2: res = characterisation_consistency(opts); break;
            case 3: res = exact_values(opts); break;
            case 4: res = greedy_below_threshold(opts); break;
            case 5: res = greedy_above_threshold(opts); break;
            case 6: res = bound_ordering(opts); break;
            case 7: res = phi_monotonicity(opts); break;
            case 8: res = asymptotic_trends(opts); break;
            case 9: res = sandwich(opts); break;
            default: res = determinism(opts); break;
        }
    } catch (const std::exception& e) {
        res = {id, "criterion " + std::to_string(id), false, std::string("raised: ") + e.what(), 0.0};
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    // Runtime budgets are part of these criteria.
    const double budget = id == 1 ? 10.0 : id == 4 ? 300.0 : id == 8 ? 120.0 : INFINITY;
    if (res.seconds > budget) {
        res.pass = false;
        res.detail += printf_string("; over the %.0f s budget", budget);
    }
    return res;
}

std::vector<CriterionResult> run_verify(const VerifyOptions& opts) {
    std::vector<int> ids = opts.only;
    if (ids.empty()) {
        for (int i = 1; i <= kCriteriaCount; ++i) ids.push_back(i);
    }
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run_criterion(id, opts));
    return out;
}

std::string format_criterion(const CriterionResult& c) {
    return printf_string("[%s] %d %s: ", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str()) + c.detail +
           printf_string(" (%.2f s)", c.seconds);
}

}  // namespace ehpc
