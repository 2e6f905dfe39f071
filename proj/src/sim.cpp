#include "ehpc/sim.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/summation.hpp"
#include "ehpc/threshold.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ehpc {

namespace {

constexpr std::uint64_t kBatches = 100;

double t_quantile_975(double dof) {
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), 0.975);
}

struct MeanCi {
    double mean = 0.0;
    double half = 0.0;
};

MeanCi mean_ci(const std::vector<double>& v) {
    MeanCi out;
    const auto k = static_cast<double>(v.size());
    CompensatedSum s;
    for (double x : v) s.add(x);
    out.mean = s.value() / k;
    if (v.size() < 2) {
        out.half = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    CompensatedSum ss;
    for (double x : v) ss.add((x - out.mean) * (x - out.mean));
    out.half = t_quantile_975(k - 1.0) * std::sqrt(ss.value() / (k - 1.0) / k);
    return out;
}

}  // namespace

Policy Policy::greedy() { return Policy{}; }

Policy Policy::modified_greedy(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("modified greedy needs eps > 0");
    Policy p;
    p.kind_ = PolicyKind::ModifiedGreedy;
    p.eps_ = eps;
    return p;
}

Policy Policy::from_solution(BellmanSolution sol) {
    Policy p;
    p.kind_ = PolicyKind::FromSolution;
    p.solution_ = std::make_shared<const BellmanSolution>(std::move(sol));
    return p;
}

Policy Policy::custom(std::function<double(double)> map, std::string name) {
    Policy p;
    p.kind_ = PolicyKind::Custom;
    p.map_ = std::move(map);
    p.name_ = std::move(name);
    return p;
}

std::string Policy::describe() const {
    switch (kind_) {
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::ModifiedGreedy: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "modified:eps=%.12g", eps_);
            return buf;
        }
        case PolicyKind::FromSolution: return "optimal";
        case PolicyKind::Custom: return name_;
    }
    return "?";
}

void Policy::validate(const EnergyDistribution& d, double c) const {
    if (kind_ == PolicyKind::ModifiedGreedy) {
        const double limit = 0.5 * std::min(d.support_max(), c);
        if (!(eps_ <= limit)) {
            std::ostringstream msg;
            msg << "modified greedy needs eps in (0, " << limit << "], got " << eps_;
            throw DomainError(msg.str());
        }
    }
    if (kind_ == PolicyKind::FromSolution && std::abs(solution_->capacity - c) > 1e-12 * std::max(1.0, c)) {
        throw DomainError("solver policy was computed for a different capacity");
    }
}

double modified_greedy_step(bool odd_slot, double b, double x_current, double c, double eps, double x_hi) {
    if (odd_slot && x_current >= std::min(x_hi, c) - eps) return b - eps;
    return b;
}

double Policy::action(std::uint64_t t, double b, double x, double c, double x_hi) const {
    switch (kind_) {
        case PolicyKind::Greedy: return b;
        case PolicyKind::ModifiedGreedy: return modified_greedy_step(t % 2 == 1, b, x, c, eps_, x_hi);
        case PolicyKind::FromSolution: return b - solution_->saved(b);
        case PolicyKind::Custom: return map_(b);
    }
    return b;
}

SimulationResult simulate(const Policy& policy, const EnergyDistribution& d, const RewardFunction& r, double c,
                          std::uint64_t n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw DomainError("simulate: need at least one step");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("simulate: capacity must be finite and > 0");
    policy.validate(d, c);

    Rng rng(seed, stream);
    const double x_hi = d.support_max();
    const std::uint64_t batches = std::min(kBatches, n);
    std::vector<double> batch_means;
    batch_means.reserve(batches);

    CompensatedSum total;
    CompensatedSum batch;
    std::uint64_t batch_index = 0;
    std::uint64_t batch_end = n / batches;
    std::uint64_t batch_start = 0;
    double b = 0.0, g = 0.0;
    for (std::uint64_t t = 1; t <= n; ++t) {
        const double x = d.sample(rng);
        b = std::min(b - g + x, c);
        g = policy.action(t, b, x, c, x_hi);
        if (!(g >= 0.0 && g <= b)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << policy.describe() << " requested g = " << g << " with battery " << b << " at slot " << t;
            throw AdmissibilityError(msg.str());
        }
        const double v = r.value(g);
        total.add(v);
        batch.add(v);
        if (t == batch_end) {
            batch_means.push_back(batch.value() / static_cast<double>(batch_end - batch_start));
            batch = CompensatedSum{};
            ++batch_index;
            batch_start = batch_end;
            batch_end = n * (batch_index + 1) / batches;
        }
    }
    SimulationResult res;
    res.steps = n;
    res.avg_reward = total.value() / static_cast<double>(n);
    res.ci_halfwidth_95 = mean_ci(batch_means).half;
    res.seed = seed;
    res.stream = stream;
    res.final_battery = b;
    return res;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

PairedComparison compare_policies(const Policy& pa, const Policy& pb, const EnergyDistribution& d,
                                  const RewardFunction& r, double c, std::uint64_t n, std::uint64_t seed_base,
                                  std::size_t replicates, std::size_t threads) {
    if (replicates < 10) throw DomainError("compare_policies: need at least 10 replicates");
    PairedComparison out;
    out.a.resize(replicates);
    out.b.resize(replicates);
    parallel_for(replicates, threads, [&](std::size_t k) {
        out.a[k] = simulate(pa, d, r, c, n, seed_base, k);
        out.b[k] = simulate(pb, d, r, c, n, seed_base, k);
    });
    out.differences.resize(replicates);
    for (std::size_t k = 0; k < replicates; ++k) out.differences[k] = out.a[k].avg_reward - out.b[k].avg_reward;
    const MeanCi ci = mean_ci(out.differences);
    out.mean_difference = ci.mean;
    out.ci_halfwidth_95 = ci.half;
    out.significant = std::abs(ci.mean) > ci.half;
    return out;
}

double modified_greedy_throughput(const EnergyDistribution& d, const RewardFunction& r, double c, double eps) {
    Policy::modified_greedy(eps).validate(d, c);
    const double trigger = std::min(d.support_max(), c) - eps;
    const double q = d.survival(trigger);
    const double at_cap = d.survival(c);
    const auto rv = [&](double x) { return r.value(x); };

    // Odd slot: battery min(X, c), eps kept back when X >= trigger.
    const double odd = d.interval_expect(rv, 0.0, trigger) +
                       d.interval_expect([&](double x) { return r.value(x - eps); }, trigger, c) +
                       at_cap * r.value(c - eps);
    // Even slot: battery min(X + eps, c) after a trigger, min(X, c) otherwise.
    const double plain = greedy_throughput(d, r, c);
    const double boosted = d.interval_expect([&](double x) { return r.value(x + eps); }, 0.0, c - eps) +
                           d.survival(c - eps) * r.value(c);
    return 0.5 * (odd + (1.0 - q) * plain + q * boosted);
}

double best_modified_epsilon(const EnergyDistribution& d, const RewardFunction& r, double c) {
    const double limit = 0.5 * std::min(d.support_max(), c);
    double best_eps = 0.0, best = -INFINITY;
    for (int k = 1; k <= 10; ++k) {
        const double eps = 0.05 * k;
        if (eps > limit) break;
        const double v = modified_greedy_throughput(d, r, c, eps);
        if (v > best) {
            best = v;
            best_eps = eps;
        }
    }
    if (best_eps == 0.0) throw DomainError("best_modified_epsilon: no admissible eps in the 0.05 grid");
    return best_eps;
}

}  // namespace ehpc
