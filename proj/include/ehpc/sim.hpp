#pragma once

#include "ehpc/bellman.hpp"
#include "ehpc/distributions.hpp"
#include "ehpc/reward.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace ehpc {

enum class PolicyKind { Greedy, ModifiedGreedy, FromSolution, Custom };

/// Stationary or two-phase consumption rule g = policy(slot, battery, arrival).
class Policy {
public:
    static Policy greedy();
    /// Saves eps on odd slots whose arrival is at least min(x_hi, c) - eps.
    static Policy modified_greedy(double eps);
    static Policy from_solution(BellmanSolution sol);
    static Policy custom(std::function<double(double)> map, std::string name = "custom");

    PolicyKind kind() const { return kind_; }
    double epsilon() const { return eps_; }
    std::string describe() const;

    /// Consumption in slot t (1-based) with battery b after arrival x.
    double action(std::uint64_t t, double b, double x, double c, double x_hi) const;

    /// Throws DomainError if the policy is not usable at capacity c under law d.
    void validate(const EnergyDistribution& d, double c) const;

private:
    PolicyKind kind_ = PolicyKind::Greedy;
    double eps_ = 0.0;
    std::shared_ptr<const BellmanSolution> solution_;
    std::function<double(double)> map_;
    std::string name_;
};

/// The two-phase rule on its own: odd slots keep eps back when x >= min(x_hi, c) - eps.
double modified_greedy_step(bool odd_slot, double b, double x_current, double c, double eps,
                            double x_hi = std::numeric_limits<double>::infinity());

struct SimulationResult {
    std::uint64_t steps = 0;
    double avg_reward = 0.0;
    /// Batch-means 95% half-width (100 batches); NaN when fewer than two batches exist.
    double ci_halfwidth_95 = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double final_battery = 0.0;
};

/// Simulates B_t = min(B_{t-1} - G_{t-1} + X_t, c) from B_0 = G_0 = 0 for n slots.
/// A policy asking for g outside [0, B_t] raises AdmissibilityError.
SimulationResult simulate(const Policy& policy, const EnergyDistribution& d, const RewardFunction& r, double c,
                          std::uint64_t n, std::uint64_t seed, std::uint64_t stream = 0);

struct PairedComparison {
    double mean_difference = 0.0;
    double ci_halfwidth_95 = 0.0;
    bool significant = false;
    std::vector<double> differences;
    std::vector<SimulationResult> a;
    std::vector<SimulationResult> b;
};

/// Paired replicates on common random numbers: replicate k of both policies
/// uses stream (seed_base, k). Results are identical for any thread count.
PairedComparison compare_policies(const Policy& pa, const Policy& pb, const EnergyDistribution& d,
                                  const RewardFunction& r, double c, std::uint64_t n, std::uint64_t seed_base,
                                  std::size_t replicates, std::size_t threads = 0);

/// Long-run average reward of the two-phase rule, computed in closed form.
double modified_greedy_throughput(const EnergyDistribution& d, const RewardFunction& r, double c, double eps);

/// The eps in {0.05, 0.10, ..., 0.50} (restricted to admissible values) maximising the closed form.
double best_modified_epsilon(const EnergyDistribution& d, const RewardFunction& r, double c);

/// Runs job(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

}  // namespace ehpc
