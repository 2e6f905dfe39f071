#pragma once

#include "ehpc/distributions.hpp"
#include "ehpc/reward.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace ehpc {

/// An energy bound that may be unbounded within the numeric support cap.
struct BoundValue {
    double value = 0.0;
    bool unbounded_within_cap = false;
    /// Upper end of the scan range (support max, or the numeric cap for unbounded supports).
    double cap = 0.0;
};

struct SemiBounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct BernoulliReference {
    double c_star = 0.0;
    double c_lower = 0.0;
    double c_upper = 0.0;
    double semi_lower = 0.0;
    double semi_upper = 0.0;
};

enum class ThresholdMethod { DiscreteExact, ContinuousRoot, Bisection };
std::string method_name(ThresholdMethod m);

struct BoundOptions {
    std::size_t scan_points = 100000;
    /// Hull forces the sampled-envelope predicate even for AWGN.
    EnvelopeMethod envelope = EnvelopeMethod::Auto;
};

struct ThresholdReport {
    double c_star = 0.0;
    double c_lower = 0.0;
    BoundValue c_upper;
    std::optional<SemiBounds> semi;  ///< AWGN only
    ThresholdMethod method = ThresholdMethod::Bisection;
    /// D(c_star) = r'(c*) - E[r'(X); X < c*].
    double residual = 0.0;
    double scan_step_lower = 0.0;
    double scan_step_upper = 0.0;
};

/// D(c) = r'(c) - E[r'(X); X < c]; greedy is optimal at capacity c iff D(c) >= 0.
double threshold_gap(const EnergyDistribution& d, const RewardFunction& r, double c);

/// Throws DegenerateThreshold when r'(x_lo) == r'(x_hi).
void require_nondegenerate(const EnergyDistribution& d, const RewardFunction& r);

/// c* by bisection of the boolean predicate D(c) >= 0.
double c_star(const EnergyDistribution& d, const RewardFunction& r);

/// c* by walking the ordered atoms of a discrete law.
double c_star_discrete_exact(const EnergyDistribution& d, const RewardFunction& r);

/// c* for the AWGN reward and a continuous law: root of 1 - (1+c) E[1/(1+X); X < c].
///
/// Uses cancellation-free forms of the root function so that means far
/// from 1 (1e-40 .. 1e12) are resolved to near machine precision.
double c_star_continuous_awgn(const EnergyDistribution& d);

/// Sign-reliable value of 1 - (1+c) E[1/(1+X); X < c] for continuous d.
double continuous_awgn_gap(const EnergyDistribution& d, double c);

double bound_lower(const EnergyDistribution& d, const RewardFunction& r, const BoundOptions& opts = {});
BoundValue bound_upper(const EnergyDistribution& d, const RewardFunction& r, const BoundOptions& opts = {});

/// Semi-universal bounds for the AWGN reward from (x_lo, x_hi, mu); x_hi may be +inf.
SemiBounds semi_bounds_awgn(double x_lo, double x_hi, double mu);

/// Closed forms for a two-point law with P(X = x_hi) = p under the AWGN reward.
BernoulliReference bernoulli_reference(double x_lo, double x_hi, double p);

/// (pi a / 2) * int_0^a exp(-pi y^2 / 4) dy.
double rayleigh_a_functional(double a);
/// Root of rayleigh_a_functional(a) = 1 (about 0.8753).
double rayleigh_a_star();

/// E[r(min(X, c))].
double greedy_throughput(const EnergyDistribution& d, const RewardFunction& r, double c);
/// r(E[min(X, c)]).
double throughput_upper(const EnergyDistribution& d, const RewardFunction& r, double c);

ThresholdReport threshold_report(const EnergyDistribution& d, const RewardFunction& r,
                                 const BoundOptions& opts = {});

}  // namespace ehpc
