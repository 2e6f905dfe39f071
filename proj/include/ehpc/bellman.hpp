#pragma once

#include "ehpc/distributions.hpp"
#include "ehpc/reward.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ehpc {

struct BellmanOptions {
    std::size_t grid_n = 512;
    /// Stop when the span of (T h - h) falls to this value.
    double tol = 1e-8;
    std::size_t max_sweeps = 100000;
    /// h <- (1 - relaxation) h + relaxation (T h - T h(0)); values below 1 damp periodic chains.
    double relaxation = 1.0;
};

/// Relative value iteration result on the uniform battery grid b_i = i c / (N - 1).
struct BellmanSolution {
    double capacity = 0.0;
    std::vector<double> grid;
    double gamma = 0.0;
    /// Bias normalised to h(0) = 0.
    std::vector<double> h;
    /// Optimal consumption g(b_i), 0 <= g <= b_i.
    std::vector<double> policy;
    /// Span of the last increment T h - h.
    double residual = 0.0;
    std::size_t iterations = 0;

    double step() const { return grid[1] - grid[0]; }
    /// Bias at any b in [0, c] by linear interpolation.
    double bias(double b) const;
    /// Energy kept in the battery, b - g(b), linearly interpolated; always within [0, b].
    double saved(double b) const;
};

/// Solves gamma + h(b) = max_{0<=g<=b} { r(g) + E[h(min(b - g + X, c))] }.
///
/// The expectation over X is computed exactly for the piecewise-linear h on
/// grid-aligned post-decision states from per-cell probability moments; the
/// maximisation uses a grid search over the action grid refined by golden
/// section on the two adjacent segments. Throws ConvergenceError if the span
/// does not reach tol within max_sweeps.
BellmanSolution solve(const EnergyDistribution& d, const RewardFunction& r, double c,
                      const BellmanOptions& opts = {});

/// E[h(min(s + X, c))] for the interpolated bias of sol, at any s in [0, c].
double expected_bias(const BellmanSolution& sol, const EnergyDistribution& d, double s);

/// max over b in `points` of |gamma + h(b) - max_g {r(g) + E[h(min(b - g + X, c))]}|,
/// with the expectation evaluated directly rather than on the solver grid.
double bellman_residual(const BellmanSolution& sol, const EnergyDistribution& d, const RewardFunction& r,
                        const std::vector<double>& points);

/// phi(g) = r(g) + E[r(min(b - g + X, c))] for 0 <= g <= b <= c.
double phi_value(const EnergyDistribution& d, const RewardFunction& r, double c, double b, double g);

struct PhiSemiDerivatives {
    std::optional<double> left;   ///< defined for g > 0
    std::optional<double> right;  ///< defined for g < b
};

/// One-sided derivatives of phi in g. The atom correction in the right
/// derivative is P(X = c - b + g) r'(c).
PhiSemiDerivatives phi_semi_derivatives(const EnergyDistribution& d, const RewardFunction& r, double c, double b,
                                        double g);

}  // namespace ehpc
