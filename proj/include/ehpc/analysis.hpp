#pragma once

#include "ehpc/bellman.hpp"
#include "ehpc/distributions.hpp"
#include "ehpc/reward.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ehpc {

struct CurveRow {
    double c = 0.0;
    double gamma_star = 0.0;
    double gamma_greedy = 0.0;
    double gamma_upper = 0.0;
    bool ok = true;
    std::string error;
};

/// Optimal, greedy and upper throughput on an evenly spaced capacity grid.
/// A solver failure marks its row as failed instead of aborting the whole curve.
std::vector<CurveRow> curves(const EnergyDistribution& d, const RewardFunction& r, double c_min, double c_max,
                             std::size_t points, const BellmanOptions& solver = {}, std::size_t threads = 0);

enum class Regime { Small, Large };
Regime parse_regime(std::string_view name);
std::string regime_name(Regime g);

struct SweepRow {
    double mu = 0.0;
    double c_star = 0.0;
    double psi = 0.0;
    double ratio = 0.0;
    /// Exact c* where one is known in closed form (Poisson, small means), NaN otherwise.
    double closed_form = 0.0;
};

/// Reference scaling psi(mu) that c* tracks as mu -> 0 (Small) or mu -> inf (Large).
double asymptotic_psi(Family family, Regime regime, double mu);

/// Smallest / largest mean accepted for a regime.
inline constexpr double kSmallRegimeMax = 1.0;
inline constexpr double kLargeRegimeMin = 10.0;

/// c*/psi(mu) for each mean, AWGN reward. Means must be sorted ascending and inside the regime.
std::vector<SweepRow> asymptotic_sweep(Family family, Regime regime, const std::vector<double>& mu_values,
                                       std::size_t threads = 0);

struct PhiCheck {
    double capacity = 0.0;
    std::size_t b_points = 0;
    std::size_t g_points = 0;
    /// phi(b, g) nondecreasing in g along every battery row (slack 1e-12).
    bool nondecreasing = true;
    /// Most negative phi(b, g_{j+1}) - phi(b, g_j) seen.
    double worst_increment = 0.0;
    /// Smallest left semi-derivative over grid points with g > 0, and where it occurs.
    double min_left_derivative = 0.0;
    double argmin_b = 0.0;
    double argmin_g = 0.0;
};

/// Scans phi(b, g) = r(g) + E[r(min(b - g + X, c))] on b_i = c i / b_points (i >= 1)
/// and g_j = b_i j / (g_points - 1).
PhiCheck phi_check(const EnergyDistribution& d, const RewardFunction& r, double c, std::size_t b_points = 50,
                   std::size_t g_points = 200, std::size_t threads = 0);

}  // namespace ehpc
