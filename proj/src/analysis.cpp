#include "ehpc/analysis.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/sim.hpp"
#include "ehpc/threshold.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ehpc {

std::vector<CurveRow> curves(const EnergyDistribution& d, const RewardFunction& r, double c_min, double c_max,
                             std::size_t points, const BellmanOptions& solver, std::size_t threads) {
    if (!(c_min > 0.0) || !(c_max >= c_min) || !std::isfinite(c_max)) {
        throw DomainError("curves: need 0 < c_min <= c_max");
    }
    if (c_min == c_max) points = 1;
    if (points < 1 || (points < 2 && c_min != c_max)) throw DomainError("curves: need at least 2 points");

    std::vector<CurveRow> rows(points);
    for (std::size_t i = 0; i < points; ++i) {
        rows[i].c = points == 1 ? c_min
                                : c_min + (c_max - c_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    rows.back().c = c_max;
    parallel_for(points, threads, [&](std::size_t i) {
        CurveRow& row = rows[i];
        row.gamma_greedy = greedy_throughput(d, r, row.c);
        row.gamma_upper = throughput_upper(d, r, row.c);
        try {
            row.gamma_star = solve(d, r, row.c, solver).gamma;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            row.gamma_star = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return rows;
}

Regime parse_regime(std::string_view name) {
    if (name == "small") return Regime::Small;
    if (name == "large") return Regime::Large;
    throw DomainError("unknown regime '" + std::string(name) + "' (expected small or large)");
}

std::string regime_name(Regime g) { return g == Regime::Small ? "small" : "large"; }

double asymptotic_psi(Family family, Regime regime, double mu) {
    const bool small = regime == Regime::Small;
    switch (family) {
        case Family::Geometric: return small ? mu : mu / std::log(mu);
        case Family::Poisson: return mu;
        case Family::Uniform: return small ? 2.0 * mu : 2.0 * mu / std::log(mu);
        case Family::Exponential: return small ? -mu * std::log(mu) : mu / std::log(mu);
        case Family::Rayleigh:
            return small ? 2.0 / std::sqrt(std::numbers::pi) * mu * std::sqrt(-std::log(mu)) : rayleigh_a_star() * mu;
        default: break;
    }
    throw DomainError("no asymptotic law for family " + family_name(family));
}

std::vector<SweepRow> asymptotic_sweep(Family family, Regime regime, const std::vector<double>& mu_values,
                                       std::size_t threads) {
    for (std::size_t i = 0; i < mu_values.size(); ++i) {
        const double mu = mu_values[i];
        const bool in_range = regime == Regime::Small ? (mu > 0.0 && mu <= kSmallRegimeMax)
                                                      : (mu >= kLargeRegimeMin && std::isfinite(mu));
        if (!in_range) {
            std::ostringstream msg;
            msg << "mean " << mu << " is outside the " << regime_name(regime) << " regime";
            throw DomainError(msg.str());
        }
        if (i > 0 && !(mu > mu_values[i - 1])) throw DomainError("sweep means must be strictly increasing");
    }

    const RewardFunction r = RewardFunction::awgn();
    std::vector<SweepRow> rows(mu_values.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const double mu = mu_values[i];
        const EnergyDistribution d = EnergyDistribution::from_mean(family, mu);
        SweepRow& row = rows[i];
        row.mu = mu;
        row.c_star = d.is_discrete() ? c_star_discrete_exact(d, r) : c_star_continuous_awgn(d);
        row.psi = asymptotic_psi(family, regime, mu);
        row.ratio = row.c_star / row.psi;
        row.closed_form = family == Family::Poisson && regime == Regime::Small && mu <= std::numbers::ln2
                              ? std::expm1(mu)
                              : std::numeric_limits<double>::quiet_NaN();
    });
    return rows;
}

PhiCheck phi_check(const EnergyDistribution& d, const RewardFunction& r, double c, std::size_t b_points,
                   std::size_t g_points, std::size_t threads) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("phi_check: capacity must be finite and > 0");
    if (b_points < 1 || g_points < 2) throw DomainError("phi_check: need b_points >= 1 and g_points >= 2");

    struct RowResult {
        double worst_increment = INFINITY;
        double min_left = INFINITY;
        double argmin_g = 0.0;
    };
    std::vector<RowResult> rows(b_points);
    const auto battery = [&](std::size_t i) {
        return i + 1 == b_points ? c : c * static_cast<double>(i + 1) / static_cast<double>(b_points);
    };
    parallel_for(b_points, threads, [&](std::size_t i) {
        const double b = battery(i);
        RowResult& row = rows[i];
        double prev = 0.0;
        for (std::size_t j = 0; j < g_points; ++j) {
            const double g = j + 1 == g_points ? b : b * static_cast<double>(j) / static_cast<double>(g_points - 1);
            const double v = phi_value(d, r, c, b, g);
            if (j > 0) {
                row.worst_increment = std::min(row.worst_increment, v - prev);
                const double left = *phi_semi_derivatives(d, r, c, b, g).left;
                if (left < row.min_left) {
                    row.min_left = left;
                    row.argmin_g = g;
                }
            }
            prev = v;
        }
    });

    PhiCheck out;
    out.capacity = c;
    out.b_points = b_points;
    out.g_points = g_points;
    out.worst_increment = INFINITY;
    out.min_left_derivative = INFINITY;
    for (std::size_t i = 0; i < b_points; ++i) {
        out.worst_increment = std::min(out.worst_increment, rows[i].worst_increment);
        if (rows[i].min_left < out.min_left_derivative) {
            out.min_left_derivative = rows[i].min_left;
            out.argmin_b = battery(i);
            out.argmin_g = rows[i].argmin_g;
        }
    }
    out.nondecreasing = out.worst_increment >= -1e-12;
    return out;
}

}  // namespace ehpc
