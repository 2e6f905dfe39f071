#include "ehpc/bellman.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehpc {

namespace {

// Per-cell moments of X on the battery grid: for cell [b_m, b_{m+1}),
// mass[m] = P(X in cell) and offset[m] = E[(X - b_m) 1{X in cell}];
// tail[k] = P(X >= b_k).
struct CellMoments {
    std::vector<double> mass;
    std::vector<double> offset;
    std::vector<double> tail;
};

CellMoments cell_moments(const EnergyDistribution& d, const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    const double c = grid.back();
    const double step = grid[1] - grid[0];
    CellMoments mo;
    mo.mass.assign(n - 1, 0.0);
    mo.offset.assign(n - 1, 0.0);
    mo.tail.assign(n, 0.0);

    if (d.is_discrete()) {
        for (std::uint64_t k = d.atom_begin(); k < d.atom_end(); ++k) {
            const Atom a = d.atom(k);
            if (a.x >= c) break;
            auto m = static_cast<std::size_t>(std::min(std::floor(a.x / step), static_cast<double>(n - 2)));
            while (m + 1 < n - 1 && grid[m + 1] <= a.x) ++m;
            while (m > 0 && grid[m] > a.x) --m;
            mo.mass[m] += a.p;
            mo.offset[m] += (a.x - grid[m]) * a.p;
        }
    } else {
        const double x_hi = d.support_max();
        for (std::size_t m = 0; m + 1 < n; ++m) {
            const double a = grid[m];
            const double b = std::min(grid[m + 1], x_hi);
            if (a >= b) continue;
            // Differences of whichever side of the distribution is small avoid cancellation.
            mo.mass[m] = d.cdf_strict(a) < 0.5 ? d.cdf_strict(b) - d.cdf_strict(a) : d.survival(a) - d.survival(b);
            mo.offset[m] = integrate_gauss8([&](double x) { return (x - a) * d.density(x); }, a, b);
        }
    }
    mo.tail[n - 1] = d.survival(c);
    for (std::size_t k = n - 1; k-- > 0;) mo.tail[k] = mo.tail[k + 1] + mo.mass[k];
    return mo;
}

// W_j = E[h(min(b_j + X, c))] for the piecewise-linear h on the grid.
void expected_next(const CellMoments& mo, const std::vector<double>& h, double step, std::vector<double>& w) {
    const std::size_t n = h.size();
    const double inv = 1.0 / step;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; j + m + 1 < n; ++m) {
            const double lo = h[j + m];
            acc += lo * mo.mass[m] + (h[j + m + 1] - lo) * inv * mo.offset[m];
        }
        w[j] = acc + h[n - 1] * mo.tail[n - 1 - j];
    }
}

double interpolate(const std::vector<double>& v, double step, double s) {
    const std::size_t n = v.size();
    if (s <= 0.0) return v.front();
    const double pos = s / step;
    if (pos >= static_cast<double>(n - 1)) return v.back();
    const auto j = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(j);
    return v[j] + t * (v[j + 1] - v[j]);
}

// Atoms below the capacity plus the mass at or above it.
struct AtomTable {
    std::vector<Atom> below;
    double tail_c = 0.0;
};

AtomTable atom_table(const EnergyDistribution& d, double c) {
    AtomTable t;
    for (std::uint64_t k = d.atom_begin(); k < d.atom_end(); ++k) {
        const Atom a = d.atom(k);
        if (a.x >= c) break;
        if (a.p > 0.0) t.below.push_back(a);
    }
    t.tail_c = d.survival(c);
    return t;
}

// E[h(min(s + X, c))] for a discrete law, exact for the interpolated h at any s.
double expected_bias_atoms(const AtomTable& t, const std::vector<double>& h, double step, double c, double s) {
    const double room = c - s;
    double acc = 0.0;
    double tail = t.tail_c;
    for (const Atom& a : t.below) {
        if (a.x < room) {
            acc += interpolate(h, step, s + a.x) * a.p;
        } else {
            tail += a.p;
        }
    }
    return acc + h.back() * tail;
}

// Maximiser of a unimodal f on [lo, hi], endpoints included.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double f_lo, double f_hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    const double stop = 1e-13 * std::max(1.0, std::abs(hi));
    for (int it = 0; it < 100 && b - a > stop; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    std::pair<double, double> best{lo, f_lo};
    for (const auto& cand : {std::pair{x1, f1}, std::pair{x2, f2}, std::pair{hi, f_hi}}) {
        if (cand.second > best.second) best = cand;
    }
    return best;
}

// Best saved energy s in [0, b] for objective f, seeded by the grid index j_best of a grid search.
template <typename F>
std::pair<double, double> refine_action(F&& f, const std::vector<double>& grid, std::size_t j_best, double b,
                                        double f_best) {
    std::pair<double, double> best{grid[j_best], f_best};
    const auto try_segment = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        const auto cand = golden_max(f, lo, hi, f(lo), f(hi));
        if (cand.second > best.second) best = cand;
    };
    if (j_best > 0) try_segment(grid[j_best - 1], grid[j_best]);
    try_segment(grid[j_best], std::min(b, j_best + 1 < grid.size() ? grid[j_best + 1] : b));
    return best;
}

void validate(const EnergyDistribution&, double c, const BellmanOptions& opts) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("solve: capacity must be finite and > 0");
    if (opts.grid_n < 64) throw DomainError("solve: grid_n must be >= 64");
    if (!(opts.tol > 0.0)) throw DomainError("solve: tol must be > 0");
    if (!(opts.relaxation > 0.0 && opts.relaxation <= 1.0)) throw DomainError("solve: relaxation must be in (0, 1]");
    if (opts.max_sweeps < 1) throw DomainError("solve: max_sweeps must be >= 1");
}

}  // namespace

double BellmanSolution::bias(double b) const { return interpolate(h, step(), b); }

double BellmanSolution::saved(double b) const {
    if (b <= 0.0) return 0.0;
    const double pos = b / step();
    const std::size_t n = grid.size();
    double s;
    if (pos >= static_cast<double>(n - 1)) {
        s = grid.back() - policy.back();
    } else {
        const auto j = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(j);
        const double s0 = grid[j] - policy[j];
        const double s1 = grid[j + 1] - policy[j + 1];
        s = s0 + t * (s1 - s0);
    }
    return std::clamp(s, 0.0, b);
}

BellmanSolution solve(const EnergyDistribution& d, const RewardFunction& r, double c, const BellmanOptions& opts) {
    validate(d, c, opts);
    const std::size_t n = opts.grid_n;
    BellmanSolution sol;
    sol.capacity = c;
    sol.grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.grid[i] = i + 1 == n ? c : c * static_cast<double>(i) / static_cast<double>(n - 1);
    const double step = sol.grid[1];
    const auto& grid = sol.grid;

    const CellMoments mo = cell_moments(d, grid);
    std::vector<double> r_grid(n);
    for (std::size_t i = 0; i < n; ++i) r_grid[i] = r.value(grid[i]);

    // For discrete laws W(s) has kinks at s = c - x_k; evaluating it exactly off the grid keeps
    // them, whereas interpolating W between grid nodes would shave the peaks.
    const bool discrete = d.is_discrete();
    const AtomTable atoms = discrete ? atom_table(d, c) : AtomTable{};

    std::vector<double> h(n, 0.0), w(n), th(n), saved(n);
    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        expected_next(mo, h, step, w);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j_best = 0;
            double v_best = r_grid[i] + w[0];
            for (std::size_t j = 1; j <= i; ++j) {
                const double v = r_grid[i - j] + w[j];
                if (v > v_best) {
                    v_best = v;
                    j_best = j;
                }
            }
            if (i == 0) {
                th[0] = v_best;
                saved[0] = 0.0;
                continue;
            }
            const double b = grid[i];
            const auto f = [&](double s) {
                const double next = discrete ? expected_bias_atoms(atoms, h, step, c, s) : interpolate(w, step, s);
                return r.value(std::max(0.0, b - s)) + next;
            };
            const auto best = refine_action(f, grid, j_best, b, v_best);
            th[i] = best.second;
            saved[i] = best.first;
        }
        double lo = th[0] - h[0], hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            const double inc = th[i] - h[i];
            lo = std::min(lo, inc);
            hi = std::max(hi, inc);
        }
        const double ref = th[0];
        for (std::size_t i = 0; i < n; ++i) h[i] = (1.0 - opts.relaxation) * h[i] + opts.relaxation * (th[i] - ref);
        sol.residual = hi - lo;
        sol.gamma = 0.5 * (hi + lo);
        sol.iterations = sweep;
        if (sol.residual <= opts.tol) {
            sol.h = h;
            sol.policy.resize(n);
            for (std::size_t i = 0; i < n; ++i) sol.policy[i] = std::clamp(grid[i] - saved[i], 0.0, grid[i]);
            return sol;
        }
    }
    std::ostringstream msg;
    msg << "relative value iteration did not converge in " << opts.max_sweeps << " sweeps (span " << sol.residual
        << ", tol " << opts.tol << ")";
    throw ConvergenceError(msg.str());
}

double expected_bias(const BellmanSolution& sol, const EnergyDistribution& d, double s) {
    const double c = sol.capacity;
    if (!(s >= 0.0 && s <= c)) throw DomainError("expected_bias: post-decision state outside [0, c]");
    const double room = c - s;
    const double h_c = sol.h.back();
    if (room <= 0.0) return h_c;
    if (d.is_discrete()) return expected_bias_atoms(atom_table(d, c), sol.h, sol.step(), c, s);
    double acc = 0.0;
    {
        // h is linear between grid nodes, so integrate cell by cell in x = y - s.
        const double x_end = std::min(room, d.support_max());
        const double step = sol.step();
        auto k = static_cast<std::size_t>(std::floor(s / step)) + 1;
        double x0 = 0.0;
        while (x0 < x_end) {
            const double x1 = k < sol.grid.size() ? std::min(sol.grid[k] - s, x_end) : x_end;
            if (x1 > x0) {
                acc += integrate_gauss8([&](double x) { return sol.bias(s + x) * d.density(x); }, x0, x1);
            }
            x0 = std::max(x0, x1);
            ++k;
        }
    }
    return acc + h_c * d.survival(room);
}

double bellman_residual(const BellmanSolution& sol, const EnergyDistribution& d, const RewardFunction& r,
                        const std::vector<double>& points) {
    const auto& grid = sol.grid;
    const std::size_t n = grid.size();
    const CellMoments mo = cell_moments(d, grid);
    std::vector<double> w(n);
    expected_next(mo, sol.h, sol.step(), w);

    double worst = 0.0;
    for (const double b : points) {
        if (!(b >= 0.0 && b <= sol.capacity)) throw DomainError("bellman_residual: point outside [0, c]");
        const auto exact = [&](double s) { return r.value(std::max(0.0, b - s)) + expected_bias(sol, d, s); };
        // Seed from the grid-aligned W, then refine against the exact expectation.
        std::size_t j_best = 0;
        double v_best = -INFINITY;
        for (std::size_t j = 0; j < n && grid[j] <= b; ++j) {
            const double v = r.value(b - grid[j]) + w[j];
            if (v > v_best) {
                v_best = v;
                j_best = j;
            }
        }
        double best = exact(grid[j_best]);
        best = std::max(best, exact(b));
        best = std::max(best, refine_action(exact, grid, j_best, b, best).second);
        worst = std::max(worst, std::abs(sol.gamma + sol.bias(b) - best));
    }
    return worst;
}

double phi_value(const EnergyDistribution& d, const RewardFunction& r, double c, double b, double g) {
    if (!(g >= 0.0 && g <= b && b <= c)) throw DomainError("phi: need 0 <= g <= b <= c");
    const double kept = b - g;
    const double room = c - kept;
    const double rc = r.value(c);
    if (room <= 0.0) return r.value(g) + rc;
    return r.value(g) + d.truncated_expect([&](double x) { return r.value(kept + x); }, room) + d.survival(room) * rc;
}

PhiSemiDerivatives phi_semi_derivatives(const EnergyDistribution& d, const RewardFunction& r, double c, double b,
                                        double g) {
    if (!(g >= 0.0 && g <= b && b <= c)) throw DomainError("phi: need 0 <= g <= b <= c");
    const double kept = b - g;
    const double room = c - b + g;
    const double below =
        room > 0.0 ? d.truncated_expect([&](double x) { return r.derivative(kept + x); }, room) : 0.0;
    const double left = r.derivative(g) - below;
    PhiSemiDerivatives out;
    if (g > 0.0) out.left = left;
    if (g < b) out.right = left - d.point_mass(room) * r.derivative(c);
    return out;
}

}  // namespace ehpc
