#include "ehpc/threshold.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/quadrature.hpp"
#include "ehpc/summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace ehpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest c in [lo, hi] with pred(c), given pred(lo) && !pred(hi); runs down to adjacent doubles.
double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi) {
    for (int it = 0; it < 2000; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

struct ScanOutcome {
    bool any = false;
    bool held_at_end = false;
    double value = 0.0;
};

// sup of {c in (a, b] : pred(c)} from a uniform scan of n points plus refinement at the last true point.
ScanOutcome scan_sup(const std::function<bool(double)>& pred, double a, double b, std::size_t n) {
    ScanOutcome out;
    if (n < 1) throw DomainError("scan needs at least one point");
    const double step = (b - a) / static_cast<double>(n);
    std::size_t last = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double c = i == n ? b : a + step * static_cast<double>(i);
        if (pred(c)) last = i;
    }
    if (last == 0) return out;
    out.any = true;
    if (last == n) {
        out.held_at_end = true;
        out.value = b;
        return out;
    }
    const double lo = a + step * static_cast<double>(last);
    const double hi = last + 1 == n ? b : a + step * static_cast<double>(last + 1);
    out.value = bisect_last_true(pred, lo, hi);
    return out;
}

double scan_upper_end(const EnergyDistribution& d) {
    return std::isinf(d.support_max()) ? d.support_cap() : d.support_max();
}

}  // namespace

std::string method_name(ThresholdMethod m) {
    switch (m) {
        case ThresholdMethod::DiscreteExact: return "discrete-exact";
        case ThresholdMethod::ContinuousRoot: return "continuous-root";
        case ThresholdMethod::Bisection: return "bisection";
    }
    return "?";
}

double threshold_gap(const EnergyDistribution& d, const RewardFunction& r, double c) {
    if (!(c >= 0.0)) throw DomainError("threshold_gap: c must be >= 0");
    const double below = c > 0.0 ? d.truncated_expect([&](double x) { return r.derivative(x); }, c) : 0.0;
    return r.derivative(c) - below;
}

void require_nondegenerate(const EnergyDistribution& d, const RewardFunction& r) {
    if (!(r.derivative(d.support_min()) > r.derivative(d.support_max()))) throw DegenerateThreshold();
}

double c_star(const EnergyDistribution& d, const RewardFunction& r) {
    require_nondegenerate(d, r);
    const auto holds = [&](double c) { return threshold_gap(d, r, c) >= 0.0; };
    const double x_lo = d.support_min();
    const double x_hi = d.support_max();
    const bool bounded = std::isfinite(x_hi);

    double lo = x_lo + 1e-12 * std::max(1.0, x_lo);
    double hi = std::max(d.mean(), 1.0);
    if (bounded) hi = std::min(hi, x_hi);
    if (hi <= lo) hi = bounded ? x_hi : 2.0 * lo;
    while (holds(hi)) {
        if (bounded && hi >= x_hi) return x_hi;
        lo = hi;
        hi = 2.0 * hi;
        if (bounded) hi = std::min(hi, x_hi);
        if (hi > 1e300) throw ConvergenceError("c_star: predicate holds up to 1e300");
    }
    return bisect_last_true(holds, lo, hi);
}

double c_star_discrete_exact(const EnergyDistribution& d, const RewardFunction& r) {
    if (!d.is_discrete()) throw DomainError("c_star_discrete_exact: discrete law required");
    require_nondegenerate(d, r);
    // sup{c in [lo, hi]: r'(c) >= s}, with r' nonincreasing.
    const auto invert = [&](double s, double lo, double hi) {
        if (r.derivative(lo) < s) return lo;
        if (r.derivative(hi) >= s) return hi;
        // r'(c) = 1/(2(1 + c)) inverts in closed form.
        if (r.kind() == RewardKind::Awgn) return std::clamp(0.5 / s - 1.0, lo, hi);
        return bisect_last_true([&](double c) { return r.derivative(c) >= s; }, lo, hi);
    };

    CompensatedSum partial;
    double prev_x = 0.0;
    bool first = true;
    const std::uint64_t end = d.atom_end();
    for (std::uint64_t k = d.atom_begin(); k < end; ++k) {
        const Atom a = d.atom(k);
        if (a.p == 0.0) continue;
        const double s = partial.value();
        if (!first && r.derivative(a.x) < s) {
            // The crossing r'(c) = S lies in [prev_x, a.x): case i, or prev_x itself when the
            // atom at prev_x already tipped the sum over r' (case ii).
            return invert(s, prev_x, a.x);
        }
        partial.add(r.derivative(a.x) * a.p);
        prev_x = a.x;
        first = false;
    }
    const double s = partial.value();
    if (r.derivative(prev_x) < s) return prev_x;
    if (std::isfinite(d.support_max())) return d.support_max();
    throw ConvergenceError("c_star_discrete_exact: threshold beyond the truncated support");
}

double continuous_awgn_gap(const EnergyDistribution& d, double c) {
    if (d.is_discrete()) throw DomainError("continuous_awgn_gap: continuous law required");
    if (c <= 0.0) return 1.0;
    const double b = std::min(c, d.support_max());
    const double rho = d.cdf_strict(c);
    QuadratureOptions opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-13;
    opts.max_subdivisions = 20000;
    if (rho < 0.5) {
        // E[1/(1+X); X < c] with t = log(1+x).
        const double t_hi = std::log1p(b);
        const double i = integrate_adaptive([&](double t) { return d.density(std::expm1(t)); }, 0.0, t_hi, opts).value;
        return 1.0 - (1.0 + c) * i;
    }
    // 1 - (1+c)(rho - J) rewritten as S - c rho + (1+c) J, J = E[X/(1+X); X < c].
    const double j = b * integrate_adaptive(
                             [&](double u) {
                                 const double x = b * u;
                                 return d.density(x) * x / (1.0 + x);
                             },
                             0.0, 1.0, opts)
                             .value;
    return d.survival(c) - c * rho + (1.0 + c) * j;
}

double c_star_continuous_awgn(const EnergyDistribution& d) {
    if (d.is_discrete()) throw DomainError("c_star_continuous_awgn: continuous law required");
    const auto holds = [&](double c) { return continuous_awgn_gap(d, c) >= 0.0; };
    const double x_hi = d.support_max();
    const bool bounded = std::isfinite(x_hi);

    double hi = bounded ? std::min(d.mean(), x_hi) : d.mean();
    while (holds(hi)) {
        if (bounded && hi >= x_hi) return x_hi;
        hi = 2.0 * hi;
        if (bounded) hi = std::min(hi, x_hi);
        if (hi > 1e300) throw ConvergenceError("c_star_continuous_awgn: no sign change");
    }
    double lo = 0.5 * hi;
    while (!holds(lo)) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300) throw ConvergenceError("c_star_continuous_awgn: no sign change");
    }
    return bisect_last_true(holds, lo, hi);
}

double bound_lower(const EnergyDistribution& d, const RewardFunction& r, const BoundOptions& opts) {
    require_nondegenerate(d, r);
    const double x_lo = d.support_min();
    const double x_hi = d.support_max();
    const double mu = d.mean();
    const auto xi_lower = [&](double rho) {
        if (std::isinf(x_hi)) return x_lo;
        return std::max((mu - (1.0 - rho) * x_hi) / rho, x_lo);
    };

    std::function<bool(double)> pred;
    if (r.kind() == RewardKind::Awgn && opts.envelope == EnvelopeMethod::Auto) {
        pred = [&](double c) {
            const double rho = d.cdf_strict(c);
            if (rho <= 0.0) return true;
            const double zeta = ((1.0 - rho) * (1.0 + x_lo) + rho * xi_lower(rho)) / rho;
            return c <= zeta;
        };
    } else {
        pred = [&](double c) {
            const double rho = d.cdf_strict(c);
            if (rho <= 0.0) return true;
            const double xi = std::clamp(xi_lower(rho), x_lo, c);
            const DerivativeEnvelope env(r, x_lo, c, DerivativeEnvelope::Side::UpperConcave, opts.envelope);
            return r.derivative(c) >= rho * env(xi);
        };
    }
    const ScanOutcome s = scan_sup(pred, x_lo, scan_upper_end(d), opts.scan_points);
    return s.any ? s.value : x_lo;
}

BoundValue bound_upper(const EnergyDistribution& d, const RewardFunction& r, const BoundOptions& opts) {
    require_nondegenerate(d, r);
    const double x_lo = d.support_min();
    const double mu = d.mean();

    std::function<bool(double)> pred;
    if (r.kind() == RewardKind::Awgn && opts.envelope == EnvelopeMethod::Auto) {
        pred = [&](double c) {
            const double rho = d.cdf_strict(c);
            return c <= (mu + rho - rho * rho) / (1.0 - rho + rho * rho);
        };
    } else {
        pred = [&](double c) {
            const double rho = d.cdf_strict(c);
            if (rho <= 0.0) return true;
            const double xi = std::clamp(std::min((mu - (1.0 - rho) * c) / rho, c), x_lo, c);
            const DerivativeEnvelope env(r, x_lo, c, DerivativeEnvelope::Side::LowerConvex, opts.envelope);
            return r.derivative(c) >= rho * env(xi);
        };
    }
    BoundValue out;
    out.cap = scan_upper_end(d);
    if (!(out.cap > mu)) {
        out.value = mu;
        return out;
    }
    const ScanOutcome s = scan_sup(pred, mu, out.cap, opts.scan_points);
    out.value = s.any ? s.value : mu;
    out.unbounded_within_cap = s.held_at_end && std::isinf(d.support_max());
    return out;
}

SemiBounds semi_bounds_awgn(double x_lo, double x_hi, double mu) {
    if (!(x_lo >= 0.0) || !(x_lo <= mu) || !(mu <= x_hi) || !std::isfinite(mu)) {
        std::ostringstream msg;
        msg << "semi_bounds_awgn: need 0 <= x_lo <= mu <= x_hi, got (" << x_lo << ", " << x_hi << ", " << mu << ")";
        throw DomainError(msg.str());
    }
    SemiBounds s;
    if (std::isinf(x_hi)) {
        s.lower = x_lo;
    } else if (mu <= x_hi - x_lo - 1.0) {
        s.lower = (1.0 + x_lo) * (x_hi - x_lo) / (x_hi - mu) - 1.0;
    } else {
        s.lower = mu;
    }
    double c;
    if (mu <= 1.5 * x_lo + 0.5) {
        const double m = mu + x_lo;
        c = 0.5 * (m + std::sqrt(std::max(0.0, m * m - 4.0 * (x_lo * x_lo + x_lo - mu))));
    } else {
        c = 4.0 * mu / 3.0 + 1.0 / 3.0;
    }
    s.upper = std::min(c, x_hi);
    return s;
}

BernoulliReference bernoulli_reference(double x_lo, double x_hi, double p) {
    if (!(x_lo >= 0.0 && x_lo < x_hi && std::isfinite(x_hi)) || !(p > 0.0 && p < 1.0)) {
        throw DomainError("bernoulli_reference: need 0 <= x_lo < x_hi < inf and p in (0, 1)");
    }
    BernoulliReference ref;
    const double k = (x_lo + p) / (1.0 - p);
    const bool inside = k <= x_hi;
    ref.c_star = inside ? k : x_hi;
    ref.c_lower = ref.c_star;
    ref.c_upper = inside ? ((1.0 - p) * (x_lo + p) + p * x_hi) / (1.0 - p + p * p) : x_hi;
    ref.semi_lower = ((2.0 - p) * x_lo + 1.0) / (1.0 - p) <= x_hi ? k : (1.0 - p) * x_lo + p * x_hi;
    if (((1.0 + 2.0 * p) * x_lo + 1.0) / (2.0 * p) >= x_hi) {
        const double m = (2.0 - p) * x_lo + p * x_hi;
        const double c1 = 0.5 * m + 0.5 * std::sqrt(m * m - 4.0 * (x_lo * x_lo + p * (x_lo - x_hi)));
        ref.semi_upper = std::min(c1, x_hi);
    } else {
        const double c2 = 4.0 / 3.0 * ((1.0 - p) * x_lo + p * x_hi) + 1.0 / 3.0;
        ref.semi_upper = std::min(c2, x_hi);
    }
    return ref;
}

double rayleigh_a_functional(double a) {
    if (!(a >= 0.0)) throw DomainError("rayleigh_a_functional: a must be >= 0");
    if (a == 0.0) return 0.0;
    QuadratureOptions opts;
    opts.abs_tol = 1e-15;
    const double integral =
        integrate_adaptive([](double y) { return std::exp(-std::numbers::pi * y * y / 4.0); }, 0.0, a, opts).value;
    return std::numbers::pi * a / 2.0 * integral;
}

double rayleigh_a_star() {
    // The functional is increasing, 0 at a = 0 and above 1 at a = 2.
    return bisect_last_true([](double a) { return rayleigh_a_functional(a) <= 1.0; }, 0.0, 2.0);
}

double greedy_throughput(const EnergyDistribution& d, const RewardFunction& r, double c) {
    if (!(c >= 0.0)) throw DomainError("greedy_throughput: c must be >= 0");
    if (c == 0.0) return r.value(0.0);
    return d.truncated_expect([&](double x) { return r.value(x); }, c) + d.survival(c) * r.value(c);
}

double throughput_upper(const EnergyDistribution& d, const RewardFunction& r, double c) {
    if (!(c >= 0.0)) throw DomainError("throughput_upper: c must be >= 0");
    return r.value(d.expected_min(c));
}

ThresholdReport threshold_report(const EnergyDistribution& d, const RewardFunction& r, const BoundOptions& opts) {
    require_nondegenerate(d, r);
    ThresholdReport rep;
    if (d.is_discrete()) {
        rep.method = ThresholdMethod::DiscreteExact;
        rep.c_star = c_star_discrete_exact(d, r);
    } else if (r.kind() == RewardKind::Awgn) {
        rep.method = ThresholdMethod::ContinuousRoot;
        rep.c_star = c_star_continuous_awgn(d);
    } else {
        rep.method = ThresholdMethod::Bisection;
        rep.c_star = c_star(d, r);
    }
    rep.residual = threshold_gap(d, r, rep.c_star);
    rep.c_lower = bound_lower(d, r, opts);
    rep.c_upper = bound_upper(d, r, opts);
    const double n = static_cast<double>(opts.scan_points);
    rep.scan_step_lower = (scan_upper_end(d) - d.support_min()) / n;
    rep.scan_step_upper = std::max(0.0, rep.c_upper.cap - d.mean()) / n;
    if (r.kind() == RewardKind::Awgn) rep.semi = semi_bounds_awgn(d.support_min(), d.support_max(), d.mean());
    return rep;
}

}  // namespace ehpc
