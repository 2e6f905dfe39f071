#include "ehpc/quadrature.hpp"

#include "ehpc/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace ehpc {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss7 = boost::math::quadrature::gauss<double, 7>;

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel apply_rule(const std::function<double(double)>& f, double a, double b) {
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss7::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    // abscissa()[0] is the centre; even indices are the embedded 7-point Gauss nodes.
    const double fc = f(mid);
    double kronrod = fc * wk[0];
    double gauss = fc * wg[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(mid + half * x[i]);
        const double fm = f(mid - half * x[i]);
        kronrod += (fp + fm) * wk[i];
        if (i % 2 == 0) gauss += (fp + fm) * wg[i / 2];
    }
    kronrod *= half;
    gauss *= half;
    const double err = std::max(std::abs(kronrod - gauss), 2.0 * std::abs(kronrod) * 2.2e-16);
    return {a, b, kronrod, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts) {
    if (!(a <= b)) {
        if (b < a) {
            auto r = integrate_adaptive(f, b, a, opts);
            r.value = -r.value;
            return r;
        }
        throw DomainError("integrate_adaptive: non-finite bounds");
    }
    if (a == b) return {0.0, 0.0, 0};

    std::priority_queue<Panel> panels;
    Panel first = apply_rule(f, a, b);
    double total = first.value;
    double error = first.error;
    panels.push(first);
    // Panels too narrow to bisect further keep their estimate as final.
    double frozen_value = 0.0;
    double frozen_error = 0.0;

    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    auto fail = [&](const char* why) {
        std::ostringstream msg;
        msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge (" << why << "): error "
            << error << " after " << panels.size() << " panels";
        throw ConvergenceError(msg.str());
    };
    while (error > target()) {
        if (panels.empty()) fail("resolution exhausted");
        if (panels.size() >= opts.max_subdivisions) fail("subdivision limit");
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        const Panel left = apply_rule(f, worst.a, mid);
        const Panel right = apply_rule(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed drift from the incremental updates.
    QuadratureResult out{frozen_value, frozen_error, panels.size()};
    while (!panels.empty()) {
        out.value += panels.top().value;
        out.error += panels.top().error;
        panels.pop();
    }
    return out;
}

double integrate_gauss8(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

}  // namespace ehpc
