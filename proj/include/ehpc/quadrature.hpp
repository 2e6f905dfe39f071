#pragma once

#include <cstddef>
#include <functional>

namespace ehpc {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_subdivisions = 10000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// error is at most max(abs_tol, rel_tol * |I|). Exceeding max_subdivisions
/// throws ConvergenceError; a result is never returned unconverged.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// Fixed 8-point Gauss-Legendre rule on [a, b].
double integrate_gauss8(const std::function<double(double)>& f, double a, double b);

}  // namespace ehpc
