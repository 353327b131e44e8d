// Adaptive quadrature over the whole real line for heavy-tailed spectral
// integrands.
//
// The integral over nu in (-inf, inf) is mapped to theta in [-pi/2, pi/2]
// through nu = scale * tan(theta), which turns Lorentzian-type tails into a
// smooth compact integrand with no truncation error. The mapped integrand is
// then handled by composite adaptive Simpson refinement.

#pragma once

#include "echomem/model.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace echomem {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    int max_depth_used = 0;
};

namespace detail {

template <typename G>
struct SimpsonWorker {
    const G& g;
    int depth_limit;
    double total_error = 0.0;
    bool depth_exceeded = false;
    int max_depth_used = 0;

    // Recursive bisection; fa/fm/fb are g at the endpoints and midpoint,
    // whole is the Simpson estimate over [a, b], budget the local error
    // allowance.
    double refine(double a, double b, double fa, double fm, double fb,
                  double whole, double budget, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = g(lm);
        const double frm = g(rm);
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double split = left + right;
        const double delta = split - whole;
        max_depth_used = std::max(max_depth_used, depth);
        if (std::abs(delta) <= 15.0 * budget || depth >= depth_limit) {
            if (std::abs(delta) > 15.0 * budget) depth_exceeded = true;
            total_error += std::abs(delta) / 15.0;
            return split + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * budget, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * budget, depth + 1);
    }

    double run(double a, double b, double budget) {
        const double m = 0.5 * (a + b);
        const double fa = g(a);
        const double fm = g(m);
        const double fb = g(b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return refine(a, b, fa, fm, fb, whole, budget, 1);
    }
};

}  // namespace detail

// Integrate f over (-inf, inf). `scale` sets the tangent-map width and should
// match the broadest structure of the integrand.
template <typename F>
QuadratureResult integrate_real_line(F&& f, double scale, const QuadratureSettings& q) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw QuadratureError("integrate_real_line: scale must be positive and finite");

    const auto g = [&](double theta) {
        const double t = std::tan(theta);
        return f(scale * t) * scale * (1.0 + t * t);
    };

    constexpr int kPanels = 64;
    const double half = std::numbers::pi / 2.0;
    const double panel_width = 2.0 * half / kPanels;

    // First pass with a loose budget fixes the magnitude used for the
    // relative tolerance; a peaked integrand can make the plain panel sum
    // arbitrarily wrong.
    const auto sweep = [&](double budget_total, int depth_limit,
                           detail::SimpsonWorker<decltype(g)>& worker) {
        worker.depth_limit = depth_limit;
        double sum = 0.0;
        for (int i = 0; i < kPanels; ++i) {
            const double a = -half + i * panel_width;
            const double b = a + panel_width;
            sum += worker.run(a, b, budget_total / kPanels);
        }
        return sum;
    };

    detail::SimpsonWorker<decltype(g)> first{g, 0};
    const double rough = sweep(std::max(q.abs_tolerance, 1e-4), q.max_refinement_depth, first);

    detail::SimpsonWorker<decltype(g)> fine{g, 0};
    const double budget = std::max(q.abs_tolerance, q.rel_tolerance * std::abs(rough));
    const double value = sweep(budget, q.max_refinement_depth, fine);

    QuadratureResult r;
    r.value = value;
    r.error_estimate = fine.total_error;
    r.converged = !fine.depth_exceeded;
    r.max_depth_used = fine.max_depth_used;
    return r;
}

// Golden-section search for the maximum of a unimodal function on [lo, hi].
// Derivative-free on purpose: the objectives are quadrature results with
// noise at the tolerance level.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace echomem
