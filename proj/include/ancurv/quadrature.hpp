// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Simpson quadrature with a running certified error bound.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ancurv {

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;  // accumulated Richardson estimate
    std::int64_t evaluations = 0;
};

namespace detail {

template <class F>
double simpson_adapt(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, QuadResult& acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    acc.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        acc.error_bound += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc) +
           simpson_adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance tol.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 48) {
    if (!(tol > 0.0)) throw std::domain_error("integrate_adaptive: tol must be positive");
    QuadResult acc;
    if (a == b) return acc;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    acc.evaluations = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    acc.value = detail::simpson_adapt(f, a, b, fa, fm, fb, whole, tol, max_depth, acc);
    return acc;
}

}  // namespace ancurv
