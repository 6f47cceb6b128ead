// SPDX-License-Identifier: Apache-2.0
//
// Scalar model ODEs u'' = G(t) u and the comparison oracles built on them:
// Sturm comparison, Wronskian-conserving ratio limits, and the shift/scale
// growth limits of the model warp h.
//
// Integrator: classical RK4 on (u, u'), fixed step, certified by Richardson
// step-halving (global order 4, so err(h/2) ~ |u_h - u_{h/2}| / 15).
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ancurv/curvature_profile.hpp"
#include "ancurv/grid_function.hpp"

namespace ancurv {

struct ComparisonDiagnostics {
    double max_violation = 0.0;
    std::optional<double> violation_location;
    std::size_t checked_points = 0;
    std::size_t singular_points = 0;  // nodes skipped for tiny denominators
    bool ok() const { return !violation_location.has_value(); }

    void record(double excess, double where) {
        if (excess > max_violation) {
            max_violation = excess;
            violation_location = where;
        }
    }
};

namespace detail {

// One fixed-step RK4 pass for u'' = G(t) u. Returns (values, derivs).
template <class Coef>
void rk4_second_order(const Coef& G, double u0, double du0, double T, std::size_t steps,
                      std::vector<double>& u, std::vector<double>& du) {
    const double h = T / static_cast<double>(steps);
    u.assign(steps + 1, 0.0);
    du.assign(steps + 1, 0.0);
    u[0] = u0;
    du[0] = du0;
    double y = u0, v = du0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const double g0 = G(t);
        const double gh = G(t + 0.5 * h);
        const double g1 = G(t + h);
        const double k1y = v, k1v = g0 * y;
        const double k2y = v + 0.5 * h * k1v, k2v = gh * (y + 0.5 * h * k1y);
        const double k3y = v + 0.5 * h * k2v, k3v = gh * (y + 0.5 * h * k2y);
        const double k4y = v + h * k3v, k4v = g1 * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        u[i + 1] = y;
        du[i + 1] = v;
    }
}

}  // namespace detail

struct IvpSolution {
    GridFunction u;
    double error_estimate = 0.0;  // certified global estimate from step halving
};

// Solves u'' = G(t) u, u(0)=u0, u'(0)=du0 on [0, T] with global error
// <= tol * (1 + max|u|).
template <class Coef>
IvpSolution solve_linear_ivp(const Coef& G, double u0, double du0, double T, double tol) {
    if (!(T > 0.0)) throw std::domain_error("solve_linear_ivp: T must be positive");
    if (!(tol > 0.0)) throw std::domain_error("solve_linear_ivp: tol must be positive");

    const double dt0 = std::min(1e-3, std::pow(tol, 0.25));
    auto steps = static_cast<std::size_t>(std::ceil(T / dt0));
    steps = std::max<std::size_t>(steps, 16);

    std::vector<double> uc, dc;
    detail::rk4_second_order(G, u0, du0, T, steps, uc, dc);
    constexpr std::size_t max_steps = 1u << 26;
    double estimate = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<double> uf, df;
        detail::rk4_second_order(G, u0, du0, T, 2 * steps, uf, df);
        double diff = 0.0, umax = 0.0;
        for (std::size_t i = 0; i <= steps; ++i) {
            diff = std::max(diff, std::abs(uc[i] - uf[2 * i]));
            diff = std::max(diff, std::abs(dc[i] - df[2 * i]));
            umax = std::max(umax, std::abs(uf[2 * i]));
        }
        estimate = diff / 15.0;
        if (estimate <= tol * (1.0 + umax)) {
            const double dt = T / static_cast<double>(2 * steps);
            return {GridFunction(0.0, dt, std::move(uf), std::move(df)), estimate};
        }
        steps *= 2;
        if (steps > max_steps)
            throw std::runtime_error("solve_linear_ivp: tolerance unreachable, achieved " +
                                     std::to_string(estimate));
        uc = std::move(uf);
        dc = std::move(df);
    }
}

inline IvpSolution solve_linear_ivp(const CurvatureProfile& profile, double u0, double du0,
                                    double T, double tol) {
    return solve_linear_ivp([&profile](double t) { return profile(t); }, u0, du0, T, tol);
}

// Composite Simpson over the full grid (values only); an odd interval
// count is closed with the 3/8 rule to keep fourth order.
inline double integrate_nodes(const std::vector<double>& v, double dt) {
    if (v.size() < 2) return 0.0;
    std::size_t n = v.size() - 1;
    double acc = 0.0;
    std::size_t stop = n;
    if (n % 2 != 0) {
        if (n < 3) return 0.5 * dt * (v[0] + v[1]);
        stop = n - 3;
        acc += 3.0 * dt / 8.0 * (v[n - 3] + 3.0 * v[n - 2] + 3.0 * v[n - 1] + v[n]);
    }
    for (std::size_t i = 0; i + 2 <= stop; i += 2)
        acc += dt / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
    return acc;
}

// Estimates lim h' = 1 + int_0^inf lambda h via the solved grid. The tail
// past T is certified by int_T^inf lambda h <= e^{b0} int_T^inf s lambda(s) ds.
inline double hprime_limit(const GridFunction& h, const CurvatureProfile& profile,
                           double tail_tol = 1e-8) {
    const double T = h.t_back();
    const double tail = std::exp(profile.b0()) * profile.b0_tail(T);
    if (!(tail <= tail_tol))
        throw std::runtime_error("hprime_limit: tail not converged at T=" + std::to_string(T));
    std::vector<double> integrand(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) integrand[i] = profile(h.node(i)) * h.value(i);
    return 1.0 + integrate_nodes(integrand, h.dt());
}

// Sturm comparison check: phi'/phi <= psi'/psi and psi >= phi on (0, T),
// given phi(0) = psi(0) = 1 and psi'(0) >= phi'(0).
inline ComparisonDiagnostics sturm_compare(const GridFunction& phi, const GridFunction& psi,
                                           double T, double tol = 1e-9) {
    if (std::abs(phi.t0()) > 0.0 || std::abs(psi.t0()) > 0.0 ||
        std::abs(phi.dt() - psi.dt()) > 1e-14 * phi.dt())
        throw std::invalid_argument("sturm_compare: grids must match");
    if (std::abs(phi.value(0) - 1.0) > 1e-12 || std::abs(psi.value(0) - 1.0) > 1e-12)
        throw std::invalid_argument("sturm_compare: initial values must be 1");
    if (psi.deriv(0) < phi.deriv(0) - 1e-12)
        throw std::invalid_argument("sturm_compare: psi'(0) must dominate phi'(0)");

    constexpr double denom_floor = 1e-10;
    ComparisonDiagnostics diag;
    for (std::size_t i = 1; i < phi.size() && phi.node(i) < T; ++i) {
        const double t = phi.node(i);
        const double p = phi.value(i), q = psi.value(i);
        if (p <= 0.0)
            throw std::domain_error("sturm_compare: phi not positive inside (0,T) at t=" +
                                    std::to_string(t));
        ++diag.checked_points;
        if (p - q > tol) diag.record(p - q, t);
        if (std::abs(p) <= denom_floor || std::abs(q) <= denom_floor) {
            ++diag.singular_points;
            continue;
        }
        const double excess = phi.deriv(i) / p - psi.deriv(i) / q;
        if (excess > tol) diag.record(excess, t);
    }
    return diag;
}

struct WronskianLimits {
    double ratio_h2_h1 = 0.0;
    double ratio_dh2_dh1 = 0.0;
    double bound = 0.0;              // int_0^inf G
    double identity_residual = 0.0;  // ratio difference minus 1/(h1 h1')
    double wronskian_drift = 0.0;    // max |h2 h1' - h1 h2' - 1|
};

// Ratio limits of the fundamental pair: solves h1 (0,1) and h2 (1,0) for G and reports
// both ratios at T together with the conserved-Wronskian health check.
inline WronskianLimits wronskian_limit(const CurvatureProfile& G, double T, double tol = 1e-10) {
    const auto h1 = solve_linear_ivp(G, 0.0, 1.0, T, tol);
    const auto h2 = solve_linear_ivp(G, 1.0, 0.0, T, tol);
    const auto& f1 = h1.u;
    const auto& f2 = h2.u;

    WronskianLimits out;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const double w = f2.value(i) * f1.deriv(i) - f1.value(i) * f2.deriv(i);
        out.wronskian_drift = std::max(out.wronskian_drift, std::abs(w - 1.0));
    }
    if (out.wronskian_drift > 100.0 * tol)
        throw std::runtime_error("wronskian_limit: conservation drift " +
                                 std::to_string(out.wronskian_drift));

    const std::size_t last = f1.size() - 1;
    out.ratio_h2_h1 = f2.value(last) / f1.value(last);
    out.ratio_dh2_dh1 = f1.deriv(last) == 0.0 ? 0.0 : f2.deriv(last) / f1.deriv(last);
    out.bound = G.b1();
    out.identity_residual = (out.ratio_h2_h1 - out.ratio_dh2_dh1) -
                            1.0 / (f1.value(last) * f1.deriv(last));
    const double cap = out.bound + 1.0 / T + 100.0 * tol;
    if (out.ratio_h2_h1 > cap || out.ratio_dh2_dh1 > out.bound + 100.0 * tol)
        throw std::runtime_error("wronskian_limit: ratio exceeds the integral bound");
    return out;
}

// Growth-limit diagnostics: (h(T-C)/h(T), h(TC)/h(T)).
inline std::pair<double, double> shift_scale_limits(const GridFunction& h, double C, double T) {
    if (!(C > 0.0)) throw std::domain_error("shift_scale_limits: C must be positive");
    if (T <= C) throw std::domain_error("shift_scale_limits: need T > C for the shift ratio");
    const double reach = T * std::max(1.0, C);
    if (reach > h.t_back() + 1e-12)
        throw std::domain_error("shift_scale_limits: grid does not reach T*max(1,C)");
    const double hT = h(T);
    return {h(T - C) / hT, h(T * C) / hT};
}

}  // namespace ancurv
