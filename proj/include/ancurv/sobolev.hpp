// SPDX-License-Identifier: Apache-2.0
//
// Domain-case checker: both sides of the sharp Sobolev inequality
//
//   int_dOmega f + int_Omega |Df| + 2(n-1) b1 int_Omega f
//     >= n |B^n|^{1/n} theta^{1/n} ((1+b0)/e^{2 r0 b1 + b0})^{(n-1)/n}
//        (int_Omega f^{n/(n-1)})^{(n-1)/n}
//
// on pole-centered geodesic balls with radial densities, where every
// integral reduces to a 1-D quadrature against the area density
// n|B^n| w(r)^{n-1}. Also the scaling normalization, the radial Neumann
// solve it feeds, and the pointwise Hessian-trace bound.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "ancurv/grid_function.hpp"
#include "ancurv/model_manifold.hpp"
#include "ancurv/ode.hpp"
#include "ancurv/quadrature.hpp"
#include "ancurv/report.hpp"

namespace ancurv {

struct RadialDomain {
    ModelManifold manifold;
    double radius;  // pole-centered geodesic ball

    RadialDomain(ModelManifold m, double R) : manifold(std::move(m)), radius(R) {
        if (!(R > 0.0)) throw std::domain_error("RadialDomain: radius must be positive");
        if (R > manifold.r_max()) throw std::domain_error("RadialDomain: radius beyond warp range");
    }

    // max distance to the base point; the base point is the pole
    double r0() const { return radius; }
};

// Positive radial density with value/derivative callables plus the sampled
// grid view. Radial smoothness at the pole needs f'(0) = 0; densities with
// a pole kink (for example e^{-r}) must be admitted explicitly.
class RadialDensity {
  public:
    static RadialDensity constant(double value, double R, std::size_t nodes = 513) {
        if (!(value > 0.0)) throw std::domain_error("RadialDensity: value must be positive");
        return RadialDensity([value](double) { return value; }, [](double) { return 0.0; }, R,
                             false, nodes, "constant");
    }

    static RadialDensity from_callables(std::function<double(double)> f,
                                        std::function<double(double)> fp, double R,
                                        bool allow_pole_slope = false, std::size_t nodes = 513,
                                        std::string label = "custom") {
        return RadialDensity(std::move(f), std::move(fp), R, allow_pole_slope, nodes,
                             std::move(label));
    }

    double operator()(double r) const { return f_(r); }
    double deriv(double r) const { return fp_(r); }
    double radius() const { return R_; }
    const GridFunction& grid() const { return grid_; }
    const std::string& label() const { return label_; }

    RadialDensity scaled(double c) const {
        if (!(c > 0.0)) throw std::domain_error("RadialDensity: scale must be positive");
        auto f = f_;
        auto fp = fp_;
        return RadialDensity([f, c](double r) { return c * f(r); },
                             [fp, c](double r) { return c * fp(r); }, R_, true,
                             grid_.size(), label_);
    }

  private:
    RadialDensity(std::function<double(double)> f, std::function<double(double)> fp, double R,
                  bool allow_pole_slope, std::size_t nodes, std::string label)
        : f_(std::move(f)), fp_(std::move(fp)), R_(R), label_(std::move(label)),
          grid_(GridFunction::sample(f_, fp_, 0.0, R, nodes)) {
        if (!(R > 0.0)) throw std::domain_error("RadialDensity: radius must be positive");
        for (std::size_t i = 0; i < grid_.size(); ++i)
            if (!(grid_.value(i) > 0.0))
                throw std::domain_error("RadialDensity: density must be strictly positive");
        if (!allow_pole_slope && std::abs(fp_(0.0)) > 1e-10)
            throw std::domain_error(
                "RadialDensity: f'(0) != 0 is not smooth at the pole; pass allow_pole_slope to "
                "admit it anyway");
    }

    std::function<double(double)> f_, fp_;
    double R_;
    std::string label_;
    GridFunction grid_;
};

// n |B^n| int_0^R g(r) w(r)^{n-1} dr
inline double ball_integral(const RadialDomain& dom, const std::function<double(double)>& g,
                            double quad_tol) {
    const int n = dom.manifold.dimension();
    const double nB = n * unit_ball_volume(n);
    const auto q = integrate_adaptive(
        [&](double r) { return g(r) * std::pow(dom.manifold.warp(r), n - 1); }, 0.0, dom.radius,
        quad_tol);
    return nB * q.value;
}

// f-weighted boundary area: n |B^n| f(R) w(R)^{n-1}
inline double boundary_integral(const RadialDomain& dom, const RadialDensity& f) {
    const int n = dom.manifold.dimension();
    return n * unit_ball_volume(n) * f(dom.radius) *
           std::pow(dom.manifold.warp(dom.radius), n - 1);
}

namespace detail {

struct SobolevSides {
    double boundary, gradient, b1_term, fpow_integral;
};

inline SobolevSides sobolev_sides(const RadialDomain& dom, const RadialDensity& f, double b1,
                                  double quad_tol) {
    const int n = dom.manifold.dimension();
    SobolevSides s{};
    s.boundary = boundary_integral(dom, f);
    s.gradient = ball_integral(dom, [&](double r) { return std::abs(f.deriv(r)); }, quad_tol);
    s.b1_term =
        2.0 * (n - 1) * b1 * ball_integral(dom, [&](double r) { return f(r); }, quad_tol);
    s.fpow_integral = ball_integral(
        dom, [&](double r) { return std::pow(f(r), static_cast<double>(n) / (n - 1)); }, quad_tol);
    return s;
}

}  // namespace detail

// Theorem-style Sobolev report on a pole-centered ball.
inline InequalityReport theorem11_report(const RadialDomain& dom, const RadialDensity& f,
                                         const CurvatureProfile& profile, double theta,
                                         const Tolerances& tols = {}) {
    tols.validate();
    const int n = dom.manifold.dimension();
    const auto sides = detail::sobolev_sides(dom, f, profile.b1(), tols.quad);

    InequalityReport rep;
    rep.theorem = "thm11";
    rep.terms["boundary_term"] = sides.boundary;
    rep.terms["gradient_term"] = sides.gradient;
    rep.terms["b1_term"] = sides.b1_term;
    rep.lhs = sides.boundary + sides.gradient + sides.b1_term;

    const double theta_factor = std::pow(theta, 1.0 / n);
    const double corr = correction_factor(profile.b0(), profile.b1(), dom.r0(),
                                          (n - 1.0) / n);
    rep.terms["theta_factor"] = theta_factor;
    rep.terms["correction_factor"] = corr;
    rep.rhs = n * std::pow(unit_ball_volume(n), 1.0 / n) * theta_factor * corr *
              std::pow(sides.fpow_integral, (n - 1.0) / n);
    rep.error_budget = tols.error_budget();
    rep.inputs = {{"manifold", dom.manifold.to_json()},
                  {"R", dom.radius},
                  {"f", f.label()},
                  {"profile", profile.to_json()},
                  {"theta", theta}};
    rep.finalize(/*asserted=*/true);
    return rep;
}

// Isoperimetric corollary: |dOmega| >= (n|B^n|^{1/n} theta^{1/n} corr -
// 2(n-1) b1 |Omega|^{1/n}) |Omega|^{(n-1)/n}. rhs <= 0 is the trivial regime.
inline InequalityReport isoperimetric_report(const RadialDomain& dom,
                                             const CurvatureProfile& profile, double theta,
                                             const Tolerances& tols = {}) {
    tols.validate();
    const int n = dom.manifold.dimension();
    const double nB = n * unit_ball_volume(n);
    const double area = nB * std::pow(dom.manifold.warp(dom.radius), n - 1);
    const auto vol_q = integrate_adaptive(
        [&](double r) { return std::pow(dom.manifold.warp(r), n - 1); }, 0.0, dom.radius,
        tols.quad);
    const double volume = nB * vol_q.value;

    const double theta_factor = std::pow(theta, 1.0 / n);
    const double corr = correction_factor(profile.b0(), profile.b1(), dom.r0(), (n - 1.0) / n);
    const double coeff = n * std::pow(unit_ball_volume(n), 1.0 / n) * theta_factor * corr -
                         2.0 * (n - 1) * profile.b1() * std::pow(volume, 1.0 / n);

    InequalityReport rep;
    rep.theorem = "cor13";
    rep.lhs = area;
    rep.rhs = coeff * std::pow(volume, (n - 1.0) / n);
    rep.terms["boundary_term"] = area;
    rep.terms["volume"] = volume;
    rep.terms["coefficient"] = coeff;
    rep.terms["theta_factor"] = theta_factor;
    rep.terms["correction_factor"] = corr;
    rep.error_budget = tols.error_budget();
    rep.inputs = {{"manifold", dom.manifold.to_json()},
                  {"R", dom.radius},
                  {"profile", profile.to_json()},
                  {"theta", theta}};
    rep.finalize(/*asserted=*/true);
    return rep;
}

struct NormalizationResult {
    double scale;  // c with f_normalized = c * f
    RadialDensity density;
};

// Unique c > 0 with c*LHS1 = n c^{n/(n-1)} RHS1, i.e.
// c^{1/(n-1)} = LHS1 / (n RHS1); closed form, no iteration.
inline NormalizationResult normalize_density(const RadialDomain& dom, const RadialDensity& f,
                                             const CurvatureProfile& profile,
                                             const Tolerances& tols = {}) {
    tols.validate();
    const int n = dom.manifold.dimension();
    const auto sides = detail::sobolev_sides(dom, f, profile.b1(), tols.quad);
    const double lhs1 = sides.boundary + sides.gradient + sides.b1_term;
    const double c = std::pow(lhs1 / (n * sides.fpow_integral), n - 1.0);
    return {c, f.scaled(c)};
}

// Radial reduction of the Neumann problem div(f Du) = n f^{n/(n-1)}
// - 2(n-1) b1 f - |Df|:
//   w^{n-1} f u' (r) = int_0^r w^{n-1} (n f^{n/(n-1)} - 2(n-1) b1 f - |f'|).
// Returns u (values) and u' (derivs) on a uniform grid; u'(R) = 1 within
// 10*ode_tol certifies the normalization, anything worse throws.
inline GridFunction solve_radial_neumann(const RadialDomain& dom, const RadialDensity& f,
                                         const CurvatureProfile& profile,
                                         std::size_t nodes = 4097, const Tolerances& tols = {}) {
    tols.validate();
    const int n = dom.manifold.dimension();
    const double b1 = profile.b1();
    const double R = dom.radius;
    const double np = static_cast<double>(n) / (n - 1);

    auto source = [&](double r) {
        // w^{n-1} (n f^{n/(n-1)} - 2(n-1) b1 f - |f'|)
        return std::pow(dom.manifold.warp(r), n - 1) *
               (n * std::pow(f(r), np) - 2.0 * (n - 1) * b1 * f(r) - std::abs(f.deriv(r)));
    };

    const double dr = R / static_cast<double>(nodes - 1);
    std::vector<double> du(nodes, 0.0);
    double flux = 0.0;  // cumulative Simpson with midpoints
    for (std::size_t i = 1; i < nodes; ++i) {
        const double r0 = (i - 1) * dr, r1 = i * dr;
        flux += dr / 6.0 * (source(r0) + 4.0 * source(0.5 * (r0 + r1)) + source(r1));
        du[i] = flux / (std::pow(dom.manifold.warp(r1), n - 1) * f(r1));
    }

    const double mismatch = std::abs(du.back() - 1.0);
    if (mismatch > 10.0 * tols.ode)
        throw std::runtime_error("solve_radial_neumann: u'(R) off by " + std::to_string(mismatch) +
                                 "; density is not normalized");

    // u'' from the flux identity, for the integration of u and for
    // Laplacian consumers: u'' = (raw_source - u' ((n-1) w'/w f + f')) / f
    std::vector<double> ddu(nodes, 0.0);
    auto raw = [&](double r) {
        return n * std::pow(f(r), np) - 2.0 * (n - 1) * b1 * f(r) - std::abs(f.deriv(r));
    };
    ddu[0] = raw(0.0) / (n * f(0.0));
    for (std::size_t i = 1; i < nodes; ++i) {
        const double r = i * dr;
        const double w = dom.manifold.warp(r), wd = dom.manifold.warp_d(r);
        ddu[i] = (raw(r) - du[i] * ((n - 1) * wd / w * f(r) + f.deriv(r))) / f(r);
    }

    GridFunction uprime(0.0, dr, du, ddu);
    auto u = uprime.cumulative_integral();
    return GridFunction(0.0, dr, std::move(u), std::move(du));
}

// Pointwise bound Delta u / n <= f^{1/(n-1)} - 2((n-1)/n) b1 on the set
// where |u'| < 1, with Delta u = u'' + (n-1)(w'/w) u' and u'' by centered
// differences. Checked from the first interior node. Constant densities sit
// exactly at equality, so the default tolerance absorbs the O(dr^2)
// difference error.
inline ComparisonDiagnostics hessian_trace_bound_check(const GridFunction& u,
                                                       const RadialDensity& f,
                                                       const CurvatureProfile& profile,
                                                       const RadialDomain& dom,
                                                       double tol = 1e-6) {
    const int n = dom.manifold.dimension();
    const double b1 = profile.b1();
    ComparisonDiagnostics diag;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double up = u.deriv(i);
        if (!(std::abs(up) < 1.0)) continue;  // outside the set U
        const double r = u.node(i);
        const double upp = (u.deriv(i + 1) - u.deriv(i - 1)) / (2.0 * u.dt());
        const double lap = upp + (n - 1) * dom.manifold.warp_d(r) / dom.manifold.warp(r) * up;
        const double bound = std::pow(f(r), 1.0 / (n - 1)) - 2.0 * ((n - 1.0) / n) * b1;
        ++diag.checked_points;
        const double excess = lap / n - bound;
        if (excess > tol) diag.record(excess, r);
    }
    return diag;
}

}  // namespace ancurv
