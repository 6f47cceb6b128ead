// SPDX-License-Identifier: Apache-2.0
//
// Proof-level ABP machinery along a single geodesic: the matrix Jacobi
// system P'' = -P S(t) with Riccati variable Q = P^{-1} P', the trace
// Riccati inequality, the scalar comparison pair (psi1, psi2) driven by
// Lambda(t) = amplitude * lambda(|d - t*speed|), and the determinant bounds
// they imply. Everything here is a numerical verifier: a violated bound is
// reported as a counterexample flag and always means a bug or inadmissible
// input, not new mathematics.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ancurv/curvature_profile.hpp"
#include "ancurv/grid_function.hpp"
#include "ancurv/model_manifold.hpp"
#include "ancurv/ode.hpp"
#include "ancurv/report.hpp"
#include "ancurv/sobolev.hpp"

namespace ancurv {

using Matrix = Eigen::MatrixXd;

struct JacobiSystem {
    int dim;                                   // matrix size m
    std::function<Matrix(double)> curvature;   // symmetric S(t)
    Matrix P0, dP0;
    double horizon;                            // integrate on [0, horizon]
    double speed;                              // |Du| (or |D^Sigma u + y|), in (0,1)

    void validate() const {
        if (dim < 2) throw std::domain_error("JacobiSystem: dim must be >= 2");
        if (!(horizon > 0.0)) throw std::domain_error("JacobiSystem: horizon must be positive");
        if (!(speed > 0.0 && speed < 1.0))
            throw std::domain_error("JacobiSystem: speed must lie in (0,1)");
        if (P0.rows() != dim || P0.cols() != dim || dP0.rows() != dim || dP0.cols() != dim)
            throw std::invalid_argument("JacobiSystem: initial data has wrong shape");
        for (double t : {0.0, 0.5 * horizon, horizon}) {
            const Matrix S = curvature(t);
            if (S.rows() != dim || S.cols() != dim ||
                (S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10)
                throw std::invalid_argument("JacobiSystem: curvature operator is not symmetric");
        }
    }
};

struct ConjugatePointError : std::runtime_error {
    explicit ConjugatePointError(double t)
        : std::runtime_error("conjugate point: det P vanished at t=" + std::to_string(t)),
          location(t) {}
    double location;
};

struct JacobiPath {
    double dt = 0.0;
    std::vector<Matrix> P, dP;
    std::vector<double> detP;
    std::vector<Matrix> Q;        // Q[i] valid for i >= q_begin
    std::size_t q_begin = 0;
    double q_symmetry_residual = 0.0;
    double error_estimate = 0.0;

    std::size_t size() const { return P.size(); }
    double node(std::size_t i) const { return dt * static_cast<double>(i); }
    double trQ(std::size_t i) const { return Q[i].trace(); }

    // det P as a grid function; derivative channel d/dt det P = det P tr Q
    GridFunction det_grid() const {
        std::vector<double> d(detP.size());
        for (std::size_t i = 0; i < detP.size(); ++i)
            d[i] = i >= q_begin ? detP[i] * Q[i].trace()
                                : (i + 1 < detP.size() ? (detP[i + 1] - detP[i]) / dt : 0.0);
        return GridFunction(0.0, dt, detP, std::move(d));
    }
};

namespace detail {

inline void rk4_jacobi(const JacobiSystem& sys, std::size_t steps, std::vector<Matrix>& P,
                       std::vector<Matrix>& V) {
    const double h = sys.horizon / static_cast<double>(steps);
    P.assign(steps + 1, Matrix());
    V.assign(steps + 1, Matrix());
    Matrix p = sys.P0, v = sys.dP0;
    P[0] = p;
    V[0] = v;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const Matrix S0 = sys.curvature(t);
        const Matrix Sh = sys.curvature(t + 0.5 * h);
        const Matrix S1 = sys.curvature(t + h);
        const Matrix k1p = v, k1v = -p * S0;
        const Matrix k2p = v + 0.5 * h * k1v, k2v = -(p + 0.5 * h * k1p) * Sh;
        const Matrix k3p = v + 0.5 * h * k2v, k3v = -(p + 0.5 * h * k2p) * Sh;
        const Matrix k4p = v + h * k3v, k4v = -(p + h * k3p) * S1;
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        P[i + 1] = p;
        V[i + 1] = v;
    }
}

}  // namespace detail

// Integrates the Jacobi system with step-halving certification, forms
// det P and Q = P^{-1} P'. Q starts at t_min = 10*dt when P0 is singular
// (submanifold block data has det P ~ t^p there).
inline JacobiPath integrate_jacobi(const JacobiSystem& sys, double tol = 1e-10) {
    sys.validate();
    if (!(tol > 0.0)) throw std::domain_error("integrate_jacobi: tol must be positive");

    const double dt0 = std::min(1e-3, std::pow(tol, 0.25));
    auto steps = static_cast<std::size_t>(std::ceil(sys.horizon / dt0));
    steps = std::max<std::size_t>(steps, 64);

    std::vector<Matrix> Pc, Vc, Pf, Vf;
    detail::rk4_jacobi(sys, steps, Pc, Vc);
    constexpr std::size_t max_steps = 1u << 22;
    double estimate;
    while (true) {
        detail::rk4_jacobi(sys, 2 * steps, Pf, Vf);
        double diff = 0.0, pmax = 0.0;
        for (std::size_t i = 0; i <= steps; ++i) {
            diff = std::max(diff, (Pc[i] - Pf[2 * i]).cwiseAbs().maxCoeff());
            diff = std::max(diff, (Vc[i] - Vf[2 * i]).cwiseAbs().maxCoeff());
            pmax = std::max(pmax, Pf[2 * i].cwiseAbs().maxCoeff());
        }
        estimate = diff / 15.0;
        if (estimate <= tol * (1.0 + pmax)) break;
        steps *= 2;
        if (steps > max_steps)
            throw std::runtime_error("integrate_jacobi: tolerance unreachable, achieved " +
                                     std::to_string(estimate));
        Pc.swap(Pf);
        Vc.swap(Vf);
    }

    JacobiPath path;
    path.dt = sys.horizon / static_cast<double>(2 * steps);
    path.P = std::move(Pf);
    path.dP = std::move(Vf);
    path.error_estimate = estimate;

    const bool singular_start = std::abs(sys.P0.determinant()) < 1e-14;
    const double t_min = 10.0 * path.dt;
    path.q_begin = 0;
    if (singular_start)
        while (path.q_begin < path.size() && path.node(path.q_begin) < t_min) ++path.q_begin;

    constexpr double det_floor = 1e-10;
    path.detP.resize(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        path.detP[i] = path.P[i].determinant();
        const bool must_be_positive = i >= std::max<std::size_t>(path.q_begin, 1);
        if (must_be_positive && path.detP[i] <= det_floor)
            throw ConjugatePointError(path.node(i));
    }

    path.Q.resize(path.size());
    for (std::size_t i = path.q_begin; i < path.size(); ++i) {
        path.Q[i] = path.P[i].partialPivLu().solve(path.dP[i]);
        const double asym = (path.Q[i] - path.Q[i].transpose()).cwiseAbs().maxCoeff();
        path.q_symmetry_residual = std::max(path.q_symmetry_residual, asym);
    }
    return path;
}

// Trace-Riccati inequality along the path:
//   d/dt tr Q + (tr Q)^2 / m  <=  (m-1) speed^2 lambda(|d0 - t*speed|),
// derivative by centered differences.
inline ComparisonDiagnostics trace_riccati_check(const JacobiPath& path, const JacobiSystem& sys,
                                                 const CurvatureProfile& profile,
                                                 double base_distance, double tol = 1e-6) {
    const int m = sys.dim;
    ComparisonDiagnostics diag;
    for (std::size_t i = std::max<std::size_t>(path.q_begin + 1, 1); i + 1 < path.size(); ++i) {
        const double t = path.node(i);
        const double dtr = (path.trQ(i + 1) - path.trQ(i - 1)) / (2.0 * path.dt);
        const double tr = path.trQ(i);
        const double lhs = dtr + tr * tr / m;
        const double rhs = (m - 1) * sys.speed * sys.speed *
                           profile(std::abs(base_distance - t * sys.speed));
        ++diag.checked_points;
        if (lhs - rhs > tol) diag.record(lhs - rhs, t);
    }
    return diag;
}

// Scalar Riccati driver Lambda(t) = amplitude * lambda(|d - t*speed|).
// amplitude carries the direction-dependent factor ((n-1)/n |Du|^2 in the
// domain case); its integrals have the closed reflection split
//   int_0^inf Lambda = (amplitude/speed) (int_0^d lambda + b1),
//   int_0^inf t Lambda = (amplitude/speed^2)
//                        (d int_0^d lambda - int_0^d s lambda + d b1 + b0).
struct LambdaAlong {
    CurvatureProfile profile;
    double amplitude;
    double speed;
    double base_distance;

    double operator()(double t) const {
        return amplitude * profile(std::abs(base_distance - t * speed));
    }

    double integral(double quad_tol = 1e-12) const {
        const double head =
            base_distance > 0.0
                ? integrate_adaptive([this](double s) { return profile(s); }, 0.0, base_distance,
                                     quad_tol)
                      .value
                : 0.0;
        return amplitude / speed * (head + profile.b1());
    }

    double first_moment(double quad_tol = 1e-12) const {
        double head = 0.0, head_s = 0.0;
        if (base_distance > 0.0) {
            head = integrate_adaptive([this](double s) { return profile(s); }, 0.0, base_distance,
                                      quad_tol)
                       .value;
            head_s = integrate_adaptive([this](double s) { return s * profile(s); }, 0.0,
                                        base_distance, quad_tol)
                         .value;
        }
        return amplitude / (speed * speed) *
               (base_distance * head - head_s + base_distance * profile.b1() + profile.b0());
    }
};

struct PsiBounds {
    GridFunction psi1, psi2;
    double ratio_at_r = 0.0;       // psi2(r)/psi1(r)
    double ratio_bound = 0.0;      // int Lambda + 1/r
    double coarse_ratio_bound = 0.0;
    double first_moment = 0.0;     // int t Lambda
    double first_moment_bound = 0.0;
    bool psi1_bound_ok = false;    // psi1(t) <= t e^{first_moment} nodewise
    double psi1_bound_margin = 0.0;
};

// Comparison solutions psi1 (0,1) and psi2 (1,0) for psi'' = Lambda psi,
// with the ratio and growth bounds they must satisfy.
inline PsiBounds psi_bounds(const LambdaAlong& lam, double r, double r0, double tol = 1e-10) {
    if (!(r > 0.0)) throw std::domain_error("psi_bounds: r must be positive");
    PsiBounds out;
    auto s1 = solve_linear_ivp([&lam](double t) { return lam(t); }, 0.0, 1.0, r, tol);
    auto s2 = solve_linear_ivp([&lam](double t) { return lam(t); }, 1.0, 0.0, r, tol);
    out.psi1 = std::move(s1.u);
    out.psi2 = std::move(s2.u);

    const std::size_t last = out.psi1.size() - 1;
    out.ratio_at_r = out.psi2.value(last) / out.psi1.value(last);
    out.ratio_bound = lam.integral() + 1.0 / r;
    out.coarse_ratio_bound = 2.0 * lam.amplitude / lam.speed * lam.profile.b1() + 1.0 / r;
    if (out.ratio_at_r > out.ratio_bound + 100.0 * tol)
        throw std::runtime_error("psi_bounds: psi2/psi1 exceeds the integral bound");

    out.first_moment = lam.first_moment();
    out.first_moment_bound = lam.amplitude / (lam.speed * lam.speed) *
                             (2.0 * r0 * lam.profile.b1() + lam.profile.b0());
    const double growth = std::exp(out.first_moment);
    out.psi1_bound_margin = std::numeric_limits<double>::infinity();
    out.psi1_bound_ok = true;
    for (std::size_t i = 1; i < out.psi1.size(); ++i) {
        const double margin = out.psi1.node(i) * growth - out.psi1.value(i);
        out.psi1_bound_margin = std::min(out.psi1_bound_margin, margin);
        if (margin < -100.0 * tol) out.psi1_bound_ok = false;
    }
    return out;
}

// Determinant bound along a geodesic (domain case):
//   det P(r) <= e^{(m-1)(2 r0 b1 + b0)} (1/r + f^{1/(m-1)})^m r^m
// under the trace hypothesis tr(dP0)/m <= f^{1/(m-1)} - 2((m-1)/m) b1.
inline InequalityReport det_bound_check(const JacobiSystem& sys, double f_value,
                                        const CurvatureProfile& profile, double r0,
                                        double tol = 1e-9) {
    sys.validate();
    if (!(f_value > 0.0)) throw std::domain_error("det_bound_check: f must be positive");
    const int m = sys.dim;
    const double fpow = std::pow(f_value, 1.0 / (m - 1));
    const double hypothesis = sys.dP0.trace() / m;
    const double cap = fpow - 2.0 * ((m - 1.0) / m) * profile.b1();
    if (hypothesis > cap + 1e-12)
        throw std::domain_error("det_bound_check: trace hypothesis violated (tr dP0/m = " +
                                std::to_string(hypothesis) + " > " + std::to_string(cap) + ")");

    const auto path = integrate_jacobi(sys, tol * 1e-2);
    const double r = sys.horizon;
    const double expf = std::exp((m - 1) * (2.0 * r0 * profile.b1() + profile.b0()));
    const double detP = path.detP.back();
    const double bound = expf * std::pow(1.0 / r + fpow, m) * std::pow(r, m);

    InequalityReport rep;
    rep.theorem = "d3";
    rep.lhs = detP;
    rep.rhs = bound;
    rep.ratio = detP / bound;
    rep.slack = bound - detP;  // margin, nonnegative when the bound holds
    rep.terms["det_P"] = detP;
    rep.terms["bound"] = bound;
    rep.terms["exp_factor"] = expf;
    rep.terms["trace_hypothesis"] = hypothesis;
    rep.terms["q_symmetry_residual"] = path.q_symmetry_residual;
    rep.error_budget = tol;
    rep.status = detP <= bound + tol ? ReportStatus::Ok : ReportStatus::Counterexample;
    rep.inputs = {{"dim", m}, {"r", r}, {"speed", sys.speed}, {"f", f_value}, {"r0", r0},
                  {"profile", profile.to_json()}};
    return rep;
}

// Submanifold block data per the normal-bundle Jacobi system:
//   P0  = [[I_n, 0], [0, 0]],   dP0 = [[A, C], [0, I_p]]
// with A = Hess u - <B, y> (symmetric) and C the second-fundamental-form
// block. The bound is
//   det P(r) <= (1/r + f^{1/(n-1)})^n r^{n+p} e^{(n+p-1)(2 r0 b1 + b0)}
// under tr(A)/n <= f^{1/(n-1)} - 2 b1. With S = 0 the closed form
// det P(t) = t^p det(I + tA) serves as the oracle.
inline InequalityReport submanifold_det_bound_check(const Matrix& A, const Matrix& C, int p,
                                                    double f_value,
                                                    const CurvatureProfile& profile, double r0,
                                                    double r, double speed,
                                                    std::function<Matrix(double)> S = {},
                                                    double tol = 1e-9) {
    const int n = static_cast<int>(A.rows());
    if (p < 2) throw std::domain_error("submanifold_det_bound_check: codimension p must be >= 2");
    if (!(f_value > 0.0))
        throw std::domain_error("submanifold_det_bound_check: f must be positive");
    if (A.cols() != n || C.rows() != n || C.cols() != p)
        throw std::invalid_argument("submanifold_det_bound_check: block shapes");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("submanifold_det_bound_check: A must be symmetric");

    const double fpow = std::pow(f_value, 1.0 / (n - 1));
    if (A.trace() / n > fpow - 2.0 * profile.b1() + 1e-12)
        throw std::domain_error("submanifold_det_bound_check: trace hypothesis violated");

    const int m = n + p;
    const bool euclidean = !S;
    JacobiSystem sys;
    sys.dim = m;
    if (euclidean)
        sys.curvature = [m](double) -> Matrix { return Matrix::Zero(m, m); };
    else
        sys.curvature = std::move(S);
    sys.P0 = Matrix::Zero(m, m);
    sys.P0.topLeftCorner(n, n) = Matrix::Identity(n, n);
    sys.dP0 = Matrix::Zero(m, m);
    sys.dP0.topLeftCorner(n, n) = A;
    sys.dP0.topRightCorner(n, p) = C;
    sys.dP0.bottomRightCorner(p, p) = Matrix::Identity(p, p);
    sys.horizon = r;
    sys.speed = speed;

    const auto path = integrate_jacobi(sys, tol * 1e-2);
    const double detP = path.detP.back();
    const double expf = std::exp((m - 1) * (2.0 * r0 * profile.b1() + profile.b0()));
    const double bound = std::pow(1.0 / r + fpow, n) * std::pow(r, m) * expf;

    InequalityReport rep;
    rep.theorem = "sub1";
    rep.lhs = detP;
    rep.rhs = bound;
    rep.ratio = detP / bound;
    rep.slack = bound - detP;
    rep.terms["det_P"] = detP;
    rep.terms["bound"] = bound;
    rep.terms["q_symmetry_residual"] = path.q_symmetry_residual;
    if (euclidean) {
        const double oracle =
            std::pow(r, p) * (Matrix::Identity(n, n) + r * A).determinant();
        rep.terms["euclidean_oracle"] = oracle;
        rep.terms["oracle_deviation"] = std::abs(detP - oracle);
    }
    rep.error_budget = tol;
    rep.status = detP <= bound + tol ? ReportStatus::Ok : ReportStatus::Counterexample;
    rep.inputs = {{"n", n}, {"p", p}, {"r", r}, {"speed", speed}, {"f", f_value}, {"r0", r0},
                  {"profile", profile.to_json()}};
    return rep;
}

// Radial transport measure estimate: for each r > r0,
//   vol B_{r-r0}(o)  <=  int_Omega e^{(n-1)(2 r0 b1 + b0)} (1/r + f^{1/(n-1)})^n r^n,
// plus the limiting report that recovers the Sobolev constant: dividing by
// n int_0^r h^{n-1} and sending r to infinity gives
//   |B^n| theta <= (e^{2 r0 b1 + b0}/(1+b0))^{n-1} int_Omega f^{n/(n-1)}.
// Requires a normalized density (u'(R) = 1 from the Neumann solve).
inline std::vector<InequalityReport> measure_transport_check(
    const RadialDomain& dom, const RadialDensity& f, const GridFunction& u,
    const CurvatureProfile& profile, const std::vector<double>& radii, double theta,
    const Tolerances& tols = {}) {
    tols.validate();
    const int n = dom.manifold.dimension();
    const double r0 = dom.r0();
    const double b0 = profile.b0(), b1 = profile.b1();
    if (std::abs(u.deriv(u.size() - 1) - 1.0) > 1e-6)
        throw std::domain_error("measure_transport_check: density is not normalized (u'(R) != 1)");

    GrowthEvaluator ge(dom.manifold, profile, tols.ode);
    const double nB = n * unit_ball_volume(n);
    const double expf = std::exp((n - 1) * (2.0 * r0 * b1 + b0));

    std::vector<InequalityReport> out;
    for (double r : radii) {
        if (!(r > r0))
            throw std::domain_error("measure_transport_check: radii must exceed r0");
        const double lhs = nB * ge.warp_cumulative(r - r0);
        const double integral = ball_integral(
            dom,
            [&](double rho) {
                return std::pow(1.0 / r + std::pow(f(rho), 1.0 / (n - 1)), n);
            },
            tols.quad);
        const double rhs = expf * std::pow(r, n) * integral;

        InequalityReport rep;
        rep.theorem = "d4";
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.ratio = lhs / rhs;
        rep.slack = rhs - lhs;
        const double model = n * ge.model_cumulative(r);
        rep.terms["r"] = r;
        rep.terms["normalized_lhs"] = lhs / model;
        rep.terms["normalized_rhs"] = rhs / model;
        rep.error_budget = tols.error_budget();
        rep.status = lhs <= rhs + tols.error_budget() * std::max(1.0, rhs)
                         ? ReportStatus::Ok
                         : ReportStatus::Counterexample;
        out.push_back(std::move(rep));
    }

    // limiting report: the Sobolev constant chain after the sandwich
    const double fpow_int = ball_integral(
        dom, [&](double rho) { return std::pow(f(rho), static_cast<double>(n) / (n - 1)); },
        tols.quad);
    InequalityReport lim;
    lim.theorem = "d4-limit";
    lim.lhs = unit_ball_volume(n) * theta;
    lim.rhs = std::pow(std::exp(2.0 * r0 * b1 + b0) / (1.0 + b0), n - 1) * fpow_int;
    lim.ratio = lim.lhs / lim.rhs;
    lim.slack = lim.rhs - lim.lhs;
    lim.terms["rn_over_model_limit"] = 1.0 / std::pow(ge.h_slope(), n - 1);
    lim.terms["hprime_lower_bound"] = 1.0 / std::pow(1.0 + b0, n - 1);
    lim.error_budget = tols.error_budget();
    lim.status = lim.lhs <= lim.rhs + lim.error_budget * std::max(1.0, lim.rhs)
                     ? ReportStatus::Ok
                     : ReportStatus::Counterexample;
    out.push_back(std::move(lim));
    return out;
}

}  // namespace ancurv
