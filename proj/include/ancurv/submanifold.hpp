// SPDX-License-Identifier: Apache-2.0
//
// Submanifold-case checker on analytic specimens in Euclidean ambient
// space: flat balls, round spheres, and spherical caps, all with constant
// density. Every geometric quantity (|Sigma|, |dSigma|, |H|, r0) is closed
// form, so the Michael–Simon-type inequality and its codimension-2
// corollaries can be evaluated to full precision.
//
// The inequalities are *asserted* only when the ambient data is certified
// (profile identically zero and theta = 1). With a nontrivial profile the
// specimen data no longer describes a submanifold of that ambient space,
// so reports are evaluation-only.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ancurv/curvature_profile.hpp"
#include "ancurv/model_manifold.hpp"
#include "ancurv/ode.hpp"
#include "ancurv/quadrature.hpp"
#include "ancurv/report.hpp"

namespace ancurv {

class SubmanifoldSpec {
  public:
    enum class Kind { FlatBall, RoundSphere, SphericalCap };

    static SubmanifoldSpec flat_ball(int n, int p, double rho) {
        return SubmanifoldSpec(n, p, Kind::FlatBall, rho, 0.0);
    }

    // S^n(rho) in R^{n+1} subset R^{n+p}, centered at the base point
    static SubmanifoldSpec round_sphere(int n, int p, double rho) {
        return SubmanifoldSpec(n, p, Kind::RoundSphere, rho, 0.0);
    }

    // polar cap of S^n(rho) with opening angle alpha in (0, pi)
    static SubmanifoldSpec spherical_cap(int n, int p, double rho, double alpha) {
        if (!(alpha > 0.0 && alpha < M_PI))
            throw std::domain_error("spherical_cap: angle must lie in (0, pi)");
        return SubmanifoldSpec(n, p, Kind::SphericalCap, rho, alpha);
    }

    int n() const { return n_; }
    int p() const { return p_; }
    Kind kind() const { return kind_; }
    double rho() const { return rho_; }

    double volume() const {
        switch (kind_) {
            case Kind::FlatBall: return unit_ball_volume(n_) * std::pow(rho_, n_);
            case Kind::RoundSphere:
                return (n_ + 1) * unit_ball_volume(n_ + 1) * std::pow(rho_, n_);
            case Kind::SphericalCap: {
                const auto q = integrate_adaptive(
                    [this](double t) { return std::pow(std::sin(t), n_ - 1); }, 0.0, alpha_,
                    1e-13);
                return n_ * unit_ball_volume(n_) * std::pow(rho_, n_) * q.value;
            }
        }
        return 0.0;
    }

    double boundary_volume() const {
        switch (kind_) {
            case Kind::FlatBall: return n_ * unit_ball_volume(n_) * std::pow(rho_, n_ - 1);
            case Kind::RoundSphere: return 0.0;
            case Kind::SphericalCap:
                return n_ * unit_ball_volume(n_) * std::pow(rho_ * std::sin(alpha_), n_ - 1);
        }
        return 0.0;
    }

    double mean_curvature_norm() const { return kind_ == Kind::FlatBall ? 0.0 : n_ / rho_; }

    bool minimal() const { return mean_curvature_norm() == 0.0; }

    // max distance to the base point (ball/sphere/cap centered at it)
    double r0() const { return rho_; }

    std::string kind_name() const {
        switch (kind_) {
            case Kind::FlatBall: return "FlatBall";
            case Kind::RoundSphere: return "RoundSphere";
            case Kind::SphericalCap: return "SphericalCap";
        }
        return "?";
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j{{"n", n_}, {"p", p_}, {"kind", kind_name()}, {"rho", rho_}};
        if (kind_ == Kind::SphericalCap) j["alpha"] = alpha_;
        return j;
    }

    static SubmanifoldSpec from_json(const nlohmann::json& j) {
        const int n = j.at("n").get<int>();
        const int p = j.at("p").get<int>();
        const double rho = j.at("rho").get<double>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "FlatBall") return flat_ball(n, p, rho);
        if (kind == "RoundSphere") return round_sphere(n, p, rho);
        if (kind == "SphericalCap") return spherical_cap(n, p, rho, j.at("alpha").get<double>());
        throw std::invalid_argument("specimen JSON: unknown kind '" + kind + "'");
    }

  private:
    SubmanifoldSpec(int n, int p, Kind k, double rho, double alpha)
        : n_(n), p_(p), kind_(k), rho_(rho), alpha_(alpha) {
        if (n < 2) throw std::domain_error("SubmanifoldSpec: intrinsic dimension must be >= 2");
        if (p < 1) throw std::domain_error("SubmanifoldSpec: codimension must be >= 1");
        if (!(rho > 0.0)) throw std::domain_error("SubmanifoldSpec: scale must be positive");
    }

    int n_, p_;
    Kind kind_;
    double rho_, alpha_;
};

namespace detail {

inline bool euclidean_ambient(const CurvatureProfile& profile, double theta) {
    return profile.b0() == 0.0 && profile.b1() == 0.0 && std::abs(theta - 1.0) <= 1e-12;
}

}  // namespace detail

// Sobolev inequality for a compact submanifold, codimension p >= 2:
// lhs = f|dSigma| + f|H||Sigma| + 2 n b1 f|Sigma| against the
// ((n+p)|B^{n+p}|/(p|B^p|))^{1/n} constant.
inline InequalityReport theorem14_report(const SubmanifoldSpec& spec, double f_const,
                                         const CurvatureProfile& profile, double theta,
                                         const Tolerances& tols = {}) {
    tols.validate();
    if (spec.p() < 2) throw std::domain_error("theorem14_report: requires codimension p >= 2");
    if (!(f_const > 0.0)) throw std::domain_error("theorem14_report: density must be positive");
    const int n = spec.n(), p = spec.p();

    InequalityReport rep;
    rep.theorem = "thm14";
    rep.terms["boundary_term"] = f_const * spec.boundary_volume();
    rep.terms["gradient_term"] = f_const * spec.mean_curvature_norm() * spec.volume();
    rep.terms["b1_term"] = 2.0 * n * profile.b1() * f_const * spec.volume();
    rep.lhs = rep.terms["boundary_term"] + rep.terms["gradient_term"] + rep.terms["b1_term"];

    const double constant =
        std::pow((n + p) * unit_ball_volume(n + p) / (p * unit_ball_volume(p)), 1.0 / n);
    const double theta_factor = std::pow(theta, 1.0 / n);
    const double corr =
        correction_factor(profile.b0(), profile.b1(), spec.r0(), (n + p - 1.0) / n);
    rep.terms["theta_factor"] = theta_factor;
    rep.terms["correction_factor"] = corr;
    rep.rhs = n * constant * theta_factor * corr *
              std::pow(std::pow(f_const, static_cast<double>(n) / (n - 1)) * spec.volume(),
                       (n - 1.0) / n);
    rep.error_budget = tols.error_budget();
    rep.inputs = {{"specimen", spec.to_json()},
                  {"f", f_const},
                  {"profile", profile.to_json()},
                  {"theta", theta}};
    rep.finalize(detail::euclidean_ambient(profile, theta));
    return rep;
}

// Codimension-2 simplification: the constant collapses to n |B^n|^{1/n}
// via (n+2)|B^{n+2}| = 2|B^2||B^n|.
inline InequalityReport corollary15_report(const SubmanifoldSpec& spec, double f_const,
                                           const CurvatureProfile& profile, double theta,
                                           const Tolerances& tols = {}) {
    tols.validate();
    if (spec.p() != 2) throw std::domain_error("corollary15_report: requires codimension p = 2");
    if (!(f_const > 0.0)) throw std::domain_error("corollary15_report: density must be positive");
    const int n = spec.n();

    InequalityReport rep = theorem14_report(spec, f_const, profile, theta, tols);
    rep.theorem = "cor15";
    const double theta_factor = std::pow(theta, 1.0 / n);
    const double corr = correction_factor(profile.b0(), profile.b1(), spec.r0(), (n + 1.0) / n);
    rep.terms["theta_factor"] = theta_factor;
    rep.terms["correction_factor"] = corr;
    rep.rhs = n * std::pow(unit_ball_volume(n), 1.0 / n) * theta_factor * corr *
              std::pow(std::pow(f_const, static_cast<double>(n) / (n - 1)) * spec.volume(),
                       (n - 1.0) / n);
    rep.finalize(detail::euclidean_ambient(profile, theta));
    return rep;
}

// Isoperimetric corollary for minimal submanifolds of codimension 2:
// |dSigma| >= n (|B^n|^{1/n} theta^{1/n} corr^{(n+1)/n} - 2 b1 |Sigma|^{1/n})
//             |Sigma|^{(n-1)/n}.
inline InequalityReport minimal_isoperimetric_report(const SubmanifoldSpec& spec,
                                                     const CurvatureProfile& profile, double theta,
                                                     const Tolerances& tols = {}) {
    tols.validate();
    if (!spec.minimal())
        throw std::domain_error("minimal_isoperimetric_report: specimen is not minimal");
    if (spec.p() != 2)
        throw std::domain_error("minimal_isoperimetric_report: requires codimension p = 2");
    const int n = spec.n();
    const double vol = spec.volume();

    const double theta_factor = std::pow(theta, 1.0 / n);
    const double corr = correction_factor(profile.b0(), profile.b1(), spec.r0(), (n + 1.0) / n);
    const double coeff = std::pow(unit_ball_volume(n), 1.0 / n) * theta_factor * corr -
                         2.0 * profile.b1() * std::pow(vol, 1.0 / n);

    InequalityReport rep;
    rep.theorem = "cor17";
    rep.lhs = spec.boundary_volume();
    rep.rhs = n * coeff * std::pow(vol, (n - 1.0) / n);
    rep.terms["boundary_term"] = rep.lhs;
    rep.terms["volume"] = vol;
    rep.terms["coefficient"] = coeff;
    rep.terms["theta_factor"] = theta_factor;
    rep.terms["correction_factor"] = corr;
    rep.error_budget = tols.error_budget();
    rep.inputs = {{"specimen", spec.to_json()},
                  {"profile", profile.to_json()},
                  {"theta", theta}};
    rep.finalize(detail::euclidean_ambient(profile, theta));
    return rep;
}

// Pointwise Hessian-trace bound of the constant-density reduction:
// with Delta u = n f^{1/(n-1)} - 2 n b1 - |H| constant,
//   (Delta u - <H,y>)/n <= f^{1/(n-1)} - 2 b1
// over all admissible (|Du|, |y|) with |Du|^2 + |y|^2 < 1 and <H,y> ranging
// over [-|H||y|, |H||y|].
inline ComparisonDiagnostics lemma31_bound_check(double f_const, double b1, double H_norm,
                                                 const std::vector<std::pair<double, double>>& pairs,
                                                 int n = 3, int inner_samples = 21,
                                                 double tol = 1e-12) {
    if (!(f_const > 0.0)) throw std::domain_error("lemma31_bound_check: density must be positive");
    const double fpow = std::pow(f_const, 1.0 / (n - 1));
    const double laplacian = n * fpow - 2.0 * n * b1 - H_norm;
    ComparisonDiagnostics diag;
    for (const auto& [du, y] : pairs) {
        if (!(du * du + y * y < 1.0))
            throw std::domain_error("lemma31_bound_check: pair outside the admissible disc");
        for (int k = 0; k < inner_samples; ++k) {
            const double s = inner_samples == 1
                                 ? -1.0
                                 : -1.0 + 2.0 * k / static_cast<double>(inner_samples - 1);
            const double hy = s * H_norm * y;  // <H, y> within Cauchy-Schwarz range
            ++diag.checked_points;
            const double excess = (laplacian - hy) / n - (fpow - 2.0 * b1);
            if (excess > tol) diag.record(excess, y);
        }
    }
    return diag;
}

}  // namespace ancurv
