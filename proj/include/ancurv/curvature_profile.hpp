// SPDX-License-Identifier: Apache-2.0
//
// Admissible curvature-decay profiles: nonnegative, nonincreasing lambda(s)
// with finite moments
//     b0 = int_0^inf s lambda(s) ds,   b1 = int_0^inf lambda(s) ds.
// Moments carry a certified truncation error: closed-form kinds use an
// analytic tail bound past the truncation point, tabulated profiles use a
// caller-supplied bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ancurv/quadrature.hpp"

namespace ancurv {

enum class ProfileKind { Zero, ExpDecay, LinearCutoff, PowerDecay, Tabulated };

inline const char* to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Zero: return "Zero";
        case ProfileKind::ExpDecay: return "ExpDecay";
        case ProfileKind::LinearCutoff: return "LinearCutoff";
        case ProfileKind::PowerDecay: return "PowerDecay";
        case ProfileKind::Tabulated: return "Tabulated";
    }
    return "?";
}

struct Moments {
    double b0 = 0.0;
    double b1 = 0.0;
    double tail_error = 0.0;
};

struct ProfileDiagnostic {
    enum class Type { NegativeValue, MonotonicityViolation, NonIntegrableTail };
    Type type;
    std::size_t index;
    double s;
    double value;
};

class CurvatureProfile {
  public:
    static CurvatureProfile zero() { return CurvatureProfile(ProfileKind::Zero); }

    static CurvatureProfile exp_decay(double rate, double amplitude) {
        if (!(rate > 0.0)) throw std::domain_error("ExpDecay: rate must be positive");
        if (amplitude < 0.0) throw std::domain_error("ExpDecay: amplitude must be nonnegative");
        CurvatureProfile p(ProfileKind::ExpDecay);
        p.a_ = rate;
        p.c_ = amplitude;
        p.finish();
        return p;
    }

    static CurvatureProfile linear_cutoff(double amplitude, double s0) {
        if (amplitude < 0.0) throw std::domain_error("LinearCutoff: amplitude must be nonnegative");
        if (!(s0 > 0.0)) throw std::domain_error("LinearCutoff: cutoff must be positive");
        CurvatureProfile p(ProfileKind::LinearCutoff);
        p.c_ = amplitude;
        p.s0_ = s0;
        p.finish();
        return p;
    }

    static CurvatureProfile power_decay(double amplitude, double q) {
        if (amplitude < 0.0) throw std::domain_error("PowerDecay: amplitude must be nonnegative");
        if (!(q > 2.0)) throw std::domain_error("PowerDecay: exponent must exceed 2");
        CurvatureProfile p(ProfileKind::PowerDecay);
        p.c_ = amplitude;
        p.q_ = q;
        p.finish();
        return p;
    }

    static CurvatureProfile tabulated(std::vector<double> s, std::vector<double> lambda,
                                      std::optional<double> tail_bound) {
        if (s.size() != lambda.size() || s.size() < 2)
            throw std::invalid_argument("Tabulated: need matching grids with >= 2 samples");
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (!(s[i] < s[i + 1])) throw std::invalid_argument("Tabulated: grid must increase");
        if (s.front() != 0.0) throw std::invalid_argument("Tabulated: grid must start at 0");
        for (double v : lambda)
            if (!(v >= 0.0)) throw std::invalid_argument("Tabulated: negative sample");
        CurvatureProfile p(ProfileKind::Tabulated);
        p.ts_ = std::move(s);
        p.tv_ = std::move(lambda);
        p.tail_bound_ = tail_bound;
        p.finish();
        return p;
    }

    ProfileKind kind() const { return kind_; }
    bool is_zero() const { return kind_ == ProfileKind::Zero; }

    // eval_lambda
    double operator()(double s) const {
        if (s < 0.0) throw std::domain_error("lambda: negative argument");
        switch (kind_) {
            case ProfileKind::Zero: return 0.0;
            case ProfileKind::ExpDecay: return c_ * std::exp(-a_ * s);
            case ProfileKind::LinearCutoff: return s >= s0_ ? 0.0 : c_ * (1.0 - s / s0_);
            case ProfileKind::PowerDecay: return c_ * std::pow(1.0 + s, -q_);
            case ProfileKind::Tabulated: return eval_table(s);
        }
        return 0.0;
    }

    double b0() const { return moments_.b0; }
    double b1() const { return moments_.b1; }
    double tail_error() const { return moments_.tail_error; }

    // Certified bounds on the moment tails past T.
    double b1_tail(double T) const {
        switch (kind_) {
            case ProfileKind::Zero: return 0.0;
            case ProfileKind::ExpDecay: return c_ * std::exp(-a_ * T) / a_;
            case ProfileKind::LinearCutoff:
                return T >= s0_ ? 0.0 : c_ * (s0_ - T) * (s0_ - T) / (2.0 * s0_);
            case ProfileKind::PowerDecay: return c_ * std::pow(1.0 + T, 1.0 - q_) / (q_ - 1.0);
            case ProfileKind::Tabulated:
                return T >= ts_.back() ? tail_bound_.value_or(tv_.back() == 0.0
                                                                  ? 0.0
                                                                  : std::numeric_limits<double>::infinity())
                                       : std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    double b0_tail(double T) const {
        switch (kind_) {
            case ProfileKind::Zero: return 0.0;
            case ProfileKind::ExpDecay: return c_ * std::exp(-a_ * T) * (T + 1.0 / a_) / a_;
            case ProfileKind::LinearCutoff: {
                if (T >= s0_) return 0.0;
                // int_T^{s0} s c (1 - s/s0) ds
                auto F = [&](double x) { return c_ * (x * x / 2.0 - x * x * x / (3.0 * s0_)); };
                return F(s0_) - F(T);
            }
            case ProfileKind::PowerDecay: {
                const double U = 1.0 + T;
                return c_ * (std::pow(U, 2.0 - q_) / (q_ - 2.0) - std::pow(U, 1.0 - q_) / (q_ - 1.0));
            }
            case ProfileKind::Tabulated:
                return T >= ts_.back() ? tail_bound_.value_or(tv_.back() == 0.0
                                                                  ? 0.0
                                                                  : std::numeric_limits<double>::infinity())
                                       : std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    // Radius beyond which lambda vanishes identically; +inf if none.
    double support_end() const {
        switch (kind_) {
            case ProfileKind::Zero: return 0.0;
            case ProfileKind::LinearCutoff: return s0_;
            case ProfileKind::Tabulated: {
                if (tv_.back() == 0.0 && tail_bound_.value_or(0.0) == 0.0) {
                    std::size_t i = tv_.size();
                    while (i > 0 && tv_[i - 1] == 0.0) --i;
                    return i == 0 ? 0.0 : ts_[std::min(i, ts_.size() - 1)];
                }
                return std::numeric_limits<double>::infinity();
            }
            default: return std::numeric_limits<double>::infinity();
        }
    }

    // Smallest grid-friendly T with both moment tails below tol.
    double horizon(double tol) const {
        const double T = sampling_horizon(tol, 1e9);
        if (T >= 1e9) throw std::runtime_error("profile horizon: tail does not reach tol");
        return T;
    }

    // Like horizon(), but saturates at cap instead of throwing (fat tails).
    double sampling_horizon(double tol, double cap = 1e4) const {
        if (kind_ == ProfileKind::Zero) return 1.0;
        if (kind_ == ProfileKind::LinearCutoff) return s0_;
        if (kind_ == ProfileKind::Tabulated) return ts_.back();
        double T = 1.0;
        while ((b0_tail(T) > tol || b1_tail(T) > tol) && T < cap) T *= 2.0;
        return std::min(T, cap);
    }

    // compute_moments: quadrature on [0, T] plus analytic tail certificate.
    Moments compute_moments(double tol) const {
        if (!(tol > 0.0)) throw std::domain_error("compute_moments: tol must be positive");
        Moments m;
        switch (kind_) {
            case ProfileKind::Zero: return m;
            case ProfileKind::Tabulated: {
                if (tv_.back() != 0.0 && !tail_bound_)
                    throw std::runtime_error("compute_moments: unbounded tail");
                // piecewise-linear segments integrate exactly
                for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
                    const double h = ts_[i + 1] - ts_[i];
                    const double v0 = tv_[i], v1 = tv_[i + 1];
                    m.b1 += 0.5 * h * (v0 + v1);
                    // int s*lin(s): exact for linear lambda on the segment
                    const double s0 = ts_[i], s1 = ts_[i + 1];
                    m.b0 += h * (v0 * (2.0 * s0 + s1) + v1 * (s0 + 2.0 * s1)) / 6.0;
                }
                m.tail_error = tail_bound_.value_or(0.0);
                return m;
            }
            default: {
                const double T = horizon(0.5 * tol);
                const auto q1 = integrate_adaptive([this](double s) { return (*this)(s); }, 0.0, T,
                                                   0.5 * tol);
                const auto q0 = integrate_adaptive([this](double s) { return s * (*this)(s); }, 0.0,
                                                   T, 0.5 * tol);
                m.b1 = q1.value;
                m.b0 = q0.value;
                m.tail_error = std::max(b0_tail(T), b1_tail(T));
                return m;
            }
        }
    }

    const std::vector<double>& table_grid() const { return ts_; }
    const std::vector<double>& table_values() const { return tv_; }
    std::optional<double> tail_bound() const { return tail_bound_; }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["kind"] = to_string(kind_);
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        switch (kind_) {
            case ProfileKind::Zero: break;
            case ProfileKind::ExpDecay:
                params["a"] = a_;
                params["c"] = c_;
                break;
            case ProfileKind::LinearCutoff:
                params["c"] = c_;
                params["s0"] = s0_;
                break;
            case ProfileKind::PowerDecay:
                params["c"] = c_;
                params["q"] = q_;
                break;
            case ProfileKind::Tabulated:
                params["s"] = ts_;
                params["lambda"] = tv_;
                break;
        }
        j["params"] = params;
        if (tail_bound_) j["tail_bound"] = *tail_bound_;
        return j;
    }

    static CurvatureProfile from_json(const nlohmann::json& j) {
        const std::string kind = j.at("kind").get<std::string>();
        const auto& params = j.at("params");
        if (kind == "Zero") return zero();
        if (kind == "ExpDecay")
            return exp_decay(params.at("a").get<double>(), params.at("c").get<double>());
        if (kind == "LinearCutoff")
            return linear_cutoff(params.at("c").get<double>(), params.at("s0").get<double>());
        if (kind == "PowerDecay")
            return power_decay(params.at("c").get<double>(), params.at("q").get<double>());
        if (kind == "Tabulated") {
            std::optional<double> tb;
            if (j.contains("tail_bound")) tb = j.at("tail_bound").get<double>();
            return tabulated(params.at("s").get<std::vector<double>>(),
                             params.at("lambda").get<std::vector<double>>(), tb);
        }
        throw std::invalid_argument("profile JSON: unknown kind '" + kind + "'");
    }

  private:
    explicit CurvatureProfile(ProfileKind k) : kind_(k) {}

    // cached moments use the exact closed forms per kind
    void finish() {
        switch (kind_) {
            case ProfileKind::Zero: moments_ = {0.0, 0.0, 0.0}; break;
            case ProfileKind::ExpDecay: moments_ = {c_ / (a_ * a_), c_ / a_, 0.0}; break;
            case ProfileKind::LinearCutoff:
                moments_ = {c_ * s0_ * s0_ / 6.0, c_ * s0_ / 2.0, 0.0};
                break;
            case ProfileKind::PowerDecay:
                moments_ = {c_ / ((q_ - 1.0) * (q_ - 2.0)), c_ / (q_ - 1.0), 0.0};
                break;
            case ProfileKind::Tabulated:
                if (tv_.back() != 0.0 && !tail_bound_)
                    throw std::runtime_error("Tabulated profile: unbounded tail");
                moments_ = compute_moments(1e-12);
                break;
        }
    }

    double eval_table(double s) const {
        if (s >= ts_.back()) {
            if (tv_.back() == 0.0) return 0.0;
            if (!tail_bound_) throw std::domain_error("Tabulated: evaluation past grid without tail bound");
            return tv_.back();  // nonincreasing majorant of the tail
        }
        auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - ts_.begin()) - 1;
        const double w = (s - ts_[i]) / (ts_[i + 1] - ts_[i]);
        return (1.0 - w) * tv_[i] + w * tv_[i + 1];
    }

    static constexpr double construction_tol_ = 1e-12;

    ProfileKind kind_;
    double a_ = 0.0, c_ = 0.0, s0_ = 0.0, q_ = 0.0;
    std::vector<double> ts_, tv_;
    std::optional<double> tail_bound_;
    Moments moments_;
};

// Grid diagnostics for the standing hypotheses (nonnegative, nonincreasing,
// finite moments). Empty result means the profile is admissible.
inline std::vector<ProfileDiagnostic> validate_profile(const CurvatureProfile& profile,
                                                       std::size_t grid_points) {
    if (grid_points < 2) throw std::domain_error("validate_profile: need >= 2 grid points");
    std::vector<ProfileDiagnostic> out;
    if (!(std::isfinite(profile.b0()) && std::isfinite(profile.b1())))
        out.push_back({ProfileDiagnostic::Type::NonIntegrableTail, 0, 0.0, 0.0});
    const double H = profile.sampling_horizon(1e-9);
    const double ds = H / static_cast<double>(grid_points - 1);
    double prev = profile(0.0);
    if (prev < 0.0) out.push_back({ProfileDiagnostic::Type::NegativeValue, 0, 0.0, prev});
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double s = static_cast<double>(i) * ds;
        const double v = profile(s);
        if (v < 0.0) out.push_back({ProfileDiagnostic::Type::NegativeValue, i, s, v});
        if (v > prev + 1e-12)
            out.push_back({ProfileDiagnostic::Type::MonotonicityViolation, i, s, v - prev});
        prev = v;
    }
    return out;
}

// Minimal nonincreasing nonnegative majorant of a sampled function:
// running supremum from the right. All-zero input collapses to the Zero
// profile; a positive final value leaves the tail uncertified.
inline CurvatureProfile monotone_envelope(const std::vector<double>& s,
                                          const std::vector<double>& values) {
    if (s.size() != values.size() || s.size() < 2)
        throw std::invalid_argument("monotone_envelope: need matching grids with >= 2 samples");
    std::vector<double> env(values.size());
    double running = 0.0;
    for (std::size_t k = values.size(); k-- > 0;) {
        running = std::max({running, values[k], 0.0});
        env[k] = running;
    }
    if (env.back() > 0.0)
        throw std::domain_error("monotone_envelope: non-integrable tail (last value positive)");
    if (env.front() == 0.0) return CurvatureProfile::zero();
    return CurvatureProfile::tabulated(s, env, 0.0);
}

}  // namespace ancurv
