// SPDX-License-Identifier: Apache-2.0
//
// Rotationally symmetric model manifolds: metric dr^2 + w(r)^2 g_{S^{n-1}}
// with w(0) = 0, w'(0) = 1. Sectional curvatures are the standard warped
// product expressions
//     K_rad = -w''/w,   K_tan = (1 - w'^2)/w^2.
//
// The built-in Capped family is w' = 1 + g with g >= 0 a compactly
// supported polynomial lobe on [a, b]. Inside the lobe the metric carries
// genuine negative curvature (radial where g' > 0, tangential where g > 0);
// outside it the metric is exactly flat with affine tail w = r + beta and
// unit slope, which keeps the extracted decay profile compactly supported
// and both moments finite.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ancurv/curvature_profile.hpp"
#include "ancurv/grid_function.hpp"
#include "ancurv/ode.hpp"
#include "ancurv/quadrature.hpp"

namespace ancurv {

// |B^m| = pi^{m/2} / Gamma(m/2 + 1)
inline double unit_ball_volume(int m) {
    if (m < 1) throw std::domain_error("unit_ball_volume: dimension must be >= 1");
    return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

struct AffineTail {
    double start;  // w(r) = alpha*r + beta for r >= start
    double alpha;
    double beta;
};

class ModelManifold {
  public:
    enum class Kind { Euclidean, Capped, Custom };

    static ModelManifold euclidean(int n) {
        ModelManifold m(n, Kind::Euclidean);
        m.tail_ = AffineTail{0.0, 1.0, 0.0};
        return m;
    }

    // Velocity lobe g(r) = A * 64 * (s(1-s))^3, s = (r-a)/(b-a); peak A at
    // the midpoint. Requires 0 < a < b so the pole stays exactly Euclidean.
    static ModelManifold capped(int n, double amplitude, double lobe_start, double lobe_end) {
        if (!(amplitude > 0.0)) throw std::domain_error("capped: amplitude must be positive");
        if (!(0.0 < lobe_start && lobe_start < lobe_end))
            throw std::domain_error("capped: need 0 < lobe_start < lobe_end");
        ModelManifold m(n, Kind::Capped);
        m.amp_ = amplitude;
        m.a_ = lobe_start;
        m.b_ = lobe_end;
        m.tail_ = AffineTail{lobe_end, 1.0, amplitude * 64.0 * (lobe_end - lobe_start) / 140.0};
        return m;
    }

    static ModelManifold custom(int n, std::function<double(double)> w,
                                std::function<double(double)> dw,
                                std::function<double(double)> ddw, double r_max,
                                std::optional<AffineTail> tail = std::nullopt) {
        ModelManifold m(n, Kind::Custom);
        m.w_ = std::move(w);
        m.dw_ = std::move(dw);
        m.ddw_ = std::move(ddw);
        m.r_max_ = r_max;
        m.tail_ = tail;
        return m;
    }

    // Tabulated warp (value + derivative channels); w'' by differentiating
    // the Hermite interpolant of the derivative channel.
    static ModelManifold from_warp_samples(int n, GridFunction w_samples) {
        auto gf = std::make_shared<GridFunction>(std::move(w_samples));
        if (std::abs(gf->value(0)) > 1e-12 || std::abs(gf->deriv(0) - 1.0) > 1e-9)
            throw std::invalid_argument("warp samples: need w(0)=0, w'(0)=1");
        const double r_max = gf->t_back();
        return custom(
            n, [gf](double r) { return (*gf)(r); }, [gf](double r) { return gf->derivative(r); },
            [gf, r_max](double r) {
                const double d = gf->dt();
                const double lo = std::max(0.0, r - d), hi = std::min(r_max, r + d);
                return (gf->derivative(hi) - gf->derivative(lo)) / (hi - lo);
            },
            r_max);
    }

    int dimension() const { return n_; }
    Kind kind() const { return kind_; }
    double r_max() const { return r_max_; }
    std::optional<AffineTail> affine_tail() const { return tail_; }

    double warp(double r) const {
        switch (kind_) {
            case Kind::Euclidean: return r;
            case Kind::Capped: return r + lobe_cumulative(r);
            case Kind::Custom: return w_(r);
        }
        return r;
    }

    double warp_d(double r) const {
        switch (kind_) {
            case Kind::Euclidean: return 1.0;
            case Kind::Capped: return 1.0 + lobe(r);
            case Kind::Custom: return dw_(r);
        }
        return 1.0;
    }

    double warp_dd(double r) const {
        switch (kind_) {
            case Kind::Euclidean: return 0.0;
            case Kind::Capped: return lobe_d(r);
            case Kind::Custom: return ddw_(r);
        }
        return 0.0;
    }

    // (K_rad, K_tan); r = 0 resolves to the pole limit.
    std::pair<double, double> sectional_curvatures(double r) const {
        if (r < 0.0 || r > r_max_) throw std::domain_error("sectional_curvatures: r out of range");
        if (kind_ == Kind::Euclidean) return {0.0, 0.0};
        // w' = 1 exactly off the lobe, so both curvatures vanish there
        if (kind_ == Kind::Capped && (r <= a_ || r >= b_)) return {0.0, 0.0};
        if (r < pole_eps_) r = pole_eps_;  // removable 0/0 at the pole
        return {-warp_dd(r) / warp(r), curvature_tan(r)};
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["n"] = n_;
        switch (kind_) {
            case Kind::Euclidean: j["kind"] = "Euclidean"; break;
            case Kind::Capped:
                j["kind"] = "Capped";
                j["params"] = {{"amplitude", amp_}, {"lobe_start", a_}, {"lobe_end", b_}};
                break;
            case Kind::Custom: j["kind"] = "Custom"; break;
        }
        return j;
    }

    static ModelManifold from_json(const nlohmann::json& j) {
        const int n = j.at("n").get<int>();
        if (n < 2) throw std::invalid_argument("manifold JSON: dimension must be >= 2");
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "Euclidean") return euclidean(n);
        if (kind == "Capped") {
            const auto& p = j.at("params");
            return capped(n, p.at("amplitude").get<double>(), p.at("lobe_start").get<double>(),
                          p.at("lobe_end").get<double>());
        }
        if (kind == "Custom") {
            const auto path = j.at("warp_csv_path").get<std::string>();
            std::ifstream in(path);
            if (!in) throw std::invalid_argument("manifold JSON: cannot open '" + path + "'");
            return from_warp_samples(n, GridFunction::read_csv(in));
        }
        throw std::invalid_argument("manifold JSON: unknown kind '" + kind + "'");
    }

    std::string kind_name() const {
        switch (kind_) {
            case Kind::Euclidean: return "Euclidean";
            case Kind::Capped: return "Capped";
            case Kind::Custom: return "Custom";
        }
        return "?";
    }

  private:
    ModelManifold(int n, Kind k) : n_(n), kind_(k) {
        if (n < 2) throw std::domain_error("ModelManifold: dimension must be >= 2");
    }

    double curvature_tan(double r) const {
        const double wd = warp_d(r);
        const double w = warp(r);
        return (1.0 - wd * wd) / (w * w);
    }

    // g, g', and int_0^r g for the capped lobe
    double lobe(double r) const {
        if (r <= a_ || r >= b_) return 0.0;
        const double s = (r - a_) / (b_ - a_);
        const double u = s * (1.0 - s);
        return amp_ * 64.0 * u * u * u;
    }

    double lobe_d(double r) const {
        if (r <= a_ || r >= b_) return 0.0;
        const double s = (r - a_) / (b_ - a_);
        const double u = s * (1.0 - s);
        return amp_ * 64.0 * 3.0 * u * u * (1.0 - 2.0 * s) / (b_ - a_);
    }

    double lobe_cumulative(double r) const {
        if (r <= a_) return 0.0;
        const double s = std::min(1.0, (r - a_) / (b_ - a_));
        const double s4 = s * s * s * s;
        const double prim = s4 * (0.25 - 0.6 * s + 0.5 * s * s - s * s * s / 7.0);
        return amp_ * 64.0 * (b_ - a_) * prim;
    }

    static constexpr double pole_eps_ = 1e-5;

    int n_;
    Kind kind_;
    double amp_ = 0.0, a_ = 0.0, b_ = 0.0;
    std::function<double(double)> w_, dw_, ddw_;
    double r_max_ = std::numeric_limits<double>::infinity();
    std::optional<AffineTail> tail_;
};

// Minimal admissible decay profile dominating the curvature negativity
// s -> max(0, -min(K_rad, K_tan)). Sampled on a fine grid, majorized per
// node over a sub-sampled window, inflated by a second-difference bound so
// the piecewise-linear envelope dominates between nodes as well.
inline CurvatureProfile admissible_profile(const ModelManifold& M, std::size_t grid_points = 2049) {
    if (grid_points < 9) throw std::domain_error("admissible_profile: need >= 9 grid points");
    double H;
    switch (M.kind()) {
        case ModelManifold::Kind::Euclidean: return CurvatureProfile::zero();
        case ModelManifold::Kind::Capped: H = 1.05 * M.affine_tail()->start; break;
        case ModelManifold::Kind::Custom:
            H = std::isfinite(M.r_max()) ? M.r_max() : 100.0;
            break;
        default: H = 100.0; break;
    }

    auto negativity = [&M](double r) {
        const auto [krad, ktan] = M.sectional_curvatures(r);
        return std::max(0.0, -std::min(krad, ktan));
    };

    const std::size_t n = grid_points;
    constexpr std::size_t sub = 8;
    const std::size_t nfine = sub * (n - 1) + 1;
    const double dfine = H / static_cast<double>(nfine - 1);
    std::vector<double> fine(nfine);
    for (std::size_t i = 0; i < nfine; ++i) fine[i] = negativity(static_cast<double>(i) * dfine);

    std::vector<double> s(n), v(n);
    const double ds = H / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(i) * ds;
        const std::size_t c = sub * i;
        const std::size_t lo = c >= sub / 2 ? c - sub / 2 : 0;
        const std::size_t hi = std::min(nfine - 1, c + sub / 2);
        double m = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) m = std::max(m, fine[k]);
        v[i] = m;
    }

    double d2 = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d2 = std::max(d2, std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]));
    const double inflation = d2 / 8.0;
    for (auto& x : v)
        if (x > 0.0) x += inflation;

    try {
        return monotone_envelope(s, v);
    } catch (const std::domain_error&) {
        throw std::domain_error("admissible_profile: not asymptotically nonnegative "
                                "(curvature negativity has a non-integrable tail)");
    }
}

// Cumulative volume integrands for (w, h) with closed-form affine
// extensions past the numeric horizon. Backs ball growth, the asymptotic
// volume ratio, and the large-radius transport estimates.
class GrowthEvaluator {
  public:
    GrowthEvaluator(const ModelManifold& M, const CurvatureProfile& profile, double ode_tol = 1e-10)
        : n_(M.dimension()) {
        const double support = profile.support_end();
        double t_num = 1.0;
        if (auto tail = M.affine_tail()) {
            t_num = std::max(t_num, tail->start);
            alpha_w_ = tail->alpha;
            beta_w_ = tail->beta;
            w_tail_ok_ = true;
        } else {
            t_num = std::max(t_num, std::min(M.r_max(), 100.0));
        }
        if (std::isfinite(support)) {
            t_num = std::max(t_num, support);
            h_tail_ok_ = true;
        } else {
            // grow the horizon until the neglected lambda tail cannot move h'
            // by more than ~1e-11 (slope error of the affine extension)
            auto slope_tail = [&](double T) { return std::exp(profile.b0()) * profile.b0_tail(T); };
            double T = std::max(t_num, 8.0);
            while (slope_tail(T) > 1e-11 && T < 2048.0) T *= 2.0;
            t_num = std::max(t_num, T);
            h_tail_ok_ = slope_tail(t_num) <= 1e-11;
        }
        t_num_ = t_num;

        auto sol = solve_linear_ivp(profile, 0.0, 1.0, t_num_, ode_tol);
        h_ = std::move(sol.u);
        alpha_h_ = h_.deriv(h_.size() - 1);
        beta_h_ = h_.value(h_.size() - 1) - alpha_h_ * t_num_;

        const std::size_t N = h_.size();
        std::vector<double> wv(N), wd(N), hv(N), hd(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double r = h_.node(i);
            const double w = M.warp(r), dw = M.warp_d(r);
            const double hval = h_.value(i), hder = h_.deriv(i);
            wv[i] = power_nm1(w);
            wd[i] = (n_ - 1) * power_nm2(w) * dw;
            hv[i] = power_nm1(hval);
            hd[i] = (n_ - 1) * power_nm2(hval) * hder;
        }
        GridFunction w_integrand(0.0, h_.dt(), std::move(wv), std::move(wd));
        GridFunction h_integrand(0.0, h_.dt(), std::move(hv), std::move(hd));
        auto acc_w = w_integrand.cumulative_integral();
        auto acc_h = h_integrand.cumulative_integral();
        Iw_end_ = acc_w.back();
        Ih_end_ = acc_h.back();
        // cumulative as a grid function: value = integral, deriv = integrand
        cum_w_ = GridFunction(0.0, h_.dt(), std::move(acc_w), w_integrand.values());
        cum_h_ = GridFunction(0.0, h_.dt(), std::move(acc_h), h_integrand.values());
    }

    int dimension() const { return n_; }
    double t_numeric() const { return t_num_; }
    const GridFunction& h() const { return h_; }
    double h_slope() const { return alpha_h_; }
    double warp_slope() const { return alpha_w_; }
    bool extends_to_infinity() const { return w_tail_ok_ && h_tail_ok_; }

    // int_0^r w^{n-1}
    double warp_cumulative(double r) const {
        if (r <= t_num_) return cum_w_(r);
        require_tail();
        return Iw_end_ + affine_piece(alpha_w_, beta_w_, t_num_, r);
    }

    // int_0^r h^{n-1}
    double model_cumulative(double r) const {
        if (r <= t_num_) return cum_h_(r);
        require_tail();
        return Ih_end_ + affine_piece(alpha_h_, beta_h_, t_num_, r);
    }

    double h_at(double r) const {
        if (r <= t_num_) return h_(r);
        require_tail();
        return alpha_h_ * r + beta_h_;
    }

    double ratio(double r) const { return warp_cumulative(r) / model_cumulative(r); }

  private:
    void require_tail() const {
        if (!extends_to_infinity())
            throw std::domain_error("GrowthEvaluator: no closed-form tail past the numeric horizon");
    }

    double affine_piece(double alpha, double beta, double lo, double hi) const {
        // int_lo^hi (alpha t + beta)^{n-1} dt
        return (std::pow(alpha * hi + beta, n_) - std::pow(alpha * lo + beta, n_)) /
               (static_cast<double>(n_) * alpha);
    }

    double power_nm1(double x) const { return n_ == 2 ? x : std::pow(x, n_ - 1); }
    double power_nm2(double x) const { return n_ == 2 ? 1.0 : (n_ == 3 ? x : std::pow(x, n_ - 2)); }

    int n_;
    double t_num_ = 0.0;
    GridFunction h_, cum_w_, cum_h_;
    double Iw_end_ = 0.0, Ih_end_ = 0.0;
    double alpha_w_ = 1.0, beta_w_ = 0.0, alpha_h_ = 1.0, beta_h_ = 0.0;
    bool w_tail_ok_ = false, h_tail_ok_ = false;
};

struct BallGrowth {
    std::vector<double> r, volume, area, model_volume, ratio;

    void write_csv(std::ostream& os) const {
        os << "r,volume,area,model_volume,ratio\n";
        char buf[160];
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r[i], volume[i],
                          area[i], model_volume[i], ratio[i]);
            os << buf;
        }
    }
};

// vol B_r(o), |dB_r|, the h-model volume, and their ratio on a grid.
// The Bishop-type monotonicity of the ratio is asserted: an increase beyond
// 1e-9 means the profile fails to dominate the curvature.
inline BallGrowth ball_growth(const ModelManifold& M, const CurvatureProfile& profile,
                              double r_max, std::size_t nodes = 1024, double ode_tol = 1e-10) {
    if (!(r_max > 0.0)) throw std::domain_error("ball_growth: r_max must be positive");
    GrowthEvaluator ge(M, profile, ode_tol);
    if (r_max > ge.t_numeric() && !ge.extends_to_infinity())
        throw std::domain_error("ball_growth: r_max beyond the numeric horizon");

    const double nB = M.dimension() * unit_ball_volume(M.dimension());
    BallGrowth g;
    g.r.resize(nodes + 1);
    g.volume.resize(nodes + 1);
    g.area.resize(nodes + 1);
    g.model_volume.resize(nodes + 1);
    g.ratio.resize(nodes + 1);
    for (std::size_t i = 0; i <= nodes; ++i) {
        const double r = r_max * static_cast<double>(i) / static_cast<double>(nodes);
        g.r[i] = r;
        g.volume[i] = nB * ge.warp_cumulative(r);
        g.model_volume[i] = nB * ge.model_cumulative(r);
        g.area[i] = nB * std::pow(M.warp(r), M.dimension() - 1);
        g.ratio[i] = i == 0 ? 1.0 : g.volume[i] / g.model_volume[i];
    }
    for (std::size_t i = 0; i + 1 < g.ratio.size(); ++i) {
        if (g.ratio[i + 1] > g.ratio[i] + 1e-9)
            throw std::runtime_error(
                "ball_growth: volume ratio increased at r=" + std::to_string(g.r[i + 1]) +
                " (profile does not dominate the curvature)");
    }
    return g;
}

// Asymptotic volume ratio: evaluates the (monotone) ratio at doubling
// radii, capped at r = 1e5, and stops when two successive estimates agree
// within tol. The raw ratio approaches its limit only like 1/r, so each
// estimate is the Richardson-extrapolated value 2*ratio(2r) - ratio(r),
// which is exact to O(1/r^2) and reaches tight tolerances inside the cap.
inline double asymptotic_volume_ratio(const ModelManifold& M, const CurvatureProfile& profile,
                                      double tol, double ode_tol = 1e-10) {
    if (!(tol > 0.0)) throw std::domain_error("asymptotic_volume_ratio: tol must be positive");
    GrowthEvaluator ge(M, profile, ode_tol);
    constexpr double r_cap = 1e5;
    double r = std::max(1.0, 2.0 * ge.t_numeric());
    const double r_lim = ge.extends_to_infinity() ? r_cap : ge.t_numeric();
    if (2.0 * r > r_lim)
        throw std::runtime_error("asymptotic_volume_ratio: numeric horizon too short");
    double prev_ratio = ge.ratio(r);
    double prev_est = std::numeric_limits<double>::quiet_NaN();
    while (2.0 * r <= r_lim) {
        r *= 2.0;
        const double cur_ratio = ge.ratio(r);
        const double est = 2.0 * cur_ratio - prev_ratio;
        if (std::isfinite(prev_est) && std::abs(est - prev_est) < tol)
            return std::max(0.0, est);
        prev_est = est;
        prev_ratio = cur_ratio;
    }
    throw std::runtime_error("asymptotic_volume_ratio: no convergence by r=" + std::to_string(r) +
                             " (last estimates " + std::to_string(prev_ratio) + ", " +
                             std::to_string(prev_est) + ")");
}

}  // namespace ancurv
