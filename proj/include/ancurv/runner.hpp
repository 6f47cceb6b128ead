// SPDX-License-Identifier: Apache-2.0
//
// Sweep orchestration and deterministic report emission. Each command
// reads a JSON config, runs its checks, and writes JSON/CSV artifacts with
// all floats at 17 significant digits. A fixed (config, seed) pair emits
// byte-identical files.
//
// Exit codes: 0 clean, 1 input/config error, 2 counterexample flag raised.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ancurv/jacobi.hpp"
#include "ancurv/model_manifold.hpp"
#include "ancurv/report.hpp"
#include "ancurv/rng.hpp"
#include "ancurv/sobolev.hpp"
#include "ancurv/submanifold.hpp"

namespace ancurv {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct RunConfig {
    std::string command;
    nlohmann::json spec = nlohmann::json::object();
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;
    Tolerances tols;

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig cfg;
        cfg.command = j.at("command").get<std::string>();
        if (j.contains("spec")) cfg.spec = j.at("spec");
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            if (t.contains("quad_tol")) cfg.tols.quad = t.at("quad_tol").get<double>();
            if (t.contains("ode_tol")) cfg.tols.ode = t.at("ode_tol").get<double>();
            if (t.contains("theta_tol")) cfg.tols.theta = t.at("theta_tol").get<double>();
        }
        cfg.tols.validate();
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// densities for the domain sweep

inline RadialDensity make_density(const std::string& kind, double R, double value = 1.0) {
    if (kind == "constant") return RadialDensity::constant(value, R);
    if (kind == "quadratic")
        return RadialDensity::from_callables(
            [R](double r) { return 1.0 + r * r / (2.0 * R * R); },
            [R](double r) { return r / (R * R); }, R, false, 513, "quadratic");
    if (kind == "exp")
        // e^{-r} has a pole kink (f'(0) = -1); admitted deliberately here
        return RadialDensity::from_callables([](double r) { return std::exp(-r); },
                                             [](double r) { return -std::exp(-r); }, R, true, 513,
                                             "exp");
    throw std::invalid_argument("unknown density kind '" + kind + "'");
}

inline RadialDensity density_from_json(const nlohmann::json& j, double R) {
    const std::string kind = j.at("kind").get<std::string>();
    const double value = j.contains("value") ? j.at("value").get<double>() : 1.0;
    return make_density(kind, R, value);
}

// ---------------------------------------------------------------------------
// domain sweep

struct SweepCell {
    std::string manifold;
    int n;
    double R;
    std::string density;
    double b0, b1, theta;
    InequalityReport report;
};

struct DomainSweepSpec {
    std::vector<std::pair<std::string, nlohmann::json>> manifolds;  // label -> params
    std::vector<int> dims{2, 3, 4};
    std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
    std::vector<std::string> densities{"constant", "quadratic", "exp"};

    static DomainSweepSpec standard() {
        DomainSweepSpec s;
        s.manifolds = {
            {"euclidean", {{"kind", "Euclidean"}}},
            {"capped_a",
             {{"kind", "Capped"},
              {"params", {{"amplitude", 0.3}, {"lobe_start", 0.5}, {"lobe_end", 1.5}}}}},
            {"capped_b",
             {{"kind", "Capped"},
              {"params", {{"amplitude", 0.6}, {"lobe_start", 1.0}, {"lobe_end", 2.5}}}}},
        };
        return s;
    }
};

inline std::vector<SweepCell> run_domain_sweep(const DomainSweepSpec& spec,
                                               const Tolerances& tols) {
    std::vector<SweepCell> cells;
    for (const auto& [label, mj] : spec.manifolds) {
        for (int n : spec.dims) {
            nlohmann::json j = mj;
            j["n"] = n;
            const ModelManifold M = ModelManifold::from_json(j);
            const CurvatureProfile prof = admissible_profile(M);
            const double theta = asymptotic_volume_ratio(M, prof, tols.theta, tols.ode);
            for (double R : spec.radii) {
                for (const auto& dk : spec.densities) {
                    const RadialDomain dom(M, R);
                    const auto f = make_density(dk, R);
                    SweepCell cell{label,      n,          R,    dk,
                                   prof.b0(),  prof.b1(),  theta,
                                   theorem11_report(dom, f, prof, theta, tols)};
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

inline void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& os) {
    os << "manifold,n,R,density,b0,b1,theta,lhs,rhs,ratio,slack,error_budget,status\n";
    for (const auto& c : cells) {
        os << c.manifold << ',' << c.n << ',' << fmt17(c.R) << ',' << c.density << ','
           << fmt17(c.b0) << ',' << fmt17(c.b1) << ',' << fmt17(c.theta) << ','
           << fmt17(c.report.lhs) << ',' << fmt17(c.report.rhs) << ',' << fmt17(c.report.ratio)
           << ',' << fmt17(c.report.slack) << ',' << fmt17(c.report.error_budget) << ','
           << to_string(c.report.status) << '\n';
    }
}

// One CSV per sweep axis, grouped by manifold kind.
inline void emit_plot_data(const std::vector<SweepCell>& cells,
                           const std::filesystem::path& dir) {
    std::map<std::string, std::vector<const SweepCell*>> by_kind;
    for (const auto& c : cells) by_kind[c.manifold].push_back(&c);
    // even with no cells, emit header-only files for the standard kinds
    if (cells.empty()) by_kind[""] = {};

    for (const auto& [kind, rows] : by_kind) {
        const std::string suffix = kind.empty() ? "all" : kind;
        std::ofstream ratio_csv(dir / ("plot_ratio_vs_R_" + suffix + ".csv"));
        ratio_csv << "n,density,R,ratio\n";
        for (const auto* c : rows)
            ratio_csv << c->n << ',' << c->density << ',' << fmt17(c->R) << ','
                      << fmt17(c->report.ratio) << '\n';

        std::ofstream slack_csv(dir / ("plot_slack_vs_b1_" + suffix + ".csv"));
        slack_csv << "n,density,R,b1,slack\n";
        for (const auto* c : rows)
            slack_csv << c->n << ',' << c->density << ',' << fmt17(c->R) << ',' << fmt17(c->b1)
                      << ',' << fmt17(c->report.slack) << '\n';
    }
}

// ---------------------------------------------------------------------------
// randomized ABP sweeps (seeded, reproducible)

struct AbpRow {
    std::string case_id;
    double r, detP, bound, margin;
    ReportStatus status;
};

namespace detail {

inline Matrix random_symmetric(SplitMix64& rng, int m, double scale) {
    Matrix A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) A(i, j) = A(j, i) = rng.uniform(-scale, scale);
    return A;
}

inline Matrix shifted_to_trace_mean(Matrix A, double mean) {
    const int m = static_cast<int>(A.rows());
    return A + (mean - A.trace() / m) * Matrix::Identity(m, m);
}

inline double conjugate_safe_horizon(const Matrix& A, double wanted) {
    const double lam_min = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff();
    if (lam_min >= -0.05) return wanted;
    return std::min(wanted, 0.75 / (-lam_min));
}

}  // namespace detail

struct AbpSweepResult {
    std::vector<AbpRow> rows;
    double worst_q_symmetry = 0.0;
    std::size_t counterexamples = 0;
};

// 50 flat systems + 10 model-manifold geodesics for the domain bound, and
// 10 flat submanifold-block systems for the codimension bound. Initial
// Hessians are drawn with spectrum inside [-1, 1] and shifted to meet the
// trace hypothesis with a positive margin.
inline AbpSweepResult run_abp_sweeps(std::uint64_t seed, const Tolerances& tols) {
    AbpSweepResult out;
    SplitMix64 rng(seed);
    const auto zero = CurvatureProfile::zero();

    auto push = [&out](const std::string& id, double r, const InequalityReport& rep,
                       double q_sym) {
        out.rows.push_back({id, r, rep.lhs, rep.rhs, rep.slack, rep.status});
        out.worst_q_symmetry = std::max(out.worst_q_symmetry, q_sym);
        if (rep.status == ReportStatus::Counterexample) ++out.counterexamples;
    };

    for (int k = 0; k < 50; ++k) {
        const int m = 2 + k % 3;
        Matrix A = detail::random_symmetric(rng, m, 0.45);
        const double mean = rng.uniform(-0.3, 0.5);
        A = detail::shifted_to_trace_mean(A, mean);
        const double f = std::pow(std::max(mean, 0.0) + rng.uniform(0.05, 0.3), m - 1.0);
        const double r = detail::conjugate_safe_horizon(A, rng.uniform(0.5, 2.5));
        JacobiSystem sys;
        sys.dim = m;
        sys.curvature = [m](double) -> Matrix { return Matrix::Zero(m, m); };
        sys.P0 = Matrix::Identity(m, m);
        sys.dP0 = A;
        sys.horizon = r;
        sys.speed = rng.uniform(0.1, 0.95);
        const auto rep = det_bound_check(sys, f, zero, rng.uniform(0.5, 2.0), tols.ode * 10.0);
        push("euclid-" + std::to_string(k), r, rep, rep.terms.at("q_symmetry_residual"));
    }

    const auto M = ModelManifold::capped(3, 0.15, 0.5, 1.5);
    const auto prof = admissible_profile(M);
    for (int k = 0; k < 10; ++k) {
        const double speed = rng.uniform(0.2, 0.9);
        const double d0 = rng.uniform(0.3, 2.0);
        Matrix A = detail::random_symmetric(rng, 3, 0.35);
        const double f = 1.0;
        const double cap = 1.0 - (4.0 / 3.0) * prof.b1() - rng.uniform(0.05, 0.3);
        A = detail::shifted_to_trace_mean(A, cap);
        const double r = detail::conjugate_safe_horizon(A, rng.uniform(0.5, 2.0));
        JacobiSystem sys;
        sys.dim = 3;
        sys.curvature = [&M, speed, d0](double t) {
            const auto [krad, ktan] = M.sectional_curvatures(d0 + speed * t);
            Matrix S = Matrix::Zero(3, 3);
            S(0, 0) = S(1, 1) = speed * speed * krad;
            return S;
        };
        sys.P0 = Matrix::Identity(3, 3);
        sys.dP0 = A;
        sys.horizon = r;
        sys.speed = speed;
        const auto rep = det_bound_check(sys, f, prof, d0, tols.ode * 10.0);
        push("model-" + std::to_string(k), r, rep, rep.terms.at("q_symmetry_residual"));
    }

    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 3, p = 2;
        Matrix A = detail::shifted_to_trace_mean(detail::random_symmetric(rng, n, 0.35),
                                                 rng.uniform(-0.2, 0.4));
        Matrix C(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) C(i, j) = rng.uniform(-0.5, 0.5);
        const double f =
            std::pow(std::max(A.trace() / n, 0.0) + rng.uniform(0.05, 0.3), n - 1.0);
        const double r = detail::conjugate_safe_horizon(A, rng.uniform(0.5, 2.0));
        const auto rep = submanifold_det_bound_check(A, C, p, f, zero, rng.uniform(0.5, 2.0), r,
                                                     rng.uniform(0.1, 0.95), {}, tols.ode * 10.0);
        push("sub-" + std::to_string(k), r, rep, rep.terms.at("q_symmetry_residual"));
    }
    return out;
}

inline void write_abp_csv(const std::vector<AbpRow>& rows, std::ostream& os) {
    os << "case_id,r,detP,bound,margin,status\n";
    for (const auto& row : rows)
        os << row.case_id << ',' << fmt17(row.r) << ',' << fmt17(row.detP) << ','
           << fmt17(row.bound) << ',' << fmt17(row.margin) << ',' << to_string(row.status)
           << '\n';
}

// ---------------------------------------------------------------------------
// command dispatch

namespace detail {

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream os(path);
    os << j.dump(2) << '\n';
}

inline int run_profile(const RunConfig& cfg) {
    const auto prof = CurvatureProfile::from_json(cfg.spec.at("profile"));
    const auto diags = validate_profile(prof, 1024);
    nlohmann::ordered_json j;
    j["profile"] = prof.to_json();
    j["moments"] = {{"b0", prof.b0()}, {"b1", prof.b1()}, {"tail_error", prof.tail_error()}};
    nlohmann::ordered_json dl = nlohmann::ordered_json::array();
    for (const auto& d : diags) {
        const char* type = d.type == ProfileDiagnostic::Type::NegativeValue ? "NegativeValue"
                           : d.type == ProfileDiagnostic::Type::MonotonicityViolation
                               ? "MonotonicityViolation"
                               : "NonIntegrableTail";
        dl.push_back({{"type", type}, {"index", d.index}, {"s", d.s}, {"value", d.value}});
    }
    j["diagnostics"] = dl;
    j["valid"] = diags.empty();
    write_json(cfg.out_dir / "profile_report.json", j);
    return 0;
}

inline int run_manifold(const RunConfig& cfg) {
    const auto M = ModelManifold::from_json(cfg.spec.at("manifold"));
    const auto prof = admissible_profile(M);
    const double theta = asymptotic_volume_ratio(M, prof, cfg.tols.theta, cfg.tols.ode);
    const double r_max = cfg.spec.contains("r_max") ? cfg.spec.at("r_max").get<double>() : 10.0;
    const auto growth = ball_growth(M, prof, r_max, 512, cfg.tols.ode);
    std::ofstream csv(cfg.out_dir / "ball_growth.csv");
    growth.write_csv(csv);

    nlohmann::ordered_json j;
    j["manifold"] = M.to_json();
    j["profile"] = prof.to_json();
    j["b0"] = prof.b0();
    j["b1"] = prof.b1();
    j["theta"] = theta;
    write_json(cfg.out_dir / "manifold_report.json", j);
    return 0;
}

inline int run_check_domain(const RunConfig& cfg) {
    const auto M = ModelManifold::from_json(cfg.spec.at("manifold"));
    const double R = cfg.spec.at("R").get<double>();
    const RadialDomain dom(M, R);
    const auto prof = cfg.spec.contains("profile")
                          ? CurvatureProfile::from_json(cfg.spec.at("profile"))
                          : admissible_profile(M);
    const double theta = cfg.spec.contains("theta")
                             ? cfg.spec.at("theta").get<double>()
                             : asymptotic_volume_ratio(M, prof, cfg.tols.theta, cfg.tols.ode);
    const auto f = density_from_json(
        cfg.spec.contains("density") ? cfg.spec.at("density")
                                     : nlohmann::json{{"kind", "constant"}},
        R);

    const auto sob = theorem11_report(dom, f, prof, theta, cfg.tols);
    const auto iso = isoperimetric_report(dom, prof, theta, cfg.tols);

    const auto norm = normalize_density(dom, f, prof, cfg.tols);
    const auto u = solve_radial_neumann(dom, norm.density, prof, 4097, cfg.tols);
    const auto trace_bound = hessian_trace_bound_check(u, norm.density, prof, dom);
    {
        std::ofstream ucsv(cfg.out_dir / "neumann_u.csv");
        u.write_csv(ucsv);
    }
    const auto transport =
        measure_transport_check(dom, norm.density, u, prof, {2.0 * R, 4.0 * R, 8.0 * R}, theta,
                                cfg.tols);

    nlohmann::ordered_json j;
    j["sobolev"] = sob.to_json();
    j["isoperimetric"] = iso.to_json();
    j["neumann"] = {{"scale", norm.scale},
                    {"u_prime_at_R", u.deriv(u.size() - 1)},
                    {"hessian_bound_ok", trace_bound.ok()},
                    {"hessian_bound_checked_points", trace_bound.checked_points}};
    nlohmann::ordered_json tj = nlohmann::ordered_json::array();
    bool transport_ok = true;
    for (const auto& rep : transport) {
        tj.push_back(rep.to_json());
        transport_ok &= rep.status != ReportStatus::Counterexample;
    }
    j["transport"] = tj;
    write_json(cfg.out_dir / "domain_report.json", j);
    const bool counter = sob.status == ReportStatus::Counterexample ||
                         iso.status == ReportStatus::Counterexample || !trace_bound.ok() ||
                         !transport_ok;
    return counter ? 2 : 0;
}

inline int run_check_submanifold(const RunConfig& cfg) {
    const auto spec = SubmanifoldSpec::from_json(cfg.spec.at("specimen"));
    const double f = cfg.spec.contains("f") ? cfg.spec.at("f").get<double>() : 1.0;
    const auto prof = cfg.spec.contains("profile")
                          ? CurvatureProfile::from_json(cfg.spec.at("profile"))
                          : CurvatureProfile::zero();
    const double theta =
        cfg.spec.contains("theta") ? cfg.spec.at("theta").get<double>() : 1.0;

    nlohmann::ordered_json j;
    bool counter = false;
    const auto t14 = theorem14_report(spec, f, prof, theta, cfg.tols);
    j["theorem14"] = t14.to_json();
    counter |= t14.status == ReportStatus::Counterexample;
    if (spec.p() == 2) {
        const auto c15 = corollary15_report(spec, f, prof, theta, cfg.tols);
        j["corollary15"] = c15.to_json();
        counter |= c15.status == ReportStatus::Counterexample;
        if (spec.minimal()) {
            const auto c17 = minimal_isoperimetric_report(spec, prof, theta, cfg.tols);
            j["corollary17"] = c17.to_json();
            counter |= c17.status == ReportStatus::Counterexample;
        }
    }
    write_json(cfg.out_dir / "submanifold_report.json", j);
    return counter ? 2 : 0;
}

inline int run_abp(const RunConfig& cfg) {
    const auto res = run_abp_sweeps(cfg.seed, cfg.tols);
    std::ofstream csv(cfg.out_dir / "abp_sweep.csv");
    write_abp_csv(res.rows, csv);
    nlohmann::ordered_json j;
    j["cases"] = res.rows.size();
    j["counterexamples"] = res.counterexamples;
    j["worst_q_symmetry_residual"] = res.worst_q_symmetry;
    j["seed"] = cfg.seed;
    write_json(cfg.out_dir / "abp_report.json", j);
    return res.counterexamples == 0 ? 0 : 2;
}

inline int run_sweep(const RunConfig& cfg) {
    DomainSweepSpec spec = DomainSweepSpec::standard();
    if (cfg.spec.contains("dims")) spec.dims = cfg.spec.at("dims").get<std::vector<int>>();
    if (cfg.spec.contains("radii"))
        spec.radii = cfg.spec.at("radii").get<std::vector<double>>();
    if (cfg.spec.contains("densities"))
        spec.densities = cfg.spec.at("densities").get<std::vector<std::string>>();
    if (cfg.spec.contains("manifolds")) {
        spec.manifolds.clear();
        for (const auto& [label, mj] : cfg.spec.at("manifolds").items())
            spec.manifolds.emplace_back(label, mj);
    }

    const auto cells = run_domain_sweep(spec, cfg.tols);
    std::ofstream csv(cfg.out_dir / "sweep.csv");
    write_sweep_csv(cells, csv);
    emit_plot_data(cells, cfg.out_dir);

    std::size_t counters = 0;
    for (const auto& c : cells)
        if (c.report.status == ReportStatus::Counterexample) ++counters;
    nlohmann::ordered_json j;
    j["cells"] = cells.size();
    j["counterexamples"] = counters;
    write_json(cfg.out_dir / "sweep_report.json", j);
    return counters == 0 ? 0 : 2;
}

}  // namespace detail

inline int run(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.command == "profile") return detail::run_profile(cfg);
    if (cfg.command == "manifold") return detail::run_manifold(cfg);
    if (cfg.command == "check-domain") return detail::run_check_domain(cfg);
    if (cfg.command == "check-submanifold") return detail::run_check_submanifold(cfg);
    if (cfg.command == "abp") return detail::run_abp(cfg);
    if (cfg.command == "sweep") return detail::run_sweep(cfg);
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

}  // namespace ancurv
