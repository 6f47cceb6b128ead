#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ancurv/ode.hpp"

using namespace ancurv;

TEST_CASE("flat coefficient gives the linear and constant solutions") {
    auto zero = [](double) { return 0.0; };
    const auto lin = solve_linear_ivp(zero, 0.0, 1.0, 1.0, 1e-10).u;
    const auto one = solve_linear_ivp(zero, 1.0, 0.0, 1.0, 1e-10).u;
    for (std::size_t i = 0; i < lin.size(); i += lin.size() / 7) {
        CHECK(lin.value(i) == Catch::Approx(lin.node(i)).margin(1e-13));
        CHECK(one.value(i) == Catch::Approx(1.0).margin(1e-13));
    }
}

TEST_CASE("model solution h obeys t <= h <= e^{b0} t for exponential decay") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 50.0, 1e-10).u;
    const double grow = std::exp(prof.b0());
    for (std::size_t i = 1; i < h.size(); i += 97) {
        const double t = h.node(i);
        CHECK(h.value(i) >= t - 1e-9);
        CHECK(h.value(i) <= grow * t + 1e-9);
    }
}

TEST_CASE("solver is fourth order on the hyperbolic closed form") {
    // u'' = u, u(0)=0, u'(0)=1 -> sinh t; fixed-step runs compare against it
    auto one = [](double) { return 1.0; };
    std::vector<double> uc, dc, uf, df;
    detail::rk4_second_order(one, 0.0, 1.0, 2.0, 64, uc, dc);
    detail::rk4_second_order(one, 0.0, 1.0, 2.0, 128, uf, df);
    const double ec = std::abs(uc.back() - std::sinh(2.0));
    const double ef = std::abs(uf.back() - std::sinh(2.0));
    CHECK(ec / ef >= 8.0);
}

TEST_CASE("certified error estimate really bounds the error") {
    auto one = [](double) { return 1.0; };
    const auto sol = solve_linear_ivp(one, 0.0, 1.0, 2.0, 1e-8);
    CHECK(std::abs(sol.u.value(sol.u.size() - 1) - std::sinh(2.0)) <=
          10.0 * 1e-8 * (1.0 + std::sinh(2.0)));
}

TEST_CASE("hprime limit: zero profile gives exactly 1") {
    const auto prof = CurvatureProfile::zero();
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 10.0, 1e-10).u;
    CHECK(hprime_limit(h, prof) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("hprime limit lies in the band [1+b0, 1+b0 e^{b0}]") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 60.0, 1e-10).u;
    const double lim = hprime_limit(h, prof);
    CHECK(lim >= 2.0 - 1e-9);
    CHECK(lim <= 1.0 + std::exp(1.0) + 1e-9);
}

TEST_CASE("hprime limit for the linear cutoff agrees with an independent quadrature") {
    const auto prof = CurvatureProfile::linear_cutoff(1.0, 1.0);
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 40.0, 1e-11).u;
    const double lim = hprime_limit(h, prof);
    const double b0 = prof.b0();
    CHECK(lim >= 1.0 + b0 - 1e-10);
    CHECK(lim <= 1.0 + b0 * std::exp(b0) + 1e-10);

    // oracle: endpoint derivative of the solved h (different route than 1 + int lambda h)
    CHECK(lim == Catch::Approx(h.deriv(h.size() - 1)).margin(1e-8));
}

TEST_CASE("hprime limit refuses an unconverged tail") {
    const auto prof = CurvatureProfile::exp_decay(0.05, 1.0);  // slow decay
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 5.0, 1e-8).u;
    CHECK_THROWS_WITH(hprime_limit(h, prof), Catch::Matchers::ContainsSubstring("tail"));
}

TEST_CASE("sturm comparison accepts ordered pairs and equality") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const auto phi = solve_linear_ivp([](double) { return 0.0; }, 1.0, 0.0, 5.0, 1e-10).u;
    const auto psi = solve_linear_ivp(prof, 1.0, 0.0, 5.0, 1e-10).u;

    CHECK(sturm_compare(phi, phi, 5.0).ok());  // equality case
    const auto diag = sturm_compare(phi, psi, 5.0);
    CHECK(diag.ok());
    CHECK(diag.checked_points > 100);
}

TEST_CASE("sturm comparison on the closed forms 1-t versus 1") {
    const std::size_t n = 101;
    std::vector<double> pv(n), pd(n), qv(n, 1.0), qd(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1) * 0.99;
        pv[i] = 1.0 - t;
        pd[i] = -1.0;
    }
    const double dt = 0.99 / (n - 1);
    GridFunction phi(0.0, dt, pv, pd), psi(0.0, dt, qv, qd);
    CHECK(sturm_compare(phi, psi, 0.99).ok());

    // phi <= 0 inside the window is a precondition error
    std::vector<double> bad(n), badd(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) bad[i] = 1.0 - 2.0 * dt * static_cast<double>(i);
    GridFunction phi_bad(0.0, dt, bad, badd);
    CHECK_THROWS_AS(sturm_compare(phi_bad, psi, 0.99), std::domain_error);
}

TEST_CASE("wronskian limits: flat case closed forms") {
    const auto lim = wronskian_limit(CurvatureProfile::zero(), 10.0);
    CHECK(lim.ratio_h2_h1 == Catch::Approx(0.1).margin(1e-12));
    CHECK(lim.ratio_dh2_dh1 == 0.0);
    CHECK(lim.bound == 0.0);
    CHECK(std::abs(lim.identity_residual) <= 1e-12);
}

TEST_CASE("wronskian limits under exponential decay") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const auto l25 = wronskian_limit(prof, 25.0);
    const auto l50 = wronskian_limit(prof, 50.0);
    CHECK(l25.wronskian_drift <= 1e-8);
    CHECK(l50.wronskian_drift <= 1e-8);
    CHECK(l50.ratio_h2_h1 <= l25.ratio_h2_h1 + 1e-12);  // h2/h1 is nonincreasing
    CHECK(l50.ratio_h2_h1 <= l50.bound + 1.0 / 50.0 + 1e-9);
    CHECK(std::abs(l50.identity_residual) <= 1e-9);
    // the two ratios approach a common limit
    CHECK(std::abs(l50.ratio_h2_h1 - l50.ratio_dh2_dh1) <
          std::abs(l25.ratio_h2_h1 - l25.ratio_dh2_dh1) + 1e-12);
}

TEST_CASE("h2/h1 is nonincreasing along the grid") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 0.5);
    const auto h1 = solve_linear_ivp(prof, 0.0, 1.0, 30.0, 1e-10).u;
    const auto h2 = solve_linear_ivp(prof, 1.0, 0.0, 30.0, 1e-10).u;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < h1.size(); i += 61) {
        const double q = h2.value(i) / h1.value(i);
        CHECK(q <= prev + 1e-10);
        prev = q;
    }
}

TEST_CASE("shift and scale ratios") {
    const auto flat = solve_linear_ivp(CurvatureProfile::zero(), 0.0, 1.0, 200.0, 1e-10).u;
    const auto [shift, scale] = shift_scale_limits(flat, 2.0, 100.0);
    CHECK(shift == Catch::Approx(0.98).margin(1e-10));
    CHECK(scale == Catch::Approx(2.0).margin(1e-10));

    const auto [s1, c1] = shift_scale_limits(flat, 1.0, 100.0);
    CHECK(c1 == Catch::Approx(1.0).margin(1e-12));  // identity scaling

    CHECK_THROWS_AS(shift_scale_limits(flat, 120.0, 100.0), std::domain_error);
}

TEST_CASE("shift ratio climbs toward 1 for the exponential profile") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const auto h = solve_linear_ivp(prof, 0.0, 1.0, 220.0, 1e-9).u;
    double prev = 0.0;
    for (double T : {50.0, 100.0, 200.0}) {
        const auto [shift, scale] = shift_scale_limits(h, 1.0, T);
        CHECK(shift > prev);
        CHECK(shift <= 1.0 + 1e-12);
        prev = shift;
    }
}
