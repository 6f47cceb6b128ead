#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ancurv/jacobi.hpp"
#include "ancurv/rng.hpp"

using namespace ancurv;

namespace {

Matrix random_symmetric(SplitMix64& rng, int m, double scale) {
    Matrix A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) A(i, j) = A(j, i) = rng.uniform(-scale, scale);
    return A;
}

// shift the diagonal so tr A / m hits the requested value
Matrix with_trace_mean(Matrix A, double mean) {
    const int m = static_cast<int>(A.rows());
    return A + (mean - A.trace() / m) * Matrix::Identity(m, m);
}

// keep 1 + t lambda_min(A) safely positive on [0, wanted]
double safe_horizon(const Matrix& A, double wanted) {
    const double lam_min = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff();
    if (lam_min >= -0.05) return wanted;
    return std::min(wanted, 0.75 / (-lam_min));
}

// curvature along a radial model geodesic leaving distance d0 at |Du| = speed:
// S(t) = speed^2 diag(K_rad(d0 + speed t) I_{m-1}, 0)
std::function<Matrix(double)> radial_curvature(const ModelManifold& M, int m, double d0,
                                               double speed) {
    return [&M, m, d0, speed](double t) {
        const double r = d0 + speed * t;
        const auto [krad, ktan] = M.sectional_curvatures(r);
        Matrix S = Matrix::Zero(m, m);
        for (int i = 0; i + 1 < m; ++i) S(i, i) = speed * speed * krad;
        return S;
    };
}

JacobiSystem euclidean_system(int m, const Matrix& A, double r, double speed = 0.5) {
    JacobiSystem sys;
    sys.dim = m;
    sys.curvature = [m](double) -> Matrix { return Matrix::Zero(m, m); };
    sys.P0 = Matrix::Identity(m, m);
    sys.dP0 = A;
    sys.horizon = r;
    sys.speed = speed;
    return sys;
}

}  // namespace

TEST_CASE("flat Jacobi systems reproduce P = I + tA") {
    SplitMix64 rng(11u);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + static_cast<int>(rng.next() % 3);
        const Matrix A = random_symmetric(rng, m, 0.4);
        const auto sys = euclidean_system(m, A, 1.0);
        const auto path = integrate_jacobi(sys, 1e-10);
        for (std::size_t i = 0; i < path.size(); i += path.size() / 5) {
            const double t = path.node(i);
            const Matrix expect = Matrix::Identity(m, m) + t * A;
            CHECK((path.P[i] - expect).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("flat determinant closed form: diag(1, -0.3) at t = 1") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = -0.3;
    const auto path = integrate_jacobi(euclidean_system(2, A, 1.0), 1e-11);
    CHECK(path.detP.back() == Catch::Approx(2.0 * 0.7).margin(1e-10));
}

TEST_CASE("riccati variable stays symmetric along model geodesics") {
    const auto M = ModelManifold::capped(4, 0.4, 0.5, 1.5);
    SplitMix64 rng(23u);
    const Matrix A = with_trace_mean(random_symmetric(rng, 4, 0.3), 0.2);
    JacobiSystem sys;
    sys.dim = 4;
    sys.curvature = radial_curvature(M, 4, 1.0, 0.5);
    sys.P0 = Matrix::Identity(4, 4);
    sys.dP0 = A;
    sys.horizon = 2.0;
    sys.speed = 0.5;
    const auto path = integrate_jacobi(sys, 1e-10);
    CHECK(path.q_symmetry_residual <= 1e-9);
}

TEST_CASE("log-det derivative equals the Riccati trace") {
    SplitMix64 rng(31u);
    const Matrix A = random_symmetric(rng, 3, 0.3);
    const auto path = integrate_jacobi(euclidean_system(3, A, 1.5), 1e-10);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < path.size(); i += 7) {
        const double dlog =
            (std::log(path.detP[i + 1]) - std::log(path.detP[i - 1])) / (2.0 * path.dt);
        worst = std::max(worst, std::abs(dlog - path.trQ(i)));
    }
    CHECK(worst <= 1e-6);  // centered difference O(dt^2)
}

TEST_CASE("conjugate point is detected with its location") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = -2.0;  // 1 + tA hits zero at t = 0.5
    A(1, 1) = 0.1;
    try {
        integrate_jacobi(euclidean_system(2, A, 1.0), 1e-9);
        FAIL("expected a conjugate point");
    } catch (const ConjugatePointError& e) {
        CHECK(e.location == Catch::Approx(0.5).margin(2e-3));
    }
}

TEST_CASE("trace riccati inequality: flat case has nonpositive left side") {
    SplitMix64 rng(47u);
    const Matrix A = random_symmetric(rng, 3, 0.4);
    const auto sys = euclidean_system(3, A, 1.0);
    const auto path = integrate_jacobi(sys, 1e-10);
    const auto diag = trace_riccati_check(path, sys, CurvatureProfile::zero(), 1.0);
    CHECK(diag.ok());
    CHECK(diag.checked_points > 100);
}

TEST_CASE("trace riccati inequality on model-manifold sweeps") {
    const auto M = ModelManifold::capped(3, 0.4, 0.5, 1.5);
    const auto prof = admissible_profile(M);
    SplitMix64 rng(59u);
    for (int trial = 0; trial < 10; ++trial) {
        const double speed = rng.uniform(0.2, 0.9);
        const double d0 = rng.uniform(0.2, 2.0);
        const Matrix A = with_trace_mean(random_symmetric(rng, 3, 0.3), rng.uniform(-0.2, 0.3));
        JacobiSystem sys;
        sys.dim = 3;
        sys.curvature = radial_curvature(M, 3, d0, speed);
        sys.P0 = Matrix::Identity(3, 3);
        sys.dP0 = A;
        sys.horizon = safe_horizon(A, 1.5);
        sys.speed = speed;
        const auto path = integrate_jacobi(sys, 1e-9);
        CHECK(trace_riccati_check(path, sys, prof, d0).ok());
    }
}

TEST_CASE("positive curvature bump with a zero profile still satisfies the trace bound") {
    // S psd makes -tr S <= 0; the zero-profile right side is exactly 0
    auto bump = [](double t) -> Matrix {
        Matrix S = Matrix::Zero(3, 3);
        const double b = std::max(0.0, 1.0 - (t - 0.5) * (t - 0.5) * 8.0);
        S(0, 0) = S(1, 1) = 0.25 * b;
        return S;
    };
    JacobiSystem sys;
    sys.dim = 3;
    sys.curvature = bump;
    sys.P0 = Matrix::Identity(3, 3);
    sys.dP0 = with_trace_mean(Matrix::Zero(3, 3), 0.1);
    sys.horizon = 1.0;
    sys.speed = 0.5;
    const auto path = integrate_jacobi(sys, 1e-9);
    CHECK(trace_riccati_check(path, sys, CurvatureProfile::zero(), 1.0).ok());
}

TEST_CASE("psi bounds: vanishing driver gives the exact equality case") {
    LambdaAlong lam{CurvatureProfile::zero(), 0.5, 0.5, 1.0};
    const auto pb = psi_bounds(lam, 10.0, 1.0);
    CHECK(pb.ratio_at_r == Catch::Approx(0.1).margin(1e-10));  // psi2/psi1 = 1/r
    CHECK(pb.ratio_bound == Catch::Approx(0.1).margin(1e-14));
    CHECK(pb.psi1_bound_ok);
    CHECK(pb.psi1_bound_margin <= 1e-9);  // psi1 = t sits on the bound
}

TEST_CASE("psi bounds under an exponential-decay driver") {
    const auto prof = CurvatureProfile::exp_decay(1.0, 1.0);
    const double speed = 0.5, d0 = 1.0;
    LambdaAlong lam{prof, (2.0 / 3.0) * speed * speed, speed, d0};
    const auto pb = psi_bounds(lam, 10.0, /*r0=*/d0);
    CHECK(pb.ratio_at_r < pb.ratio_bound);
    CHECK(pb.ratio_bound <= pb.coarse_ratio_bound + 1e-12);
    CHECK(pb.psi1_bound_ok);
    CHECK(pb.first_moment <= pb.first_moment_bound + 1e-12);
}

TEST_CASE("first moment of the driver against direct quadrature, random cases") {
    const auto prof = CurvatureProfile::exp_decay(1.3, 0.8);
    SplitMix64 rng(71u);
    for (int k = 0; k < 10; ++k) {
        const double speed = rng.uniform(0.15, 0.95);
        const double d0 = rng.uniform(0.0, 3.0);
        LambdaAlong lam{prof, 0.7 * speed * speed, speed, d0};
        // direct quadrature of int_0^T t Lambda(t) dt with a far horizon
        const double T = (d0 + 60.0) / speed;
        const double direct =
            integrate_adaptive([&](double t) { return t * lam(t); }, 0.0, T, 1e-11).value;
        CHECK(lam.first_moment() == Catch::Approx(direct).margin(1e-7));
        CHECK(lam.first_moment() <=
              lam.amplitude / (speed * speed) * (2.0 * d0 * prof.b1() + prof.b0()) + 1e-12);
    }
}

TEST_CASE("comparison dominance: det P^{1/m} <= psi2 + g(0) psi1 nodewise") {
    const auto M = ModelManifold::capped(3, 0.4, 0.5, 1.5);
    const auto prof = admissible_profile(M);
    const double speed = 0.6, d0 = 1.2;
    SplitMix64 rng(83u);
    const Matrix A = with_trace_mean(random_symmetric(rng, 3, 0.25), 0.15);

    JacobiSystem sys;
    sys.dim = 3;
    sys.curvature = radial_curvature(M, 3, d0, speed);
    sys.P0 = Matrix::Identity(3, 3);
    sys.dP0 = A;
    sys.horizon = 1.5;
    sys.speed = speed;
    const auto path = integrate_jacobi(sys, 1e-10);

    LambdaAlong lam{prof, (2.0 / 3.0) * speed * speed, speed, d0};
    const auto pb = psi_bounds(lam, 1.5, d0);
    const double g0 = A.trace() / 3.0;
    for (std::size_t i = 0; i < path.size(); i += 11) {
        const double t = path.node(i);
        const double phi = std::cbrt(path.detP[i]);
        const double psi = pb.psi2(t) + g0 * pb.psi1(t);
        CHECK(phi <= psi + 1e-8);
        // AM-GM form: det P <= psi^m
        CHECK(path.detP[i] <= std::pow(psi, 3) + 1e-8);
    }
}

TEST_CASE("determinant bound: AM-GM instance with fixed trace, brute force") {
    SplitMix64 rng(97u);
    const auto zero = CurvatureProfile::zero();
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            Matrix A = with_trace_mean(random_symmetric(rng, n, 0.4), 0.25);
            const double f = std::pow(A.trace() / n, n - 1.0);  // hypothesis with equality
            const double r = 1.0;
            const auto rep = det_bound_check(euclidean_system(n, A, r), f, zero, 2.0);
            CHECK(rep.status == ReportStatus::Ok);
            CHECK(rep.slack >= -1e-9);
            // brute force: det(I + rA) via eigenvalues against the report lhs
            Eigen::SelfAdjointEigenSolver<Matrix> es(A);
            double det = 1.0;
            for (int i = 0; i < n; ++i) det *= 1.0 + r * es.eigenvalues()[i];
            CHECK(rep.lhs == Catch::Approx(det).margin(1e-8));
        }
    }
}

TEST_CASE("determinant bound is tight for isotropic initial data") {
    const auto zero = CurvatureProfile::zero();
    const int n = 3;
    const double c = 0.4, r = 1.5;
    const Matrix A = c * Matrix::Identity(n, n);
    const auto rep = det_bound_check(euclidean_system(n, A, r), std::pow(c, n - 1.0), zero, 1.0);
    // equality: det(I + rcI) = (1 + rc)^n = (1/r + c)^n r^n
    CHECK(rep.lhs == Catch::Approx(rep.rhs).epsilon(1e-9));
    CHECK(rep.status == ReportStatus::Ok);
}

TEST_CASE("determinant bound rejects a violated trace hypothesis") {
    const Matrix A = 2.0 * Matrix::Identity(3, 3);
    CHECK_THROWS_WITH(
        det_bound_check(euclidean_system(3, A, 0.2), 1e-6, CurvatureProfile::zero(), 1.0),
        Catch::Matchers::ContainsSubstring("hypothesis"));
}

TEST_CASE("determinant bound along model-manifold geodesics") {
    const auto M = ModelManifold::capped(3, 0.15, 0.5, 1.5);
    const auto prof = admissible_profile(M);
    SplitMix64 rng(101u);
    for (int trial = 0; trial < 10; ++trial) {
        const double speed = rng.uniform(0.2, 0.9);
        const double d0 = rng.uniform(0.3, 2.0);
        const double margin = rng.uniform(0.0, 0.3);
        Matrix A = random_symmetric(rng, 3, 0.35);
        const double f = 1.0;
        const double cap = std::pow(f, 0.5) - (4.0 / 3.0) * prof.b1() - margin;
        A = with_trace_mean(A, cap);
        JacobiSystem sys;
        sys.dim = 3;
        sys.curvature = radial_curvature(M, 3, d0, speed);
        sys.P0 = Matrix::Identity(3, 3);
        sys.dP0 = A;
        sys.horizon = safe_horizon(A, rng.uniform(0.5, 2.0));
        sys.speed = speed;
        const auto rep = det_bound_check(sys, f, prof, d0);
        CHECK(rep.status == ReportStatus::Ok);
        CHECK(rep.slack >= 0.0);
    }
}

TEST_CASE("submanifold blocks: closed form t^p det(I + tA) and the sub1 bound") {
    SplitMix64 rng(113u);
    const auto zero = CurvatureProfile::zero();
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng.next() % 2);
        const int p = 2;
        Matrix A = with_trace_mean(random_symmetric(rng, n, 0.3), 0.2);
        Matrix C(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) C(i, j) = rng.uniform(-0.5, 0.5);
        const double f = std::pow(A.trace() / n + 0.1, n - 1.0);
        const double r = 1.2;
        const auto rep = submanifold_det_bound_check(A, C, p, f, zero, 1.0, r, 0.5);
        CHECK(rep.status == ReportStatus::Ok);
        CHECK(rep.terms.at("oracle_deviation") <= 1e-8);
        const double oracle =
            std::pow(r, p) * (Matrix::Identity(n, n) + r * A).determinant();
        CHECK(rep.lhs == Catch::Approx(oracle).margin(1e-8));
    }
}

TEST_CASE("submanifold blocks: isotropic data reduces to the domain case") {
    const auto zero = CurvatureProfile::zero();
    const int n = 3, p = 2;
    const double c = 0.3, r = 1.0;
    const Matrix A = c * Matrix::Identity(n, n);
    const Matrix C = Matrix::Zero(n, p);
    const auto rep = submanifold_det_bound_check(A, C, p, std::pow(c, n - 1.0), zero, 1.0, r, 0.5);
    // det P = r^p (1 + rc)^n and the bound is exactly r^p (1/r + c)^n r^n
    CHECK(rep.lhs == Catch::Approx(std::pow(r, p) * std::pow(1.0 + r * c, n)).margin(1e-9));
    CHECK(rep.lhs == Catch::Approx(rep.rhs).epsilon(1e-9));
}

TEST_CASE("submanifold determinant behaves like t^p near zero") {
    const auto zero = CurvatureProfile::zero();
    const int n = 3, p = 2;
    SplitMix64 rng(127u);
    const Matrix A = with_trace_mean(random_symmetric(rng, n, 0.2), 0.1);
    Matrix C(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) C(i, j) = rng.uniform(-0.4, 0.4);

    JacobiSystem sys;
    sys.dim = n + p;
    sys.curvature = [](double) -> Matrix { return Matrix::Zero(5, 5); };
    sys.P0 = Matrix::Zero(5, 5);
    sys.P0.topLeftCorner(n, n) = Matrix::Identity(n, n);
    sys.dP0 = Matrix::Zero(5, 5);
    sys.dP0.topLeftCorner(n, n) = A;
    sys.dP0.topRightCorner(n, p) = C;
    sys.dP0.bottomRightCorner(p, p) = Matrix::Identity(p, p);
    sys.horizon = 1.0;
    sys.speed = 0.5;
    const auto path = integrate_jacobi(sys, 1e-10);
    CHECK(path.q_begin > 0);
    CHECK(path.q_symmetry_residual <= 1e-8);
    // det P / t^p -> det(I) = 1 as t -> 0+
    for (std::size_t i = path.q_begin; i < path.q_begin + 3; ++i) {
        const double t = path.node(i);
        const double scaled = path.detP[i] / std::pow(t, p);
        const double expect = (Matrix::Identity(n, n) + t * A).determinant();
        CHECK(scaled == Catch::Approx(expect).epsilon(1e-6));
        CHECK(std::abs(scaled - 1.0) <= 0.3);  // close to det(I) for small t
    }
}

TEST_CASE("measure transport: euclidean unit ball closed forms") {
    const RadialDomain dom(ModelManifold::euclidean(3), 1.0);
    const auto zero = CurvatureProfile::zero();
    const auto fn = normalize_density(dom, RadialDensity::constant(1.0, 1.0), zero).density;
    const auto u = solve_radial_neumann(dom, fn, zero);
    const auto reports =
        measure_transport_check(dom, fn, u, zero, {2.0, 4.0, 8.0, 16.0}, 1.0);
    REQUIRE(reports.size() == 5);

    const double B3 = unit_ball_volume(3);
    for (std::size_t k = 0; k + 1 < reports.size(); ++k) {
        const auto& rep = reports[k];
        CHECK(rep.status == ReportStatus::Ok);
        const double r = rep.terms.at("r");
        // closed forms: lhs = |B^3|(r-1)^3, rhs = |B^3|(1+r)^3
        CHECK(rep.lhs == Catch::Approx(B3 * std::pow(r - 1.0, 3)).epsilon(1e-9));
        CHECK(rep.rhs == Catch::Approx(B3 * std::pow(1.0 + r, 3)).epsilon(1e-9));
        CHECK(rep.lhs < rep.rhs);
    }
    // normalized sides approach each other: asymptotically tight
    const auto& last = reports[reports.size() - 2];
    CHECK(last.terms.at("normalized_lhs") / last.terms.at("normalized_rhs") > 0.65);

    // the limit report recovers the Sobolev constant with equality here
    const auto& lim = reports.back();
    CHECK(lim.theorem == "d4-limit");
    CHECK(lim.lhs == Catch::Approx(B3).epsilon(1e-9));
    CHECK(lim.rhs == Catch::Approx(B3).epsilon(1e-8));
    CHECK(lim.status == ReportStatus::Ok);
}

TEST_CASE("measure transport on a capped manifold") {
    const RadialDomain dom(ModelManifold::capped(3, 0.3, 0.4, 1.2), 1.0);
    const auto prof = admissible_profile(dom.manifold);
    const double theta = asymptotic_volume_ratio(dom.manifold, prof, 1e-6);
    const auto fn = normalize_density(dom, RadialDensity::constant(1.0, 1.0), prof).density;
    const auto u = solve_radial_neumann(dom, fn, prof);
    const auto reports = measure_transport_check(dom, fn, u, prof, {2.0, 8.0, 32.0}, theta);
    for (const auto& rep : reports) CHECK(rep.status == ReportStatus::Ok);
    // lower sandwich volume at r = 2 r0 is strictly positive
    CHECK(reports.front().lhs > 0.0);
}
