#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "fiberfold/analysis.hpp"
#include "fiberfold/presets.hpp"

#include <numbers>

using namespace fiberfold;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("affine nonlinearity gives a vertical fiber (w constant in t)") {
    Nonlinearity f = Nonlinearity::piecewise_linear(1.0, 1.0, 2.0);
    auto op = std::make_shared<SpectralOperator>(SpectralBasis(make_box({kPi}), {16}, 4), f);
    ProblemSpec ps = make_problem(op);
    Vec z0 = fftest::random_coefficients(ps.dim(), 4);
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -5.0, 5.0, 21);
    for (const FiberPoint& pt : trace.points)
        CHECK(dist2(pt.w, trace.points[0].w) < 1e-9);
}

TEST_CASE("linear problem has height lambda_p_shifted * t plus a constant") {
    Preset preset = make_preset("linear1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -3.0, 3.0, 13);
    for (const FiberPoint& pt : trace.points)
        CHECK(pt.height == doctest::Approx(ps.mu(ps.p) * pt.t).epsilon(1e-10));
}

TEST_CASE("height at the zero solution is -f(0) <1, phi_1>") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    // the fiber through z0 = P F(0) passes through u = 0 at t = 0
    Vec zero(ps.dim(), 0.0);
    Vec z0 = ps.apply_F(zero);
    ps.project_H(z0);
    FiberPoint pt = solve_point(ps, z0, 0.0);
    CHECK(norm2(pt.w) < 1e-9);
    const double mass = 8.0 * std::sqrt(2.0) / (kPi * kPi);  // <1, phi_1> by hand
    CHECK(pt.height == doctest::Approx(-47.12 * mass).epsilon(1e-8));
    // and the quadrature oracle for <1, phi_1>
    const double mass_quad = fftest::simpson2(
        [](double x, double y) {
            return std::sqrt(2.0) * std::sin(kPi * x) * std::sin(kPi * y / 2.0);
        },
        0.0, 1.0, 0.0, 2.0, 801);
    CHECK(mass == doctest::Approx(mass_quad).epsilon(1e-10));
}

TEST_CASE("height equals the p-coefficient of F(u) on traced points") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -8.0, 8.0, 33);
    for (const FiberPoint& pt : trace.points) {
        CHECK(pt.height == doctest::Approx(ps.apply_F(pt.u)[ps.p]).epsilon(1e-12));
        CHECK(height(ps, pt) == doctest::Approx(pt.height).epsilon(1e-12));
    }
}

TEST_CASE("ap2d profile: three interior criticals, ends turned down") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    AnalysisOptions opts;
    FiberTrace trace = trace_fiber(ps, z0, -40.0, 40.0, 201, opts.fiber);
    std::vector<double> crit = locate_critical_ts(ps, trace, opts);
    CHECK(crit.size() >= 3);
    CHECK(trace.points.front().height < -80.0);
    CHECK(trace.points.back().height < -80.0);
    CHECK(trace.worst_residual <= 1e-10);
}

TEST_CASE("steepness: observed dw/dt stays below the n/c bound") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -40.0, 40.0, 201);
    CHECK(trace.steepness_bound == doctest::Approx(1.0).epsilon(1e-12));  // 0.5/(1-0.5)
    CHECK(trace.max_slope_Y <= trace.steepness_bound * 1.05);
    // the angle between chords and phi_p stays below pi/2 by a fixed margin
    const double angle = std::atan(trace.max_slope_Y);
    CHECK(angle < kPi / 2.0 - 0.5);
}

TEST_CASE("refining the grid does not move heights at shared parameters") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace coarse = trace_fiber(ps, z0, -10.0, 10.0, 41);
    FiberTrace fine = trace_fiber(ps, z0, -10.0, 10.0, 81);
    for (std::size_t i = 0; i < coarse.points.size(); ++i) {
        const FiberPoint& a = coarse.points[i];
        const FiberPoint& b = fine.points[2 * i];
        CHECK(a.t == doctest::Approx(b.t).epsilon(1e-12));
        CHECK(a.height == doctest::Approx(b.height).epsilon(1e-9));
    }
}

TEST_CASE("tangent of the linear problem is phi_p") {
    Preset preset = make_preset("linear1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberPoint pt = solve_point(ps, z0, 1.0);
    Vec tau = tangent(ps, pt);
    CHECK(tau[ps.p] == 1.0);
    for (int k = 0; k < ps.dim(); ++k)
        if (k != ps.p) CHECK(std::fabs(tau[k]) < 1e-12);
}

TEST_CASE("tangent matches the finite-difference derivative of the fiber") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    const double t0 = 2.5;
    FiberPoint pt = solve_point(ps, z0, t0);
    Vec tau = tangent(ps, pt);

    FiberOptions fo;
    fo.solve.tol_residual = 1e-12;
    double best = 1e300;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        FiberPoint pp = solve_point(ps, z0, t0 + h, fo);
        FiberPoint pm = solve_point(ps, z0, t0 - h, fo);
        Vec fd = pp.u - pm.u;
        scale(fd, 1.0 / (2.0 * h));
        best = std::min(best, dist2(fd, tau));
    }
    CHECK(best < 1e-5 * (1.0 + norm2(tau)));
}

TEST_CASE("height slope via the tangent matches finite differences of h") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    for (double t0 : {-4.0, 0.3, 2.0}) {
        FiberPoint pt = solve_point(ps, z0, t0);
        TangentSlope ts = tangent_and_slope(ps, pt);
        FiberOptions fo;
        fo.solve.tol_residual = 1e-12;
        const double h = 1e-5;
        const double fd =
            (solve_point(ps, z0, t0 + h, fo).height - solve_point(ps, z0, t0 - h, fo).height) /
            (2.0 * h);
        CHECK(ts.dt_height == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("at a critical point the tangent is the kernel eigenvector") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    AnalysisOptions opts;
    FiberTrace trace = trace_fiber(ps, z0, -40.0, 40.0, 201, opts.fiber);
    std::vector<double> crit = locate_critical_ts(ps, trace, opts);
    REQUIRE(!crit.empty());
    FiberPoint pt = solve_point(ps, z0, crit.front());
    Vec tau = tangent(ps, pt);
    scale(tau, 1.0 / norm2(tau));

    Mat m = ps.jacobian_matrix(pt.u);
    SymEigen eig = sym_eigen(m);
    Vec v(ps.dim());
    for (int i = 0; i < ps.dim(); ++i) v[i] = eig.vectors(i, ps.p);
    const double cosine = std::fabs(dot(tau, v));
    CHECK(cosine > 0.999);
    CHECK(std::fabs(eig.values[ps.p]) < 1e-6);
}

TEST_CASE("trace windows and steps are validated") {
    Preset preset = make_preset("linear1d");
    Vec z0(preset.problem.dim(), 0.0);
    CHECK_THROWS_AS(trace_fiber(preset.problem, z0, 1.0, -1.0, 10), ConfigError);
    CHECK_THROWS_AS(trace_fiber(preset.problem, z0, 0.0, 1.0, 1), ConfigError);
}
