#include "fiberfold/fiber.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fiberfold {

namespace {

double norm_X_weighted(const ProblemSpec& ps, const Vec& v) {
    double s = 0.0;
    for (int k = 0; k < ps.dim(); ++k) {
        const double x = (1.0 + ps.mu(k)) * v[k];
        s += x * x;
    }
    return std::sqrt(s);
}

FiberPoint assemble_point(const ProblemSpec& ps, double t, const SolveReport& rep,
                          double consistency_tol) {
    FiberPoint pt;
    pt.t = t;
    pt.w = rep.solution;
    pt.u = rep.solution;
    pt.u[ps.p] = t;
    pt.residual = rep.final_residual;
    // p-coefficient of F(u), cross-checked against the shifted closed form
    const Vec Fu = ps.apply_F(pt.u);
    pt.height = Fu[ps.p];
    const Vec ns = ps.apply_N_shifted(pt.u);
    const double closed_form = ps.lambda_p_shifted * t - ns[ps.p];
    if (std::fabs(closed_form - pt.height) > consistency_tol * (1.0 + std::fabs(pt.height))) {
        std::ostringstream os;
        os << "height formulas disagree at t = " << t << ": direct " << pt.height
           << " vs shifted " << closed_form;
        throw InvariantFailure(os.str());
    }
    return pt;
}

}  // namespace

FiberPoint solve_point(const ProblemSpec& ps, const Vec& z0, double t, const FiberOptions& opts) {
    SolveReport rep = solve_projected(ps, z0, t, opts.solve);
    return assemble_point(ps, t, rep, opts.height_consistency_tol);
}

FiberTrace trace_fiber(const ProblemSpec& ps, const Vec& z0, double t_min, double t_max, int steps,
                       const FiberOptions& opts) {
    if (!(t_min < t_max) || steps < 2) throw ConfigError("trace_fiber needs t_min < t_max, steps >= 2");
    FiberTrace trace;
    trace.z0 = z0;
    const double ratio = ps.contraction_ratio();
    trace.steepness_bound = ratio < 1.0 ? ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();

    Vec ts(steps);
    for (int i = 0; i < steps; ++i)
        ts[i] = t_min + (t_max - t_min) * i / (steps - 1);

    // start at the grid point nearest t = 0 and sweep outward both ways
    int start = 0;
    for (int i = 1; i < steps; ++i)
        if (std::fabs(ts[i]) < std::fabs(ts[start])) start = i;

    std::vector<FiberPoint> pts(steps);
    SolveOptions solve = opts.solve;
    {
        SolveReport rep = solve_projected(ps, z0, ts[start], solve);
        pts[start] = assemble_point(ps, ts[start], rep, opts.height_consistency_tol);
        trace.solver_iterations += rep.iterations;
    }
    for (int i = start + 1; i < steps; ++i) {
        solve.warm_start = pts[i - 1].w;
        SolveReport rep = solve_projected(ps, z0, ts[i], solve);
        pts[i] = assemble_point(ps, ts[i], rep, opts.height_consistency_tol);
        trace.solver_iterations += rep.iterations;
    }
    for (int i = start - 1; i >= 0; --i) {
        solve.warm_start = pts[i + 1].w;
        SolveReport rep = solve_projected(ps, z0, ts[i], solve);
        pts[i] = assemble_point(ps, ts[i], rep, opts.height_consistency_tol);
        trace.solver_iterations += rep.iterations;
    }

    for (int i = 0; i + 1 < steps; ++i) {
        const double dt = pts[i + 1].t - pts[i].t;
        Vec dw = pts[i + 1].w - pts[i].w;
        trace.max_slope_Y = std::max(trace.max_slope_Y, norm2(dw) / dt);
        trace.max_slope_X = std::max(trace.max_slope_X, norm_X_weighted(ps, dw) / dt);
    }
    for (const FiberPoint& pt : pts) trace.worst_residual = std::max(trace.worst_residual, pt.residual);
    trace.points = std::move(pts);
    return trace;
}

double height(const ProblemSpec& ps, const FiberPoint& point, double consistency_tol) {
    const Vec Fu = ps.apply_F(point.u);
    const double h = Fu[ps.p];
    const Vec ns = ps.apply_N_shifted(point.u);
    const double closed_form = ps.lambda_p_shifted * point.t - ns[ps.p];
    if (std::fabs(closed_form - h) > consistency_tol * (1.0 + std::fabs(h)))
        throw InvariantFailure("height formulas disagree");
    return h;
}

namespace {

TangentSlope tangent_from_matrix(const ProblemSpec& ps, const FiberPoint& point, const Mat& m) {
    const int n = ps.dim();
    const int p = ps.p;

    // bordered system: solve the H-block against -DF(u) phi_p, pin tau_p = 1
    const int h = n - 1;
    Mat a(h, h);
    Vec b(h);
    for (int i = 0, ii = 0; i < n; ++i) {
        if (i == p) continue;
        b[ii] = -m(i, p);
        for (int j = 0, jj = 0; j < n; ++j) {
            if (j == p) continue;
            a(ii, jj) = m(i, j);
            ++jj;
        }
        ++ii;
    }
    LuFactors lu = lu_factor(std::move(a));
    if (lu.singular || lu.pivot_ratio > 1e12) {
        std::ostringstream os;
        os << "H-block of DF(u) ill conditioned at t = " << point.t
           << " (pivot ratio " << lu.pivot_ratio << ")";
        throw IllConditioned(os.str());
    }
    lu_solve(lu, b);

    TangentSlope out;
    out.tau.assign(n, 0.0);
    out.tau[p] = 1.0;
    for (int i = 0, ii = 0; i < n; ++i) {
        if (i == p) continue;
        out.tau[i] = b[ii++];
    }
    // D_t h^a = <DF(u) tau, phi_p>: row p of the Jacobian against tau
    out.dt_height = kernels::dot(m.row(p), out.tau.data(), n);
    return out;
}

}  // namespace

Vec tangent(const ProblemSpec& ps, const FiberPoint& point) {
    const Mat m = ps.jacobian_matrix(point.u);
    return tangent_from_matrix(ps, point, m).tau;
}

TangentSlope tangent_and_slope(const ProblemSpec& ps, const FiberPoint& point) {
    const Mat m = ps.jacobian_matrix(point.u);
    return tangent_from_matrix(ps, point, m);
}

TangentSlope tangent_and_slope_with(const ProblemSpec& ps, const FiberPoint& point, const Mat& jac) {
    return tangent_from_matrix(ps, point, jac);
}

}  // namespace fiberfold
