#pragma once

// Fiber tracing: the inverse image under F of the vertical line through
// z0 + <phi_p> is a curve t -> u(z0,t) = w(z0,t) + t phi_p, the graph of a map
// from span(phi_p) to H_X. This module traces it, evaluates the adapted
// height h^a(z0,t) = <F(u), phi_p>, and computes fiber tangents.

#include "fiberfold/contraction.hpp"

namespace fiberfold {

struct FiberPoint {
    double t = 0.0;
    Vec w;       // H_X component (zero p-coefficient)
    Vec u;       // w + t phi_p
    double height = 0.0;    // <F(u), phi_p>
    double residual = 0.0;  // ||P F(u) - z0||_Y
};

struct FiberTrace {
    Vec z0;
    std::vector<FiberPoint> points;  // strictly increasing t

    double steepness_bound = 0.0;  // (n/c)/(1-n/c): Y-norm bound on ||dw/dt||
    double max_slope_Y = 0.0;      // observed max ||dw||_Y/|dt| over consecutive points
    double max_slope_X = 0.0;
    long solver_iterations = 0;
    double worst_residual = 0.0;
};

struct FiberOptions {
    SolveOptions solve;
    double height_consistency_tol = 1e-8;
};

// One fiber point by projected contraction; warm start via opts.solve.
FiberPoint solve_point(const ProblemSpec& ps, const Vec& z0, double t,
                       const FiberOptions& opts = {});

// Uniform t-grid swept outward from the sample nearest t = 0, warm-starting
// each solve from its neighbor.
FiberTrace trace_fiber(const ProblemSpec& ps, const Vec& z0, double t_min, double t_max, int steps,
                       const FiberOptions& opts = {});

// Height through both formulas: the p-coefficient of F(u) and the shifted
// closed form lambda_p t - <N_s(u), phi_p>. Throws InvariantFailure if they
// disagree beyond opts.height_consistency_tol.
double height(const ProblemSpec& ps, const FiberPoint& point,
              double consistency_tol = 1e-8);

// Fiber tangent tau with DF(u) tau parallel to phi_p and <tau, phi_p> = 1,
// from the bordered solve on the H-block of DF(u) (the H-block stays
// uniformly invertible under the gap condition, even at critical points).
// Throws IllConditioned if the H-block pivot ratio exceeds 1e12.
Vec tangent(const ProblemSpec& ps, const FiberPoint& point);

// D_t h^a at the point: <DF(u) tau, phi_p>. Shares the Jacobian build with
// tangent when both are needed.
struct TangentSlope {
    Vec tau;
    double dt_height = 0.0;
};
TangentSlope tangent_and_slope(const ProblemSpec& ps, const FiberPoint& point);

// Same, reusing an already assembled Jacobian matrix at point.u.
TangentSlope tangent_and_slope_with(const ProblemSpec& ps, const FiberPoint& point, const Mat& jac);

}  // namespace fiberfold
