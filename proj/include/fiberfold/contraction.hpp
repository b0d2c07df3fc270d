#pragma once

// Banach fixed-point solvers. Both iterations run in z = (L-gamma)w variables,
// exactly as the contraction bound n/c is derived: the shifted inverse is
// diagonal, so one step costs a nonlinearity evaluation plus axpys.

#include "fiberfold/problem.hpp"

#include <optional>

namespace fiberfold {

struct SolveOptions {
    double tol_residual = 1e-10;  // Y-norm residual on the stated contract
    int max_iters = 10000;
    std::optional<Vec> warm_start;  // w in H_X (projected) or u in X (full)
};

struct SolveReport {
    Vec solution;          // w in H_X for the projected solve, u in X for the full solve
    int iterations = 0;    // fixed-point map evaluations, including the initial residual check
    double final_residual = 0.0;
    double observed_rate = 0.0;  // geometric-mean ratio of iterate deltas past the first 3
    double max_ratio = 0.0;      // worst delta ratio past the first 3
};

// Solves F(u) = y on all of X. Requires the full gap condition: no shifted
// eigenvalue inside [-c_full, c_full] with Lipschitz n < c_full; throws
// GapViolated otherwise (e.g. in the fold regime, where the fiber path must
// be used instead).
SolveReport solve_full(const ProblemSpec& ps, const Vec& y, const SolveOptions& opts = {});

// Solves P F(w + t phi_p) = z0 for w in H_X, z0 in H_Y. The iteration is
// restricted to H (p-coefficient frozen at zero); its contraction ratio is
// bounded by n/c < 1 independently of t.
SolveReport solve_projected(const ProblemSpec& ps, const Vec& z0, double t,
                            const SolveOptions& opts = {});

}  // namespace fiberfold
