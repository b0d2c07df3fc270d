#pragma once

// Behavior of F and of fibers at infinity: the turn-down conditions (V+/-),
// asymptotic fiber directions w+/-, the slope-limit comparison between fibers
// and vertical lines, and the Fucik half-fiber collapse that breaks
// properness.

#include "fiberfold/analysis.hpp"

namespace fiberfold {

struct VReport {
    bool v_plus_ok = false;
    bool v_minus_ok = false;
    double eps_requested = 0.0;
    double T = 0.0;
    // largest eps for which each inequality holds on the sampled tail
    double eps_plus_max = 0.0;
    double eps_minus_max = 0.0;
    // witness constants at the requested eps
    double c_plus = 0.0;
    double c_minus = 0.0;
};

// Verifies <N(u(z,t)), phi_p> > (lambda_p +- eps) t + c on all samples with
// |t| > T, via the equivalent height form h^a(t) < -eps(t - T) + h^a(T).
VReport check_V(const ProblemSpec& ps, const FiberTrace& trace, double epsilon, double T);

struct AsymptoticDirections {
    Vec w_plus;
    Vec w_minus;
    double residual_plus = 0.0;   // defining-equation residual
    double residual_minus = 0.0;
    double n_infinity_pairing = 0.0;  // <N_inf(phi_p), phi_p> (shifted)
};

// Unique solutions of L w - P N_inf(w + phi_p) = 0 and
// L w + P N_inf(-w - phi_p) = 0 (shifted form), by the same contraction as
// the projected solver: N_inf obeys the same Lipschitz bound.
AsymptoticDirections asymptotic_directions(const ProblemSpec& ps, const SolveOptions& opts = {});

struct SlopeLimitReport {
    double eps = 0.0;          // Lipschitz constant of N shifted to gamma' = mu_p
    double inv_norm = 0.0;     // ||(L'|_H)^{-1}||
    double q = 0.0;            // <N_inf(phi_p), phi_p> at the mu_p shift
    bool hyp_positivity = false;   // q > 0
    bool hyp_small_linear = false; // eps * inv_norm < 1/2
    bool hyp_small_quadratic = false;  // eps^2 * inv_norm < q/2
    bool hypotheses_hold = false;
    double limit_estimate = 0.0;  // Richardson-extrapolated lim h^a/t, t -> +inf
    bool conclusion_holds = false;  // |limit + q| < q
    double T = 0.0;
};

// Compares the height growth along the fiber through trace.z0 with the
// vertical line through the origin, sampling t in {T, 2T, 4T}.
SlopeLimitReport slope_limit_compare(const ProblemSpec& ps, const FiberTrace& trace,
                                     double T = 250.0, const AnalysisOptions& opts = {});

struct VerticalityFit {
    double alpha = 0.0;  // fitted decay exponent of ||w(z,t)||_X / |t| ~ C |t|^-alpha
    double c = 0.0;
    std::vector<std::pair<double, double>> samples;  // (|t|, ||w||_X/|t|)
};

// Least-squares power-law fit of the verticality ratio at |t| = T, 2T, 4T.
// The exponent is reported, not asserted: the w+- = 0 case shows alpha > 0.
VerticalityFit fit_verticality(const ProblemSpec& ps, const Vec& z0, double T, bool positive_side,
                               const AnalysisOptions& opts = {});

struct FucikPair {
    int p = 0;
    double a = 0.0;  // slope for u < 0
    double b = 0.0;  // slope for u > 0
    double c1 = 0.0; // mu_p - a
    double c2 = 0.0; // b - mu_p
};

// Locates (a, b) on the Fucik curve of -d^2/dx^2 on [0, length] through
// (mu_p, mu_p) with the given b > mu_p, by shooting on the piecewise-linear
// ODE -u'' = b u^+ - a u^-. Throws FucikLocationFailed when the pair cannot
// be bracketed or the zero count is wrong (e.g. p = 1).
FucikPair locate_fucik_pair(double length, int p, double b_slope, int rk_steps = 8000);

struct FucikReport {
    bool collapse_verified = false;
    double max_height_scaled = 0.0;    // max |h^a(0,t)| / (1 + t)
    double max_residual_scaled = 0.0;  // max ||F(u(0,t))||_Y / (1 + t)
    double T = 0.0;
    double tol = 0.0;
};

// Traces the fiber through z0 = 0 for t in [0, T] and verifies the half-fiber
// collapse: heights and full residuals stay below tol*(1+t).
FucikReport fucik_check(const ProblemSpec& ps, double T, double tol = 0.02,
                        const AnalysisOptions& opts = {});

}  // namespace fiberfold
