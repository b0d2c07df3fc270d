#pragma once

// Preimage finding along fibers, critical-point detection, Morin
// classification, and the spectral link between the branch eigenvalue of
// DF(u) and D_t h^a.

#include "fiberfold/fiber.hpp"

#include <array>
#include <string>

namespace fiberfold {

struct AnalysisOptions {
    FiberOptions fiber;
    int trace_steps = 201;
    double root_xtol = 1e-11;     // t-resolution of root refinement
    double height_tol = 1e-9;     // |h - s| accepted at a preimage
    double separation = 1e-4;     // Y-distance below which preimages are merged
    double derivative_step = 0.0;   // 0: 0.2% of the traced window
    double zero_band = 1e-5;        // relative band for "derivative vanishes"
    double rank_tol = 1e-4;         // relative smallest singular value for transversality
    double gap_tol = 1e-3;          // eigenvalue-gap tolerance for simplicity
    double critical_radius_frac = 0.1;  // neighborhood radius as fraction of window
    int transversality_coord_dirs = 8;
    int transversality_rand_dirs = 4;
    double neighbor_delta = 1e-4;   // z-direction step (scaled by 1 + ||z0||)
    int link_subsample = 1;
    unsigned rng_seed = 12345;
};

struct Preimage {
    Vec u;
    double t = 0.0;
    double residual = 0.0;  // ||F(u) - g||_Y
};

struct PreimageSet {
    Vec g;
    double s = 0.0;  // <g, phi_p>
    std::vector<Preimage> solutions;  // sorted by t, pairwise separated
    bool window_too_small = false;    // height has not turned down at a window end
};

// Traces the fiber through z0 = Pg and returns every u on it with
// F(u) = g up to tolerance (bracketed sign changes of h - s plus fold
// tangencies), residual-checked against g.
PreimageSet find_preimages(const ProblemSpec& ps, const Vec& g, double t_lo, double t_hi,
                           const AnalysisOptions& opts = {});

struct CriticalPoint {
    double t_star = 0.0;
    Vec u_star;
    int morin_order = 0;  // 0 = unclassified
    std::string kind_tag = "unclassified";
    double lambda_p = 0.0;  // branch eigenvalue of DF(u*)
    double eig_gap = 0.0;   // distance to the nearest other eigenvalue
    std::array<double, 4> dt_h{};  // D_t^j h^a, j = 1..4
    bool transversality_ok = false;
    bool is_local_max = false;
    bool low_confidence = false;
};

// Interior critical points of the height along the trace: brackets from grid
// slopes, refined by Brent on the exact D_t h^a, with finite-difference
// derivative tables and the branch eigenvalue at u*.
std::vector<CriticalPoint> critical_points(const ProblemSpec& ps, const FiberTrace& trace,
                                           const AnalysisOptions& opts = {});

// Fills morin_order/kind_tag and, for order >= 2, the transversality verdict
// from finite differences across neighboring fibers z0 + delta e_i.
CriticalPoint classify_morin(const ProblemSpec& ps, const FiberTrace& trace, CriticalPoint cp,
                             const AnalysisOptions& opts = {});

struct LinkSample {
    double t = 0.0;
    double lambda_p = 0.0;
    double dt_height = 0.0;
    double gap = 0.0;
    bool near_critical = false;
};

struct SpectralLinkReport {
    std::vector<LinkSample> samples;
    std::vector<double> critical_ts;
    bool signs_consistent = true;     // inside critical neighborhoods with healthy gap
    std::vector<double> collapse_ts;  // gap collapses observed outside neighborhoods
    double p_ratio_min = 0.0;         // empirical lambda_p / D_t h over confident samples
    double p_ratio_max = 0.0;
    int checked_samples = 0;
};

// Samples lambda_p(DF(u)) and D_t h^a along the trace. Inside each critical
// neighborhood the branch must stay simple (throws EigGapCollapse otherwise)
// and the signs must agree; outside, gap collapses are recorded as events.
SpectralLinkReport verify_spectral_link(const ProblemSpec& ps, const FiberTrace& trace,
                                        const AnalysisOptions& opts = {});

struct SweepResult {
    std::vector<double> s_values;
    std::vector<int> counts;
    double fold_boundary = 0.0;  // max height over the fiber (refined)
    bool window_too_small = false;
};

// Preimage count for each s on one traced fiber, plus the fold-image
// boundary estimate s* = max h^a.
SweepResult count_sweep(const ProblemSpec& ps, const Vec& z0, const std::vector<double>& s_values,
                        double t_lo, double t_hi, const AnalysisOptions& opts = {});

// Refined critical parameters of the height along a trace (shared helper).
std::vector<double> locate_critical_ts(const ProblemSpec& ps, const FiberTrace& trace,
                                       const AnalysisOptions& opts = {});

}  // namespace fiberfold
