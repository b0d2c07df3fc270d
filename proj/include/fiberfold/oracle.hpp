#pragma once

// Independent verification layer: damped-Newton multistart preimage search,
// finite-dimensional matrix models of the abstract L - N setting, and the
// adapted-coordinate normal-form toys (global fold and cusp).

#include "fiberfold/analysis.hpp"

namespace fiberfold {

struct NewtonOptions {
    double tol = 1e-10;
    int max_newton_iters = 60;
    int max_backtracks = 14;
    double dedup_distance = 1e-4;  // Y-distance below which solutions merge
    // starts are independent; results are merged in start order, so the
    // outcome is seed-reproducible for any thread count
    int threads = 1;
};

struct MultistartResult {
    PreimageSet preimages;
    int converged_starts = 0;
    int dropped_starts = 0;
};

// Damped (Armijo) Newton on F(u) = g from structured starts (zero, L^{-1}g,
// multiples of phi_p across [t_lo, t_hi]) plus seeded random starts.
// Non-convergent starts are dropped and counted; solutions are deduplicated
// by Y-distance and sorted by their t-coordinate <u, phi_p>.
MultistartResult newton_multistart(const ProblemSpec& ps, const Vec& g, int n_starts,
                                   unsigned seed, double t_lo, double t_hi,
                                   const NewtonOptions& opts = {});

struct GivensRotation {
    int i = 0;
    int j = 1;
    double theta = 0.0;
};

struct MatrixModelSpec {
    Vec spectrum;  // diag of L, ascending; shifted convention (gamma = 0)
    int p = 0;
    double scale = 0.5;  // s: N(u) = s * O^T m(O u)
    enum class Map { Sin, Tanh } map = Map::Sin;
    std::vector<GivensRotation> rotations;  // O as a product of plane rotations
};

// Desk-scale instance of the abstract setting, usable by the contraction,
// fiber and analysis modules unchanged. Rejects spectra violating the
// interaction window hypothesis.
ProblemSpec make_matrix_model(const MatrixModelSpec& spec);

enum class ToyKind { Fold, Cusp };

// Adapted-coordinate normal forms, built directly as operator models whose
// projected nonlinearity vanishes (fibers are exact vertical lines):
// fold: h^a(z,t) = -t^2; cusp: h^a(z,t) = t^3 - <z, phi_tilde> t.
// phi_tilde defaults to (e1 + e2)/sqrt(2) in H.
ProblemSpec normal_form_toy(ToyKind kind, int dim, Vec phi_tilde = {});

struct ToyClassification {
    CriticalPoint at_origin;  // classified critical point of the z0 = 0 fiber
    std::vector<std::pair<double, int>> counts_by_offset;  // <z,phi~> -> critical count
};

// Traces the z0 = 0 fiber of the toy, classifies its critical point, and for
// the cusp sweeps z along phi_tilde to expose the changing critical-point
// count across the cusp.
ToyClassification classify_toy(ToyKind kind, int dim, const std::vector<double>& offsets,
                               const AnalysisOptions& opts = {});

struct BiLipschitzEstimate {
    double upper = 0.0;  // max sampled singular value of the PF_t derivative
    double lower = 0.0;  // min sampled singular value
};

// Sampled bi-Lipschitz constants of PF_t at fixed t: extreme singular values
// of the H-block of DF(u) over widely sampled slice positions. The same seed
// draws the same positions at every t, so variation across t isolates the
// t-dependence.
BiLipschitzEstimate measure_pf_t(const ProblemSpec& ps, double t, int n_samples, unsigned seed,
                                 double radius = 1.0);

}  // namespace fiberfold
