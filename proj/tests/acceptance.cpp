// Acceptance suite: runs every shipped criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.

#include "fiberfold/asymptotics.hpp"
#include "fiberfold/oracle.hpp"
#include "fiberfold/presets.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

using namespace fiberfold;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. eigenvalues of the ap2d rectangle against the pi^2 formulas
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Preset preset = make_preset("ap2d");
    const double l1 = preset.problem.mu(0);
    const double l2 = preset.problem.mu(1);
    const double dt = seconds_since(t0);
    const bool pass =
        std::fabs(l1 - 12.337) <= 1e-3 && std::fabs(l2 - 19.739) <= 1e-3 && dt < 1.0;
    std::ostringstream os;
    os << "lambda_1 = " << l1 << ", lambda_2 = " << l2 << " (" << dt << " s)";
    report(1, "eigenvalues", pass, os.str());
}

struct FourPreimages {
    PreimageSet set;
    bool ok = false;
};

// 2. four preimages of the displayed g, matching Newton multistart as a set
FourPreimages criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    const Vec& g = *ps.rhs;
    const double s = g[ps.p];

    AnalysisOptions opts;
    FourPreimages out;
    out.set = find_preimages(ps, g, -40.0, 40.0, opts);

    bool residuals_ok = out.set.solutions.size() == 4;
    for (const Preimage& pre : out.set.solutions) residuals_ok &= pre.residual <= 1e-8;

    MultistartResult newton = newton_multistart(ps, g, 200, 7, -40.0, 40.0);
    bool match = newton.preimages.solutions.size() == out.set.solutions.size();
    double worst = 0.0;
    if (match)
        for (std::size_t i = 0; i < out.set.solutions.size(); ++i) {
            worst = std::max(worst,
                             dist2(out.set.solutions[i].u, newton.preimages.solutions[i].u));
        }
    match = match && worst <= 1e-6;

    // convention-free band check: some height in the sweep reaches count 4
    Vec z0 = g;
    ps.project_H(z0);
    SweepResult sweep =
        count_sweep(ps, z0, {-50.0, -46.0, -43.0, -40.0, -37.0}, -40.0, 40.0, opts);
    int band_max = 0;
    for (int c : sweep.counts) band_max = std::max(band_max, c);

    const double dt = seconds_since(t0);
    out.ok = residuals_ok && match && band_max == 4 && dt < 120.0;
    std::ostringstream os;
    os << out.set.solutions.size() << " preimages at s = <g,phi_1> = " << s
       << " (paper figure axis: -12.3), newton worst dist " << worst << ", band max " << band_max
       << " (" << dt << " s)";
    report(2, "four-preimage reproduction", out.ok, os.str());
    return out;
}

// 3. maximum-principle ordering of the four solutions
void criterion_3(const FourPreimages& four) {
    Preset preset = make_preset("ap2d");
    const SpectralBasis& basis = *preset.problem.op->spectral_basis();
    if (four.set.solutions.size() != 4) {
        report(3, "pointwise ordering", false, "criterion 2 did not produce four solutions");
        return;
    }
    std::vector<Vec> nodal;
    double scale_max = 0.0;
    for (const Preimage& pre : four.set.solutions) {
        Vec grid;
        basis.synthesize(pre.u, grid);
        scale_max = std::max(scale_max, max_abs(grid));
        nodal.push_back(std::move(grid));
    }
    double worst = 0.0;
    for (std::size_t s = 0; s + 1 < nodal.size(); ++s)
        for (std::size_t i = 0; i < nodal[s].size(); ++i)
            worst = std::max(worst, nodal[s][i] - nodal[s + 1][i]);
    const bool pass = worst <= 1e-6 * scale_max;
    std::ostringstream os;
    os << "worst ordering violation " << worst << " against scale " << scale_max;
    report(3, "pointwise ordering", pass, os.str());
}

// 4. projected contraction rate bounded by n/c + 0.05 at random t
void criterion_4() {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ts(-40.0, 40.0);
    const double bound = ps.contraction_ratio() + 0.05;
    double worst = 0.0;
    bool pass = true;
    for (int trial = 0; trial < 12; ++trial) {
        SolveReport rep = solve_projected(ps, z0, ts(rng));
        worst = std::max(worst, rep.observed_rate);
        pass &= rep.observed_rate <= bound && rep.final_residual <= 1e-10;
    }
    std::ostringstream os;
    os << "worst observed rate " << worst << " vs bound " << bound << " (n/c = "
       << ps.contraction_ratio() << ")";
    report(4, "contraction rate", pass, os.str());
}

// 5. fold counting on the convex problem: counts in {0,1,2}, folds only,
// a single eigenvalue sign change per fiber
void criterion_5() {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    opts.trace_steps = 301;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);

    FiberTrace trace = trace_fiber(ps, z0, -60.0, 60.0, opts.trace_steps, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    bool folds_ok = !cps.empty();
    for (CriticalPoint cp : cps) {
        cp = classify_morin(ps, trace, cp, opts);
        folds_ok &= cp.morin_order == 1 && cp.kind_tag == "fold";
    }

    std::vector<double> s_values;
    for (int i = 0; i < 50; ++i) s_values.push_back(-8.0 + 8.4 * i / 49.0);
    SweepResult sweep = count_sweep(ps, z0, s_values, -60.0, 60.0, opts);
    bool counts_ok = true;
    for (int c : sweep.counts) counts_ok &= c >= 0 && c <= 2;

    AnalysisOptions link_opts = opts;
    link_opts.link_subsample = 3;
    SpectralLinkReport link = verify_spectral_link(ps, trace, link_opts);
    int flips = 0;
    for (std::size_t i = 0; i + 1 < link.samples.size(); ++i)
        if (link.samples[i].lambda_p * link.samples[i + 1].lambda_p < 0.0) ++flips;

    const bool pass = folds_ok && counts_ok && flips == 1;
    std::ostringstream os;
    os << cps.size() << " critical point(s), all folds: " << (folds_ok ? "yes" : "no")
       << "; counts in {0,1,2}: " << (counts_ok ? "yes" : "no") << "; lambda sign flips = "
       << flips;
    report(5, "fold counting (AP case)", pass, os.str());
}

// 6. spectral link on both presets
void criterion_6() {
    bool pass = true;
    std::ostringstream os;
    for (const char* name : {"ap2d", "ap-convex-1d"}) {
        Preset preset = make_preset(name);
        const ProblemSpec& ps = preset.problem;
        AnalysisOptions opts;
        opts.link_subsample = name == std::string("ap2d") ? 4 : 2;
        Vec z0 = *ps.rhs;
        ps.project_H(z0);
        FiberTrace trace =
            trace_fiber(ps, z0, preset.t_lo, preset.t_hi, preset.steps, opts.fiber);
        SpectralLinkReport rep = verify_spectral_link(ps, trace, opts);
        pass &= rep.signs_consistent && rep.checked_samples > 0 && rep.p_ratio_min > 0.0;
        os << name << ": " << rep.checked_samples << " samples, p(u) in [" << rep.p_ratio_min
           << ", " << rep.p_ratio_max << "]; ";
    }
    report(6, "spectral link", pass, os.str());
}

// 7. cusp toy: order, transversality, and the 0 -> 1 -> 2 count transition
void criterion_7() {
    ToyClassification tc = classify_toy(ToyKind::Cusp, 6, {-1.0, -0.5, 0.0, 0.5, 1.0});
    std::vector<int> counts;
    for (auto [c, n] : tc.counts_by_offset) counts.push_back(n);
    const bool pass = tc.at_origin.morin_order == 2 && tc.at_origin.transversality_ok &&
                      counts == std::vector<int>{0, 0, 1, 2, 2};
    std::ostringstream os;
    os << "origin order " << tc.at_origin.morin_order << " ("
       << (tc.at_origin.transversality_ok ? "transversal" : "NOT transversal") << "), counts";
    for (int c : counts) os << " " << c;
    report(7, "cusp toy", pass, os.str());
}

// 8. asymptotic verticality of the convex problem
void criterion_8() {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    auto x_norm = [&](const Vec& v) {
        double s = 0.0;
        for (int k = 0; k < ps.dim(); ++k) {
            const double x = (1.0 + ps.mu(k)) * v[k];
            s += x * x;
        }
        return std::sqrt(s);
    };
    const FiberPoint up = solve_point(ps, z0, 1e3);
    const FiberPoint down = solve_point(ps, z0, -1e3);
    const double ratio_up = x_norm(up.w) / 1e3;
    const double ratio_down = x_norm(down.w) / 1e3;

    AsymptoticDirections dirs = asymptotic_directions(ps);
    const bool pass = ratio_up <= 0.05 && ratio_down <= 0.05 && norm2(dirs.w_plus) <= 1e-8 &&
                      norm2(dirs.w_minus) <= 1e-8;
    std::ostringstream os;
    os << "||w||_X/|t| at +-1e3: " << ratio_up << ", " << ratio_down << "; ||w+|| = "
       << norm2(dirs.w_plus) << ", ||w-|| = " << norm2(dirs.w_minus);
    report(8, "asymptotic verticality", pass, os.str());
}

// 9. Fucik half-fiber collapse versus the convex contrast
void criterion_9() {
    Preset fucik = make_preset("fucik-1d");
    FucikReport rep = fucik_check(fucik.problem, 100.0, 0.02);

    Preset convex = make_preset("ap-convex-1d");
    Vec z0(convex.problem.dim(), 0.0);
    const double contrast_height = solve_point(convex.problem, z0, 100.0).height;

    const bool pass = rep.collapse_verified && contrast_height < -50.0;
    std::ostringstream os;
    os << "max |h|/(1+t) = " << rep.max_height_scaled << ", contrast h(100) = "
       << contrast_height;
    report(9, "Fucik collapse", pass, os.str());
}

// 10. oracle equivalence and t-uniform bi-Lipschitz constants on 100 random
// matrix models satisfying the window hypothesis
void criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 meta_rng(424242);
    int built = 0;
    int equal_sets = 0;
    int bilip_ok = 0;
    unsigned seed = 0;
    while (built < 100 && seed < 4000) {
        ++seed;
        std::mt19937 rng(seed * 2654435761u + 13);
        std::uniform_int_distribution<int> dims(4, 8);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const int d = dims(rng);
        MatrixModelSpec spec;
        spec.scale = 0.3 + 0.3 * unif(rng);
        const double c_min = spec.scale + 0.35 + 0.5 * unif(rng);
        Vec below;
        Vec above;
        const int n_below = 1 + static_cast<int>(unif(rng) * (d - 2));
        for (int i = 0; i < n_below; ++i) below.push_back(-(c_min + 2.5 * unif(rng)));
        for (int i = 0; i < d - 1 - n_below; ++i) above.push_back(c_min + 2.5 * unif(rng));
        std::sort(below.begin(), below.end());
        std::sort(above.begin(), above.end());
        spec.spectrum = below;
        spec.p = static_cast<int>(below.size());
        spec.spectrum.push_back((unif(rng) < 0.5 ? -1.0 : 1.0) *
                                (0.08 + 0.6 * (spec.scale - 0.08) * unif(rng)));
        for (double v : above) spec.spectrum.push_back(v);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
        std::uniform_int_distribution<int> idx(0, d - 1);
        for (int r = 0; r < d + 2; ++r) {
            GivensRotation giv;
            giv.i = idx(rng);
            giv.j = idx(rng);
            if (giv.i == giv.j) giv.j = (giv.j + 1) % d;
            giv.theta = angle(rng);
            spec.rotations.push_back(giv);
        }
        ProblemSpec ps;
        try {
            ps = make_matrix_model(spec);
        } catch (const Error&) {
            continue;
        }
        ++built;

        std::normal_distribution<double> gauss(0.0, 0.6);
        Vec g(ps.dim());
        for (double& v : g) v = gauss(rng);

        const double reach = (norm2(g) + 2.0 * spec.scale * std::sqrt(ps.dim())) /
                             std::max(std::fabs(ps.lambda_p_shifted), 0.05);
        const double T = std::max(12.0, 1.2 * reach);
        AnalysisOptions opts;
        opts.trace_steps = 401;
        try {
            PreimageSet fiber_set = find_preimages(ps, g, -T, T, opts);
            MultistartResult newton = newton_multistart(ps, g, 60, seed, -T, T);
            bool same = fiber_set.solutions.size() == newton.preimages.solutions.size();
            if (same)
                for (std::size_t i = 0; i < fiber_set.solutions.size(); ++i)
                    same &= dist2(fiber_set.solutions[i].u, newton.preimages.solutions[i].u) <=
                            1e-6;
            if (same) ++equal_sets;

            double up_min = 1e300;
            double up_max = 0.0;
            double lo_min = 1e300;
            double lo_max = 0.0;
            for (double t : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
                BiLipschitzEstimate est = measure_pf_t(ps, t, 400, 97, 1.0);
                up_min = std::min(up_min, est.upper);
                up_max = std::max(up_max, est.upper);
                lo_min = std::min(lo_min, est.lower);
                lo_max = std::max(lo_max, est.lower);
            }
            if (up_max / up_min < 1.2 && lo_max / lo_min < 1.2) ++bilip_ok;
        } catch (const Error&) {
            // counted as a failed instance below
        }
    }
    (void)meta_rng;
    const double dt = seconds_since(t0);
    const bool pass = built == 100 && equal_sets == 100 && bilip_ok == 100;
    std::ostringstream os;
    os << built << " instances, " << equal_sets << " equal preimage sets, " << bilip_ok
       << " with <20% bi-Lipschitz variation (" << dt << " s)";
    report(10, "matrix-model oracle", pass, os.str());
}

}  // namespace

int main() {
    std::printf("fiberfold acceptance suite\n");
    criterion_1();
    FourPreimages four = criterion_2();
    criterion_3(four);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
