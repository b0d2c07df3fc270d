#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "fiberfold/oracle.hpp"
#include "fiberfold/presets.hpp"

#include <numbers>

using namespace fiberfold;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("linear problem: every right-hand side has exactly one preimage") {
    Preset preset = make_preset("linear1d");
    const ProblemSpec& ps = preset.problem;
    Vec g = *ps.rhs;
    PreimageSet set = find_preimages(ps, g, -10.0, 10.0);
    REQUIRE(set.solutions.size() == 1);
    // u = L^{-1} g
    for (int k = 0; k < ps.dim(); ++k)
        CHECK(set.solutions[0].u[k] == doctest::Approx(g[k] / ps.mu(k)).epsilon(1e-9));
    CHECK(set.solutions[0].residual < 1e-9);
}

TEST_CASE("ap2d: the displayed right-hand side has exactly four preimages") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    PreimageSet set = find_preimages(ps, *ps.rhs, -40.0, 40.0);
    CHECK(set.solutions.size() == 4);
    for (const Preimage& pre : set.solutions) CHECK(pre.residual <= 1e-8);
    CHECK_FALSE(set.window_too_small);
    // solutions sorted by t and pairwise separated
    for (std::size_t i = 0; i + 1 < set.solutions.size(); ++i) {
        CHECK(set.solutions[i].t < set.solutions[i + 1].t);
        CHECK(dist2(set.solutions[i].u, set.solutions[i + 1].u) > 1e-3);
    }
}

TEST_CASE("ap2d: pointwise ordering of the four preimages (maximum principle)") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    PreimageSet set = find_preimages(ps, *ps.rhs, -40.0, 40.0);
    REQUIRE(set.solutions.size() == 4);
    const SpectralBasis& basis = *ps.op->spectral_basis();
    std::vector<Vec> nodal;
    double scale_max = 0.0;
    for (const Preimage& pre : set.solutions) {
        Vec grid;
        basis.synthesize(pre.u, grid);
        scale_max = std::max(scale_max, max_abs(grid));
        nodal.push_back(std::move(grid));
    }
    for (std::size_t s = 0; s + 1 < nodal.size(); ++s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < nodal[s].size(); ++i)
            worst = std::max(worst, nodal[s][i] - nodal[s + 1][i]);
        CHECK(worst <= 1e-6 * scale_max);
    }
}

TEST_CASE("window_too_small fires when the height has not turned down") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    PreimageSet set = find_preimages(ps, *ps.rhs, -40.0, 2.0);  // right end mid-rise
    CHECK(set.window_too_small);
}

TEST_CASE("ap convex 1d: two preimages below the fold, zero above") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -60.0, 60.0, 301, opts.fiber);
    std::vector<double> crit = locate_critical_ts(ps, trace, opts);
    REQUIRE(crit.size() == 1);
    const double s_star = solve_point(ps, z0, crit[0]).height;

    Vec g = *ps.rhs;
    g[ps.p] = s_star - 3.0;
    PreimageSet below = find_preimages(ps, g, -60.0, 60.0, opts);
    CHECK(below.solutions.size() == 2);
    // Newton multistart confirms the count
    MultistartResult newton = newton_multistart(ps, g, 80, 11, -60.0, 60.0);
    CHECK(newton.preimages.solutions.size() == 2);

    g[ps.p] = s_star + 3.0;
    PreimageSet above = find_preimages(ps, g, -60.0, 60.0, opts);
    CHECK(above.solutions.empty());
    MultistartResult newton_above = newton_multistart(ps, g, 80, 11, -60.0, 60.0);
    CHECK(newton_above.preimages.solutions.empty());
}

TEST_CASE("critical points on ap2d alternate max/min with small lambda_p") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -40.0, 40.0, 201, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 3);
    CHECK(cps[0].is_local_max);
    CHECK_FALSE(cps[1].is_local_max);
    CHECK(cps[2].is_local_max);
    double lambda_scale = 0.0;
    for (const CriticalPoint& cp : cps) lambda_scale = std::max(lambda_scale, std::fabs(cp.lambda_p));
    for (const CriticalPoint& cp : cps) {
        CHECK(std::fabs(cp.dt_h[0]) < 1e-7);
        CHECK(std::fabs(cp.lambda_p) <= 1e-4 * std::max(1.0, lambda_scale));
        CHECK(cp.eig_gap > 1.0);
    }
    // strict monotonicity between consecutive criticals on the refined grid
    for (std::size_t c = 0; c + 1 < cps.size(); ++c) {
        const double mid = 0.5 * (cps[c].t_star + cps[c + 1].t_star);
        TangentSlope ts = tangent_and_slope(ps, solve_point(ps, z0, mid));
        CHECK(std::fabs(ts.dt_height) > 1e-3);
    }
}

TEST_CASE("ap2d criticals classify as folds") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -40.0, 40.0, 201, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 3);
    for (CriticalPoint cp : cps) {
        cp = classify_morin(ps, trace, cp, opts);
        CHECK(cp.morin_order == 1);
        CHECK(cp.kind_tag == "fold");
        CHECK(cp.transversality_ok);
    }
}

TEST_CASE("fold heights dominate their neighborhoods") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -60.0, 60.0, 301, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].is_local_max);
    const double h_star = solve_point(ps, z0, cps[0].t_star).height;
    for (double delta : {0.1, 0.5, 2.0}) {
        CHECK(solve_point(ps, z0, cps[0].t_star + delta).height < h_star);
        CHECK(solve_point(ps, z0, cps[0].t_star - delta).height < h_star);
    }
}

TEST_CASE("spectral link: lambda_p and D_t h share signs near criticals") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    opts.link_subsample = 4;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -30.0, 30.0, 121, opts.fiber);
    SpectralLinkReport rep = verify_spectral_link(ps, trace, opts);
    CHECK(rep.signs_consistent);
    CHECK(rep.checked_samples > 0);
    CHECK(rep.collapse_ts.empty());
    CHECK(rep.p_ratio_min > 0.0);

    // convexity makes the branch eigenvalue strictly monotone along the fiber
    // (decreasing in the -Laplace - f orientation): exactly one sign change
    int flips = 0;
    for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i)
        if (rep.samples[i].lambda_p * rep.samples[i + 1].lambda_p < 0.0) ++flips;
    CHECK(flips == 1);
    for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i)
        CHECK(rep.samples[i + 1].lambda_p < rep.samples[i].lambda_p);
}

TEST_CASE("spectral link on the linear problem is trivially consistent") {
    Preset preset = make_preset("linear1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    opts.link_subsample = 8;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -5.0, 5.0, 33, opts.fiber);
    SpectralLinkReport rep = verify_spectral_link(ps, trace, opts);
    CHECK(rep.signs_consistent);
    for (const LinkSample& s : rep.samples) {
        CHECK(s.lambda_p == doctest::Approx(ps.mu(ps.p)).epsilon(1e-10));
        CHECK(s.dt_height == doctest::Approx(ps.mu(ps.p)).epsilon(1e-10));
    }
}

TEST_CASE("count sweep on the convex problem: counts in {0,1,2}") {
    Preset preset = make_preset("ap-convex-1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    opts.trace_steps = 301;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    std::vector<double> s_values;
    for (int i = 0; i < 50; ++i) s_values.push_back(-8.0 + 8.4 * i / 49.0);
    SweepResult sweep = count_sweep(ps, z0, s_values, -60.0, 60.0, opts);
    REQUIRE(std::isfinite(sweep.fold_boundary));
    int twos = 0;
    int zeros = 0;
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        CHECK(sweep.counts[i] >= 0);
        CHECK(sweep.counts[i] <= 2);
        if (sweep.counts[i] == 2) {
            CHECK(s_values[i] < sweep.fold_boundary);
            ++twos;
        }
        if (sweep.counts[i] == 0) {
            CHECK(s_values[i] > sweep.fold_boundary);
            ++zeros;
        }
    }
    CHECK(twos > 0);
    CHECK(zeros > 0);
    // querying the fold boundary itself yields the tangency count 1
    SweepResult at_star = count_sweep(ps, z0, {sweep.fold_boundary}, -60.0, 60.0, opts);
    CHECK(at_star.counts[0] == 1);
}

TEST_CASE("count sweep on ap2d reaches four preimages") {
    Preset preset = make_preset("ap2d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    std::vector<double> s_values = {-52.0, -48.0, -43.58, -40.0, -36.5, -30.0, -20.0};
    SweepResult sweep = count_sweep(ps, z0, s_values, -40.0, 40.0, opts);
    int best = 0;
    for (int c : sweep.counts) best = std::max(best, c);
    CHECK(best == 4);
    CHECK(sweep.counts.back() == 0);
}

namespace {

// adapted-coordinate model with a prescribed height polynomial:
// h(z, t) = t^degree + <z, e1> t^2 + <z, e2> t  (degree 4: swallowtail at 0)
class PolynomialHeightModel : public OperatorModel {
public:
    PolynomialHeightModel(int dim, int degree) : spectrum_(dim, 1.0), degree_(degree) {
        spectrum_[0] = 0.0;
    }
    int dim() const override { return static_cast<int>(spectrum_.size()); }
    const Vec& spectrum() const override { return spectrum_; }
    void apply_N(const Vec& u, Vec& out) const override {
        out.assign(dim(), 0.0);
        out[0] = -height(u);
    }
    void jacobian_N(const Vec& u, Mat& out) const override {
        const double t = u[0];
        out = Mat(dim(), dim());
        out(0, 0) = -(degree_ * std::pow(t, degree_ - 1) + 2.0 * u[1] * t + u[2]);
        out(0, 1) = -t * t;
        out(0, 2) = -t;
    }
    std::pair<double, double> slope_range() const override { return {0.0, 0.0}; }
    bool symmetric_jacobian() const override { return false; }
    std::string describe() const override { return "polynomial_height_model"; }

private:
    double height(const Vec& u) const {
        const double t = u[0];
        return std::pow(t, degree_) + u[1] * t * t + u[2] * t;
    }
    Vec spectrum_;
    int degree_;
};

}  // namespace

TEST_CASE("quartic height classifies as a swallowtail with transversality") {
    auto op = std::make_shared<PolynomialHeightModel>(5, 4);
    ProblemSpec ps = make_problem(op, 0, 0.0, 0.0);
    Vec z0(5, 0.0);
    AnalysisOptions opts;
    FiberTrace trace = trace_fiber(ps, z0, -1.5, 1.5, 201, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 1);
    CriticalPoint cp = classify_morin(ps, trace, cps[0], opts);
    CHECK(cp.morin_order == 3);
    CHECK(cp.kind_tag == "swallowtail");
    CHECK(cp.transversality_ok);
    CHECK(cp.dt_h[3] == doctest::Approx(24.0).epsilon(1e-3));
}

TEST_CASE("orders beyond swallowtail stay unclassified") {
    auto op = std::make_shared<PolynomialHeightModel>(5, 5);
    ProblemSpec ps = make_problem(op, 0, 0.0, 0.0);
    Vec z0(5, 0.0);
    AnalysisOptions opts;
    FiberTrace trace = trace_fiber(ps, z0, -1.5, 1.5, 201, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 1);
    CriticalPoint cp = classify_morin(ps, trace, cps[0], opts);
    CHECK(cp.morin_order == 0);
    CHECK(cp.kind_tag == "unclassified");
    CHECK(cp.low_confidence);
}

TEST_CASE("non-autonomous problem runs the full pipeline") {
    // spatially weighted convex nonlinearity; preimages must still pair with
    // the Newton oracle and the critical point stays a fold
    Nonlinearity f = Nonlinearity::smooth_convex(0.2, 2.6, 1.0).with_modulation(
        [](const std::array<double, 2>& pt) { return 1.0 + 0.2 * std::sin(pt[0]); }, 0.8, 1.2);
    auto op = std::make_shared<SpectralOperator>(SpectralBasis(make_box({kPi}), {24}, 4), f);
    ProblemSpec ps = make_problem(op);
    Vec g(ps.dim(), 0.0);
    g[ps.p] = -3.0;
    g[1] = 0.4;

    AnalysisOptions opts;
    opts.trace_steps = 301;
    PreimageSet fiber_set = find_preimages(ps, g, -60.0, 60.0, opts);
    MultistartResult newton = newton_multistart(ps, g, 60, 21, -60.0, 60.0);
    REQUIRE(fiber_set.solutions.size() == newton.preimages.solutions.size());
    CHECK(fiber_set.solutions.size() == 2);
    for (std::size_t i = 0; i < fiber_set.solutions.size(); ++i)
        CHECK(dist2(fiber_set.solutions[i].u, newton.preimages.solutions[i].u) <= 1e-6);

    Vec z0 = g;
    ps.project_H(z0);
    FiberTrace trace = trace_fiber(ps, z0, -60.0, 60.0, opts.trace_steps, opts.fiber);
    std::vector<CriticalPoint> cps = critical_points(ps, trace, opts);
    REQUIRE(cps.size() == 1);
    CriticalPoint cp = classify_morin(ps, trace, cps[0], opts);
    CHECK(cp.morin_order == 1);
}

TEST_CASE("count sweep on the linear problem is identically one") {
    Preset preset = make_preset("linear1d");
    const ProblemSpec& ps = preset.problem;
    AnalysisOptions opts;
    opts.trace_steps = 101;
    Vec z0 = *ps.rhs;
    ps.project_H(z0);
    SweepResult sweep = count_sweep(ps, z0, {-5.0, -1.0, 0.0, 2.0, 5.0}, -10.0, 10.0, opts);
    for (int c : sweep.counts) CHECK(c == 1);
}
