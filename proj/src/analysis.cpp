#include "fiberfold/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fiberfold {

namespace {

double window_span(const FiberTrace& trace) {
    return trace.points.back().t - trace.points.front().t;
}

double deriv_step(const FiberTrace& trace, const AnalysisOptions& opts) {
    // small enough that the D2 stencil's delta^2 * D4 truncation stays below
    // the zero bands at unit scales, large enough to sit above the solver
    // noise floor in the stacked differences
    return opts.derivative_step > 0.0 ? opts.derivative_step : 2e-3 * window_span(trace);
}

int nearest_index(const FiberTrace& trace, double t) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(trace.points.size()); ++i)
        if (std::fabs(trace.points[i].t - t) < std::fabs(trace.points[best].t - t)) best = i;
    return best;
}

// Height evaluator backed by fresh projected solves, warm-started from the
// nearest traced point (the contraction is global, warm starts only save
// iterations).
class HeightEval {
public:
    HeightEval(const ProblemSpec& ps, const FiberTrace& trace, const AnalysisOptions& opts)
        : ps_(ps), trace_(trace), opts_(opts) {}

    FiberPoint point_at(double t) const {
        FiberOptions fo = opts_.fiber;
        fo.solve.warm_start = trace_.points[nearest_index(trace_, t)].w;
        return solve_point(ps_, trace_.z0, t, fo);
    }

    double height_at(double t) const { return point_at(t).height; }

    double slope_at(double t) const { return tangent_and_slope(ps_, point_at(t)).dt_height; }

private:
    const ProblemSpec& ps_;
    const FiberTrace& trace_;
    const AnalysisOptions& opts_;
};

// Same evaluators for a displaced fiber z0 + delta*dir (transversality rows).
class NeighborEval {
public:
    NeighborEval(const ProblemSpec& ps, Vec z0, const FiberTrace& warm_source,
                 const AnalysisOptions& opts)
        : ps_(ps), z0_(std::move(z0)), warm_(warm_source), opts_(opts) {}

    double slope_at(double t) const {
        FiberOptions fo = opts_.fiber;
        fo.solve.warm_start = warm_.points[nearest_index(warm_, t)].w;
        FiberPoint pt = solve_point(ps_, z0_, t, fo);
        return tangent_and_slope(ps_, pt).dt_height;
    }

private:
    const ProblemSpec& ps_;
    Vec z0_;
    const FiberTrace& warm_;
    const AnalysisOptions& opts_;
};

bool turned_down_at_ends(const FiberTrace& trace, double s) {
    const auto& pts = trace.points;
    const int n = static_cast<int>(pts.size());
    const bool left_ok = pts[0].height < s && pts[1].height > pts[0].height;
    const bool right_ok = pts[n - 1].height < s && pts[n - 2].height > pts[n - 1].height;
    return left_ok && right_ok;
}

std::vector<std::pair<int, int>> slope_sign_brackets(const FiberTrace& trace) {
    // grid intervals [i, i+1] where the centered slope of h changes sign
    const auto& pts = trace.points;
    const int n = static_cast<int>(pts.size());
    std::vector<double> slope(n - 1);
    double scale = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        slope[i] = (pts[i + 1].height - pts[i].height) / (pts[i + 1].t - pts[i].t);
        scale = std::max(scale, std::fabs(slope[i]));
    }
    const double tiny = 1e-12 * std::max(scale, 1.0);
    std::vector<std::pair<int, int>> brackets;
    int prev_sign = 0;
    int prev_i = -1;
    for (int i = 0; i + 1 < n; ++i) {
        if (std::fabs(slope[i]) <= tiny) continue;
        const int sign = slope[i] > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) brackets.emplace_back(prev_i, i + 1);
        prev_sign = sign;
        prev_i = i;
    }
    return brackets;
}

}  // namespace

std::vector<double> locate_critical_ts(const ProblemSpec& ps, const FiberTrace& trace,
                                       const AnalysisOptions& opts) {
    HeightEval eval(ps, trace, opts);
    std::vector<double> out;
    for (auto [ilo, ihi] : slope_sign_brackets(trace)) {
        double a = trace.points[ilo].t;
        double b = trace.points[ihi].t;
        double fa = eval.slope_at(a);
        double fb = eval.slope_at(b);
        if (fa == 0.0) {
            out.push_back(a);
            continue;
        }
        if (fb == 0.0) {
            out.push_back(b);
            continue;
        }
        if (fa * fb > 0.0) {
            // the grid slope flip was not confirmed by the exact derivative;
            // try the midpoint once, else skip
            const double m = 0.5 * (a + b);
            const double fm = eval.slope_at(m);
            if (fa * fm > 0.0 && fb * fm > 0.0) continue;
            if (fa * fm < 0.0) {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
        }
        out.push_back(brent_root([&](double t) { return eval.slope_at(t); }, a, b, fa, fb,
                                 opts.root_xtol));
    }

    // tangential criticals: the slope touches zero without a sign flip
    // (degenerate points like the cusp fiber through the cusp itself)
    {
        const auto& pts = trace.points;
        const int n = static_cast<int>(pts.size());
        std::vector<double> gs(n - 1);
        double scale1 = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            gs[i] = std::fabs((pts[i + 1].height - pts[i].height) / (pts[i + 1].t - pts[i].t));
            scale1 = std::max(scale1, gs[i]);
        }
        const double band = opts.zero_band * std::max(scale1, 1e-300);
        for (int i = 1; i + 1 < static_cast<int>(gs.size()); ++i) {
            if (!(gs[i] < gs[i - 1] && gs[i] <= gs[i + 1])) continue;
            bool in_bracket = false;
            for (double t : out)
                if (t >= pts[i - 1].t && t <= pts[i + 2].t) in_bracket = true;
            if (in_bracket) continue;
            const double tc = golden_min([&](double t) { return std::fabs(eval.slope_at(t)); },
                                         pts[i - 1].t, pts[i + 2].t, opts.root_xtol);
            if (std::fabs(eval.slope_at(tc)) <= band) out.push_back(tc);
        }
    }

    std::sort(out.begin(), out.end());
    // merge refinement duplicates
    const double merge_tol =
        std::max(1e3 * opts.root_xtol, 1e-9 * window_span(trace));
    std::vector<double> merged;
    for (double t : out)
        if (merged.empty() || std::fabs(t - merged.back()) > merge_tol)
            merged.push_back(t);
    return merged;
}

PreimageSet find_preimages(const ProblemSpec& ps, const Vec& g, double t_lo, double t_hi,
                           const AnalysisOptions& opts) {
    if (static_cast<int>(g.size()) != ps.dim()) throw ConfigError("rhs dimension mismatch");
    PreimageSet out;
    out.g = g;
    out.s = g[ps.p];
    Vec z0 = g;
    ps.project_H(z0);

    FiberTrace trace = trace_fiber(ps, z0, t_lo, t_hi, opts.trace_steps, opts.fiber);
    out.window_too_small = !turned_down_at_ends(trace, out.s);

    HeightEval eval(ps, trace, opts);
    const double s = out.s;
    std::vector<double> roots;

    const auto& pts = trace.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double fa = pts[i].height - s;
        const double fb = pts[i + 1].height - s;
        if (fa == 0.0) {
            roots.push_back(pts[i].t);
            continue;
        }
        if (fa * fb < 0.0) {
            roots.push_back(brent_root([&](double t) { return eval.height_at(t) - s; }, pts[i].t,
                                       pts[i + 1].t, fa, fb, opts.root_xtol));
        }
    }
    if (!pts.empty() && pts.back().height == s) roots.push_back(pts.back().t);

    // fold tangencies: critical points whose height touches s without a grid
    // sign change
    for (double tc : locate_critical_ts(ps, trace, opts)) {
        const double hc = eval.height_at(tc);
        if (std::fabs(hc - s) <= opts.height_tol) roots.push_back(tc);
    }

    std::sort(roots.begin(), roots.end());
    for (double t : roots) {
        FiberPoint pt = eval.point_at(t);
        Preimage pre;
        pre.t = t;
        pre.u = pt.u;
        Vec r = ps.apply_F(pt.u) - g;
        pre.residual = norm2(r);
        const bool dup = !out.solutions.empty() &&
                         (dist2(pre.u, out.solutions.back().u) < opts.separation);
        if (!dup) out.solutions.push_back(std::move(pre));
    }
    return out;
}

std::vector<CriticalPoint> critical_points(const ProblemSpec& ps, const FiberTrace& trace,
                                           const AnalysisOptions& opts) {
    HeightEval eval(ps, trace, opts);
    const double delta = deriv_step(trace, opts);
    std::vector<CriticalPoint> out;
    for (double t_star : locate_critical_ts(ps, trace, opts)) {
        CriticalPoint cp;
        cp.t_star = t_star;
        FiberPoint pt = eval.point_at(t_star);
        cp.u_star = pt.u;

        const double d1m2 = eval.slope_at(t_star - 2.0 * delta);
        const double d1m1 = eval.slope_at(t_star - delta);
        const double d10 = eval.slope_at(t_star);
        const double d1p1 = eval.slope_at(t_star + delta);
        const double d1p2 = eval.slope_at(t_star + 2.0 * delta);
        cp.dt_h[0] = d10;
        cp.dt_h[1] = (d1p1 - d1m1) / (2.0 * delta);
        cp.dt_h[2] = (d1p1 - 2.0 * d10 + d1m1) / (delta * delta);
        cp.dt_h[3] = (d1p2 - 2.0 * d1p1 + 2.0 * d1m1 - d1m2) / (2.0 * delta * delta * delta);
        cp.is_local_max = cp.dt_h[1] < 0.0;

        if (ps.op->symmetric_jacobian()) {
            Mat m = ps.jacobian_matrix(pt.u);
            SymEigen eig = sym_eigen(m);
            cp.lambda_p = eig.values[ps.p];
            double gap = std::numeric_limits<double>::infinity();
            if (ps.p > 0) gap = std::min(gap, eig.values[ps.p] - eig.values[ps.p - 1]);
            if (ps.p + 1 < ps.dim()) gap = std::min(gap, eig.values[ps.p + 1] - eig.values[ps.p]);
            cp.eig_gap = gap;
        } else {
            // adapted-coordinate (triangular) models: the branch eigenvalue is
            // the height slope itself
            cp.lambda_p = d10;
            cp.eig_gap = std::numeric_limits<double>::infinity();
        }
        out.push_back(std::move(cp));
    }
    return out;
}

namespace {

// scale of D_t^j h over the whole trace from grid differences of the heights
std::array<double, 4> derivative_scales(const FiberTrace& trace) {
    const auto& pts = trace.points;
    const int n = static_cast<int>(pts.size());
    std::array<double, 4> scales{};
    std::vector<double> cur(n);
    for (int i = 0; i < n; ++i) cur[i] = pts[i].height;
    const double dt = (pts.back().t - pts.front().t) / (n - 1);
    double hmax = 0.0;
    for (int i = 0; i < n; ++i) hmax = std::max(hmax, std::fabs(cur[i]));
    const double span = pts.back().t - pts.front().t;
    for (int j = 0; j < 4; ++j) {
        std::vector<double> next(cur.size() > 1 ? cur.size() - 1 : 0);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) next[i] = (cur[i + 1] - cur[i]) / dt;
        cur = std::move(next);
        double m = 0.0;
        for (double v : cur) m = std::max(m, std::fabs(v));
        // fall back to a window-scaled height when a derivative degenerates
        const double fallback = hmax / std::pow(0.5 * span, j + 1);
        scales[j] = std::max(m, fallback);
    }
    return scales;
}

}  // namespace

CriticalPoint classify_morin(const ProblemSpec& ps, const FiberTrace& trace, CriticalPoint cp,
                             const AnalysisOptions& opts) {
    const std::array<double, 4> scales = derivative_scales(trace);
    std::array<double, 4> band{};
    for (int j = 0; j < 4; ++j) band[j] = opts.zero_band * scales[j];

    // order k: D_t^1..k vanish within band, D_t^{k+1} does not
    int order = 0;
    for (int j = 0; j < 4; ++j) {
        if (std::fabs(cp.dt_h[j]) <= band[j]) {
            order = j + 1;
        } else {
            break;
        }
    }
    if (order == 0) {
        // not a critical point at tolerance; flag and bail
        cp.morin_order = 0;
        cp.kind_tag = "unclassified";
        cp.low_confidence = true;
        return cp;
    }
    if (order >= 4) {
        // beyond swallowtail: finite-difference stacks past the 4th derivative
        // are unreliable in double precision
        cp.morin_order = 0;
        cp.kind_tag = "unclassified";
        cp.low_confidence = true;
        return cp;
    }
    // the deciding derivative must be clearly nonzero; magnitudes between the
    // bands stay unclassified
    if (std::fabs(cp.dt_h[order]) < 10.0 * band[order]) {
        cp.morin_order = 0;
        cp.kind_tag = "unclassified";
        cp.low_confidence = true;
        return cp;
    }

    cp.morin_order = order;
    cp.kind_tag = order == 1 ? "fold" : order == 2 ? "cusp" : "swallowtail";

    if (order == 1) {
        // folds carry no rank condition beyond D_t^2 h != 0
        cp.transversality_ok = true;
        return cp;
    }

    // transversality: rows j = 1..k of gradients of D_t^j h^a in the sampled
    // directions (e_i in H) plus the t-column; rank must be k
    const double delta_t = deriv_step(trace, opts);
    const double delta_z = opts.neighbor_delta * (1.0 + norm2(trace.z0));
    std::vector<Vec> dirs;
    {
        std::mt19937 rng(opts.rng_seed);
        int added = 0;
        for (int k = 0; k < ps.dim() && added < opts.transversality_coord_dirs; ++k) {
            if (k == ps.p) continue;
            Vec e(ps.dim(), 0.0);
            e[k] = 1.0;
            dirs.push_back(std::move(e));
            ++added;
        }
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int r = 0; r < opts.transversality_rand_dirs; ++r) {
            Vec e(ps.dim(), 0.0);
            for (int k = 0; k < ps.dim(); ++k)
                if (k != ps.p) e[k] = gauss(rng);
            const double nn = norm2(e);
            if (nn > 0.0) {
                scale(e, 1.0 / nn);
                dirs.push_back(std::move(e));
            }
        }
    }

    const int k_order = cp.morin_order;
    const int d = static_cast<int>(dirs.size());
    Mat rows(k_order, d + 1);

    // D_t^j h at (z, t) for j = 1..k via central stencils of the exact slope
    auto djh = [&](const NeighborEval& ev, int j) -> double {
        switch (j) {
            case 1: return ev.slope_at(cp.t_star);
            case 2:
                return (ev.slope_at(cp.t_star + delta_t) - ev.slope_at(cp.t_star - delta_t)) /
                       (2.0 * delta_t);
            default:
                return (ev.slope_at(cp.t_star + delta_t) - 2.0 * ev.slope_at(cp.t_star) +
                        ev.slope_at(cp.t_star - delta_t)) /
                       (delta_t * delta_t);
        }
    };

    for (int i = 0; i < d; ++i) {
        Vec zp = trace.z0;
        axpy(delta_z, dirs[i], zp);
        Vec zm = trace.z0;
        axpy(-delta_z, dirs[i], zm);
        NeighborEval evp(ps, zp, trace, opts);
        NeighborEval evm(ps, zm, trace, opts);
        for (int j = 1; j <= k_order; ++j)
            rows(j - 1, i) = (djh(evp, j) - djh(evm, j)) / (2.0 * delta_z);
    }
    // t-column: D_t^{j+1} h at the point itself
    for (int j = 1; j <= k_order; ++j) rows(j - 1, d) = cp.dt_h[j];

    // normalize rows (mixed units), then rank by singular values
    for (int j = 0; j < k_order; ++j) {
        const double nn = std::sqrt(kernels::nrm2sq(rows.row(j), d + 1));
        if (nn > 0.0) kernels::scal(1.0 / nn, rows.row(j), d + 1);
    }
    Vec sv = singular_values(rows);
    cp.transversality_ok = sv[k_order - 1] > opts.rank_tol * sv[0];
    return cp;
}

SpectralLinkReport verify_spectral_link(const ProblemSpec& ps, const FiberTrace& trace,
                                        const AnalysisOptions& opts) {
    SpectralLinkReport rep;
    rep.critical_ts = locate_critical_ts(ps, trace, opts);

    const double span = window_span(trace);
    double radius = opts.critical_radius_frac * span;
    for (std::size_t i = 0; i + 1 < rep.critical_ts.size(); ++i)
        radius = std::min(radius, 0.4 * (rep.critical_ts[i + 1] - rep.critical_ts[i]));

    const bool symmetric = ps.op->symmetric_jacobian();
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    double lambda_scale = 0.0;
    std::vector<LinkSample> samples;

    const int stride = std::max(1, opts.link_subsample);
    for (std::size_t i = 0; i < trace.points.size(); i += stride) {
        const FiberPoint& pt = trace.points[i];
        LinkSample smp;
        smp.t = pt.t;
        Mat m = ps.jacobian_matrix(pt.u);
        smp.dt_height = tangent_and_slope_with(ps, pt, m).dt_height;
        if (symmetric) {
            SymEigen eig = sym_eigen(m);
            smp.lambda_p = eig.values[ps.p];
            double gap = std::numeric_limits<double>::infinity();
            if (ps.p > 0) gap = std::min(gap, eig.values[ps.p] - eig.values[ps.p - 1]);
            if (ps.p + 1 < ps.dim()) gap = std::min(gap, eig.values[ps.p + 1] - eig.values[ps.p]);
            smp.gap = gap;
        } else {
            smp.lambda_p = smp.dt_height;
            smp.gap = std::numeric_limits<double>::infinity();
        }
        lambda_scale = std::max(lambda_scale, std::fabs(smp.lambda_p));
        for (double tc : rep.critical_ts)
            if (std::fabs(pt.t - tc) <= radius) smp.near_critical = true;
        samples.push_back(smp);
    }

    const double zero_band = 1e-9 * std::max(lambda_scale, 1.0);
    for (const LinkSample& smp : samples) {
        if (smp.near_critical) {
            if (smp.gap <= opts.gap_tol) {
                std::ostringstream os;
                os << "eigenvalue branch loses simplicity inside a critical neighborhood at t = "
                   << smp.t << " (gap " << smp.gap << ")";
                throw EigGapCollapse(smp.t, smp.gap, os.str());
            }
            ++rep.checked_samples;
            const bool lz = std::fabs(smp.lambda_p) <= zero_band;
            const bool dz = std::fabs(smp.dt_height) <= zero_band;
            if (!lz && !dz && smp.lambda_p * smp.dt_height < 0.0) rep.signs_consistent = false;
            if (!lz && !dz) {
                const double r = smp.lambda_p / smp.dt_height;
                ratio_min = std::min(ratio_min, r);
                ratio_max = std::max(ratio_max, r);
            }
        } else if (smp.gap <= opts.gap_tol) {
            rep.collapse_ts.push_back(smp.t);
        }
    }
    rep.p_ratio_min = ratio_min == std::numeric_limits<double>::infinity() ? 0.0 : ratio_min;
    rep.p_ratio_max = ratio_max;
    rep.samples = std::move(samples);
    return rep;
}

SweepResult count_sweep(const ProblemSpec& ps, const Vec& z0, const std::vector<double>& s_values,
                        double t_lo, double t_hi, const AnalysisOptions& opts) {
    SweepResult out;
    out.s_values = s_values;
    FiberTrace trace = trace_fiber(ps, z0, t_lo, t_hi, opts.trace_steps, opts.fiber);
    HeightEval eval(ps, trace, opts);

    std::vector<double> crit_ts = locate_critical_ts(ps, trace, opts);
    std::vector<double> crit_hs;
    out.fold_boundary = -std::numeric_limits<double>::infinity();
    for (double tc : crit_ts) {
        const double hc = eval.height_at(tc);
        crit_hs.push_back(hc);
        out.fold_boundary = std::max(out.fold_boundary, hc);
    }
    if (crit_ts.empty()) out.fold_boundary = std::numeric_limits<double>::quiet_NaN();

    double s_min = std::numeric_limits<double>::infinity();
    for (double s : s_values) s_min = std::min(s_min, s);
    out.window_too_small = !turned_down_at_ends(trace, s_min);

    const auto& pts = trace.points;
    for (double s : s_values) {
        std::vector<double> roots;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double fa = pts[i].height - s;
            const double fb = pts[i + 1].height - s;
            if (fa == 0.0) {
                roots.push_back(pts[i].t);
                continue;
            }
            if (fa * fb < 0.0)
                roots.push_back(brent_root([&](double t) { return eval.height_at(t) - s; },
                                           pts[i].t, pts[i + 1].t, fa, fb, opts.root_xtol));
        }
        if (!pts.empty() && pts.back().height == s) roots.push_back(pts.back().t);
        // tangencies at critical heights
        for (std::size_t c = 0; c < crit_ts.size(); ++c)
            if (std::fabs(crit_hs[c] - s) <= opts.height_tol) roots.push_back(crit_ts[c]);
        std::sort(roots.begin(), roots.end());
        int count = 0;
        double last = -std::numeric_limits<double>::infinity();
        for (double r : roots) {
            if (r - last > 1e3 * opts.root_xtol) ++count;
            last = r;
        }
        out.counts.push_back(count);
    }
    return out;
}

}  // namespace fiberfold
