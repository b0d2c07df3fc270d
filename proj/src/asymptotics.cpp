#include "fiberfold/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fiberfold {

VReport check_V(const ProblemSpec& ps, const FiberTrace& trace, double epsilon, double T) {
    (void)ps;
    VReport rep;
    rep.eps_requested = epsilon;
    rep.T = T;

    const auto& pts = trace.points;
    int first_above = -1;
    int last_below = -1;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        if (pts[i].t > T && first_above < 0) first_above = i;
        if (pts[i].t < -T) last_below = i;
    }
    if (first_above < 0 || first_above + 1 >= static_cast<int>(pts.size()) || last_below <= 0)
        throw ConfigError("check_V: trace does not extend beyond +-T");

    // (V+): h(t) - h(T) <= -eps (t - T) for t > T
    {
        const double hT = pts[first_above].height;
        const double tT = pts[first_above].t;
        double eps_max = std::numeric_limits<double>::infinity();
        double c = -std::numeric_limits<double>::infinity();
        for (int i = first_above + 1; i < static_cast<int>(pts.size()); ++i) {
            eps_max = std::min(eps_max, (hT - pts[i].height) / (pts[i].t - tT));
            c = std::max(c, -pts[i].height - epsilon * pts[i].t);
        }
        rep.eps_plus_max = eps_max;
        rep.c_plus = -c;
        rep.v_plus_ok = eps_max >= epsilon && epsilon > 0.0;
    }
    // (V-): h(t) - h(-T) <= -eps (|t| - T) for t < -T
    {
        const double hT = pts[last_below].height;
        const double tT = pts[last_below].t;
        double eps_max = std::numeric_limits<double>::infinity();
        double c = -std::numeric_limits<double>::infinity();
        for (int i = last_below - 1; i >= 0; --i) {
            eps_max = std::min(eps_max, (hT - pts[i].height) / (tT - pts[i].t));
            c = std::max(c, -pts[i].height + epsilon * pts[i].t);
        }
        rep.eps_minus_max = eps_max;
        rep.c_minus = -c;
        rep.v_minus_ok = eps_max >= epsilon && epsilon > 0.0;
    }
    return rep;
}

namespace {

// shifted asymptotic map N_inf(u) - gamma u
Vec apply_N_inf_shifted(const ProblemSpec& ps, const Vec& u) {
    Vec out;
    ps.op->apply_N_asymptotic(u, out);
    kernels::axpy(-ps.gamma, u.data(), out.data(), out.size());
    return out;
}

}  // namespace

AsymptoticDirections asymptotic_directions(const ProblemSpec& ps, const SolveOptions& opts) {
    if (!ps.op->has_asymptotic_form())
        throw InvariantFailure("asymptotic_directions: operator has no asymptotic form");
    const int n = ps.dim();
    const int p = ps.p;
    const Vec& mu = ps.op->spectrum();
    AsymptoticDirections out;
    out.n_infinity_pairing = apply_N_inf_shifted(ps, ps.phi_p())[p];

    // sign = +1: L w = P N_inf,s(w + phi_p); sign = -1: L w = -P N_inf,s(-w - phi_p)
    auto solve_direction = [&](double sign, double& residual) {
        Vec z(n, 0.0);
        Vec w(n, 0.0);
        Vec u(n, 0.0);
        for (int it = 0; it < opts.max_iters; ++it) {
            for (int k = 0; k < n; ++k) w[k] = k == p ? 0.0 : z[k] / (mu[k] - ps.gamma);
            for (int k = 0; k < n; ++k) u[k] = k == p ? sign : sign * w[k];
            Vec ninf = apply_N_inf_shifted(ps, u);
            double res2 = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == p) continue;
                const double r = z[k] - sign * ninf[k];
                res2 += r * r;
            }
            residual = std::sqrt(res2);
            if (residual <= opts.tol_residual) return w;
            for (int k = 0; k < n; ++k)
                if (k != p) z[k] = sign * ninf[k];
        }
        throw NonConvergence("asymptotic direction iteration stalled", residual);
    };
    out.w_plus = solve_direction(+1.0, out.residual_plus);
    out.w_minus = solve_direction(-1.0, out.residual_minus);
    return out;
}

SlopeLimitReport slope_limit_compare(const ProblemSpec& ps, const FiberTrace& trace, double T,
                                     const AnalysisOptions& opts) {
    if (!ps.op->has_asymptotic_form())
        throw InvariantFailure("slope_limit_compare: operator has no asymptotic form");
    SlopeLimitReport rep;
    rep.T = T;

    // re-shift to gamma' = mu_p, the setting with 0 in sigma(L)
    const Vec& mu = ps.op->spectrum();
    const double gp = mu[ps.p];
    const auto [lo, hi] = ps.op->slope_range();
    rep.eps = std::max(hi - gp, gp - lo);
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ps.dim(); ++k)
        if (k != ps.p) gap = std::min(gap, std::fabs(mu[k] - gp));
    rep.inv_norm = 1.0 / gap;

    Vec ninf;
    ps.op->apply_N_asymptotic(ps.phi_p(), ninf);
    rep.q = ninf[ps.p] - gp;

    rep.hyp_positivity = rep.q > 0.0;
    rep.hyp_small_linear = rep.eps * rep.inv_norm < 0.5;
    rep.hyp_small_quadratic = rep.eps * rep.eps * rep.inv_norm < 0.5 * rep.q;
    rep.hypotheses_hold = rep.hyp_positivity && rep.hyp_small_linear && rep.hyp_small_quadratic;

    // Richardson on h(t)/t = limit + O(1/t) at t = T, 2T, 4T
    FiberOptions fo = opts.fiber;
    auto h_over_t = [&](double t) {
        FiberPoint pt = solve_point(ps, trace.z0, t, fo);
        return pt.height / t;
    };
    const double r0 = h_over_t(T);
    const double r1 = h_over_t(2.0 * T);
    const double r2 = h_over_t(4.0 * T);
    const double e1 = 2.0 * r1 - r0;
    const double e2 = 2.0 * r2 - r1;
    rep.limit_estimate = (4.0 * e2 - e1) / 3.0;
    rep.conclusion_holds = std::fabs(rep.limit_estimate + rep.q) < rep.q;
    return rep;
}

VerticalityFit fit_verticality(const ProblemSpec& ps, const Vec& z0, double T, bool positive_side,
                               const AnalysisOptions& opts) {
    VerticalityFit fit;
    FiberOptions fo = opts.fiber;
    auto x_norm = [&](const Vec& v) {
        double s = 0.0;
        for (int k = 0; k < ps.dim(); ++k) {
            const double x = (1.0 + ps.mu(k)) * v[k];
            s += x * x;
        }
        return std::sqrt(s);
    };
    for (double t : {T, 2.0 * T, 4.0 * T}) {
        const double signed_t = positive_side ? t : -t;
        FiberPoint pt = solve_point(ps, z0, signed_t, fo);
        fit.samples.emplace_back(t, x_norm(pt.w) / t);
    }
    // least squares on log(ratio) = log c - alpha log t
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (auto [t, r] : fit.samples) {
        if (r <= 0.0) continue;
        const double x = std::log(t);
        const double y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        fit.alpha = -slope;
        fit.c = std::exp((sy - slope * sx) / n);
    }
    return fit;
}

namespace {

// one RK4 step of -u'' = b u^+ - a u^-, i.e. u'' = -(b max(u,0) + a min(u,0))
void rk4_step(double& u, double& v, double h, double a, double b) {
    auto acc = [&](double uu) { return -(b * std::max(uu, 0.0) + a * std::min(uu, 0.0)); };
    const double k1u = v;
    const double k1v = acc(u);
    const double k2u = v + 0.5 * h * k1v;
    const double k2v = acc(u + 0.5 * h * k1u);
    const double k3u = v + 0.5 * h * k2v;
    const double k3v = acc(u + 0.5 * h * k2u);
    const double k4u = v + h * k3v;
    const double k4v = acc(u + h * k3u);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

struct Shot {
    double u_end;
    int zero_crossings;
};

Shot shoot(double length, double a, double b, int steps) {
    double u = 0.0;
    double v = 1.0;
    const double h = length / steps;
    int crossings = 0;
    double prev = 0.0;
    for (int i = 0; i < steps; ++i) {
        rk4_step(u, v, h, a, b);
        if (i > 0 && prev * u < 0.0) ++crossings;
        if (u != 0.0) prev = u;
    }
    return {u, crossings};
}

}  // namespace

FucikPair locate_fucik_pair(double length, int p, double b_slope, int rk_steps) {
    constexpr double kPi = 3.14159265358979323846;
    const double mu_p = kPi * kPi * p * p / (length * length);
    if (!(b_slope > mu_p))
        throw FucikLocationFailed("locate_fucik_pair needs b above mu_p");

    auto end_value = [&](double a) { return shoot(length, a, b_slope, rk_steps).u_end; };
    double a_lo = 1e-3 * mu_p;
    double a_hi = mu_p;
    double f_lo = end_value(a_lo);
    double f_hi = end_value(a_hi);
    if (f_lo * f_hi > 0.0) {
        std::ostringstream os;
        os << "cannot bracket the Fucik pair at p = " << p << ", b = " << b_slope;
        throw FucikLocationFailed(os.str());
    }
    const double a = brent_root(end_value, a_lo, a_hi, f_lo, f_hi, 1e-12);

    const Shot confirm = shoot(length, a, b_slope, rk_steps);
    if (confirm.zero_crossings != p - 1) {
        std::ostringstream os;
        os << "shooting found " << confirm.zero_crossings << " interior zeros, expected " << p - 1;
        throw FucikLocationFailed(os.str());
    }
    FucikPair pair;
    pair.p = p;
    pair.a = a;
    pair.b = b_slope;
    pair.c1 = mu_p - a;
    pair.c2 = b_slope - mu_p;
    return pair;
}

FucikReport fucik_check(const ProblemSpec& ps, double T, double tol, const AnalysisOptions& opts) {
    FucikReport rep;
    rep.T = T;
    rep.tol = tol;
    Vec z0(ps.dim(), 0.0);
    FiberTrace trace = trace_fiber(ps, z0, 0.0, T, opts.trace_steps, opts.fiber);
    for (const FiberPoint& pt : trace.points) {
        const double denom = 1.0 + pt.t;
        const Vec Fu = ps.apply_F(pt.u);
        rep.max_height_scaled = std::max(rep.max_height_scaled, std::fabs(pt.height) / denom);
        rep.max_residual_scaled = std::max(rep.max_residual_scaled, norm2(Fu) / denom);
    }
    rep.collapse_verified = rep.max_height_scaled <= tol && rep.max_residual_scaled <= tol;
    return rep;
}

}  // namespace fiberfold
