#include "fiberfold/contraction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fiberfold {

namespace {

struct RateTracker {
    std::vector<double> deltas;

    void push(double d) { deltas.push_back(d); }

    // geometric mean and max of consecutive delta ratios, skipping the first
    // 3 iterations and ratios contaminated by roundoff
    void finish(double floor, SolveReport& rep) const {
        double log_sum = 0.0;
        int count = 0;
        double worst = 0.0;
        for (std::size_t i = 3; i + 1 < deltas.size(); ++i) {
            if (deltas[i] <= floor || deltas[i + 1] <= floor) continue;
            const double r = deltas[i + 1] / deltas[i];
            log_sum += std::log(r);
            worst = std::max(worst, r);
            ++count;
        }
        rep.observed_rate = count > 0 ? std::exp(log_sum / count) : 0.0;
        rep.max_ratio = worst;
    }
};

}  // namespace

SolveReport solve_full(const ProblemSpec& ps, const Vec& y, const SolveOptions& opts) {
    const int n = ps.dim();
    if (static_cast<int>(y.size()) != n) throw ConfigError("solve_full: rhs dimension mismatch");
    const Vec& mu = ps.op->spectrum();
    double c_full = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) c_full = std::min(c_full, std::fabs(mu[k] - ps.gamma));
    if (!(ps.lipschitz_n < c_full)) {
        std::ostringstream os;
        os << "full solve needs [-c, c] free of shifted spectrum with n < c; got n = "
           << ps.lipschitz_n << ", c = " << c_full
           << " (use the projected fiber path in the fold regime)";
        throw GapViolated(ps.lipschitz_n, c_full, os.str());
    }

    // iterate z' = N_s(L_s^{-1} z) + y, with u = L_s^{-1} z
    Vec z(n);
    if (opts.warm_start) {
        const Vec& u0 = *opts.warm_start;
        for (int k = 0; k < n; ++k) z[k] = (mu[k] - ps.gamma) * u0[k];
    } else {
        z = y;
    }

    Vec u(n);
    RateTracker rate;
    SolveReport rep;
    const double scale = std::max(1.0, norm2(y));
    for (int it = 1; it <= opts.max_iters; ++it) {
        for (int k = 0; k < n; ++k) u[k] = z[k] / (mu[k] - ps.gamma);
        Vec ns = ps.apply_N_shifted(u);
        // residual on the user contract: ||F(u) - y||_Y, F(u) = z - N_s(u)
        double res2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double r = z[k] - ns[k] - y[k];
            res2 += r * r;
        }
        rep.iterations = it;
        rep.final_residual = std::sqrt(res2);
        if (rep.final_residual <= opts.tol_residual) {
            rep.solution = u;
            rate.finish(1e-14 * scale, rep);
            return rep;
        }
        // z' = N_s(u) + y
        double delta2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double znew = ns[k] + y[k];
            const double d = znew - z[k];
            delta2 += d * d;
            z[k] = znew;
        }
        rate.push(std::sqrt(delta2));
    }
    std::ostringstream os;
    os << "solve_full did not reach residual " << opts.tol_residual << " within "
       << opts.max_iters << " iterations (last " << rep.final_residual << ")";
    throw NonConvergence(os.str(), rep.final_residual);
}

SolveReport solve_projected(const ProblemSpec& ps, const Vec& z0, double t,
                            const SolveOptions& opts) {
    const int n = ps.dim();
    const int p = ps.p;
    if (static_cast<int>(z0.size()) != n)
        throw ConfigError("solve_projected: z0 dimension mismatch");
    if (std::fabs(z0[p]) > 0.0)
        throw ConfigError("solve_projected: z0 must have zero p-coefficient");
    const Vec& mu = ps.op->spectrum();

    Vec z(n, 0.0);
    if (opts.warm_start) {
        const Vec& w0 = *opts.warm_start;
        for (int k = 0; k < n; ++k) z[k] = (mu[k] - ps.gamma) * w0[k];
    } else {
        z = z0;
    }
    z[p] = 0.0;

    Vec u(n);
    RateTracker rate;
    SolveReport rep;
    const double scale = std::max(1.0, norm2(z0) + std::fabs(t));
    for (int it = 1; it <= opts.max_iters; ++it) {
        for (int k = 0; k < n; ++k) u[k] = k == p ? t : z[k] / (mu[k] - ps.gamma);
        Vec ns = ps.apply_N_shifted(u);
        double res2 = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == p) continue;
            const double r = z[k] - ns[k] - z0[k];
            res2 += r * r;
        }
        rep.iterations = it;
        rep.final_residual = std::sqrt(res2);
        if (rep.final_residual <= opts.tol_residual) {
            rep.solution = u;
            rep.solution[p] = 0.0;  // return w only
            rate.finish(1e-14 * scale, rep);
            return rep;
        }
        double delta2 = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == p) continue;
            const double znew = ns[k] + z0[k];
            const double d = znew - z[k];
            delta2 += d * d;
            z[k] = znew;
        }
        rate.push(std::sqrt(delta2));
    }
    std::ostringstream os;
    os << "solve_projected did not converge at t = " << t << " (residual "
       << rep.final_residual << " after " << opts.max_iters
       << " iterations; contraction bound n/c = " << ps.contraction_ratio() << ")";
    throw NonConvergence(os.str(), rep.final_residual);
}

}  // namespace fiberfold
