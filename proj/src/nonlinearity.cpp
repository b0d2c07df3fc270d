#include "fiberfold/nonlinearity.hpp"

#include <cmath>
#include <numbers>

namespace fiberfold {

namespace {

constexpr double kPi = std::numbers::pi;

// log(cosh(x)) without overflow
double log_cosh(double x) {
    const double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

void Nonlinearity::validate() const {
    if (!(slope_inf_ <= slope_sup_))
        throw ConfigError("nonlinearity slope bounds must satisfy slope_inf <= slope_sup");
    if (kind_ != Kind::PiecewiseLinear && !(slope_inf_ < slope_sup_))
        throw ConfigError("nonlinearity requires slope_inf < slope_sup");
    if (!std::isfinite(slope_inf_) || !std::isfinite(slope_sup_))
        throw ConfigError("nonlinearity slope bounds must be finite");
}

Nonlinearity Nonlinearity::arctan_gauss(double base, double scale, double width, double gauss_coef,
                                        double f0) {
    if (!(width > 0.0)) throw ConfigError("arctan_gauss width must be positive");
    Nonlinearity n;
    n.kind_ = Kind::ArctanGauss;
    n.params_ = {base, scale, width, gauss_coef};
    n.f0_ = f0;
    n.asym_minus_ = base - scale * kPi / 2.0;
    n.asym_plus_ = base + scale * kPi / 2.0;
    // The interior extrema of f' can exceed the asymptotic limits for large
    // gauss_coef; scan and refine to get the true bounds.
    double lo = std::min(n.asym_minus_, n.asym_plus_);
    double hi = std::max(n.asym_minus_, n.asym_plus_);
    double xlo = 0.0;
    double xhi = 0.0;
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        const double x = -8.0 * width + 16.0 * width * i / samples;
        const double v = n.eval_prime(x);
        if (v < lo) {
            lo = v;
            xlo = x;
        }
        if (v > hi) {
            hi = v;
            xhi = x;
        }
    }
    const double h = 16.0 * width / samples;
    auto refine = [&](double x0, int sign) {
        double a = x0 - h;
        double b = x0 + h;
        for (int it = 0; it < 200; ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            if (sign * n.eval_prime(m1) < sign * n.eval_prime(m2))
                a = m1;
            else
                b = m2;
        }
        return n.eval_prime(0.5 * (a + b));
    };
    if (lo < std::min(n.asym_minus_, n.asym_plus_)) lo = std::min(lo, refine(xlo, -1));
    if (hi > std::max(n.asym_minus_, n.asym_plus_)) hi = std::max(hi, refine(xhi, +1));
    n.slope_inf_ = lo;
    n.slope_sup_ = hi;
    n.validate();
    return n;
}

Nonlinearity Nonlinearity::smooth_convex(double a, double b, double sharpness, double f0) {
    if (!(a < b)) throw ConfigError("smooth_convex requires a < b");
    if (!(sharpness > 0.0)) throw ConfigError("smooth_convex sharpness must be positive");
    Nonlinearity n;
    n.kind_ = Kind::SmoothConvex;
    n.params_ = {a, b, sharpness};
    n.f0_ = f0;
    n.slope_inf_ = a;
    n.slope_sup_ = b;
    n.asym_minus_ = a;
    n.asym_plus_ = b;
    // convexity sanity: sampled f' nondecreasing
    double prev = n.eval_prime(-40.0 / sharpness);
    for (int i = 1; i <= 200; ++i) {
        const double x = -40.0 / sharpness + 80.0 / sharpness * i / 200.0;
        const double v = n.eval_prime(x);
        if (v + 1e-12 < prev) throw InvariantFailure("smooth_convex: sampled f' not nondecreasing");
        prev = v;
    }
    n.validate();
    return n;
}

Nonlinearity Nonlinearity::piecewise_linear(double a, double b, double f0) {
    Nonlinearity n;
    n.kind_ = Kind::PiecewiseLinear;
    n.params_ = {a, b};
    n.f0_ = f0;
    n.slope_inf_ = std::min(a, b);
    n.slope_sup_ = std::max(a, b);
    n.asym_minus_ = a;
    n.asym_plus_ = b;
    n.validate();
    return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f, std::function<double(double)> fp,
                                  double slope_inf, double slope_sup, double asym_minus,
                                  double asym_plus, double f0) {
    Nonlinearity n;
    n.kind_ = Kind::Custom;
    n.custom_f_ = std::move(f);
    n.custom_fp_ = std::move(fp);
    n.slope_inf_ = slope_inf;
    n.slope_sup_ = slope_sup;
    n.asym_minus_ = asym_minus;
    n.asym_plus_ = asym_plus;
    n.f0_ = f0;
    n.validate();
    return n;
}

Nonlinearity Nonlinearity::custom_from_derivative(std::function<double(double)> fp, double slope_inf,
                                                  double slope_sup, double asym_minus,
                                                  double asym_plus, double f0) {
    auto f = [fp, f0](double x) { return f0 + integrate_adaptive(fp, 0.0, x); };
    return custom(std::move(f), std::move(fp), slope_inf, slope_sup, asym_minus, asym_plus, f0);
}

double Nonlinearity::eval(double x) const {
    switch (kind_) {
        case Kind::ArctanGauss: {
            const double base = params_[0];
            const double s = params_[1];
            const double w = params_[2];
            const double q = params_[3];
            const double y = x / w;
            const double c = f0_ - s * q * w * w / 2.0;
            return s * (x * std::atan(y) - 0.5 * w * std::log1p(y * y) +
                        q * 0.5 * w * w * std::exp(-y * y)) +
                   base * x + c;
        }
        case Kind::SmoothConvex: {
            const double a = params_[0];
            const double b = params_[1];
            const double k = params_[2];
            return a * x + 0.5 * (b - a) * (x + log_cosh(k * x) / k) + f0_;
        }
        case Kind::PiecewiseLinear: {
            const double a = params_[0];
            const double b = params_[1];
            return b * std::max(x, 0.0) + a * std::min(x, 0.0) + f0_;
        }
        case Kind::Custom:
            return custom_f_(x);
    }
    return 0.0;
}

double Nonlinearity::eval_prime(double x) const {
    switch (kind_) {
        case Kind::ArctanGauss: {
            const double base = params_[0];
            const double s = params_[1];
            const double w = params_[2];
            const double q = params_[3];
            const double y = x / w;
            return s * (std::atan(y) - q * x * std::exp(-y * y)) + base;
        }
        case Kind::SmoothConvex: {
            const double a = params_[0];
            const double b = params_[1];
            const double k = params_[2];
            return a + 0.5 * (b - a) * (1.0 + std::tanh(k * x));
        }
        case Kind::PiecewiseLinear: {
            const double a = params_[0];
            const double b = params_[1];
            if (x > 0.0) return b;
            if (x < 0.0) return a;
            return 0.5 * (a + b);  // a.e.-derivative convention at the kink
        }
        case Kind::Custom:
            return custom_fp_(x);
    }
    return 0.0;
}

double Nonlinearity::eval(const std::array<double, 2>& pt, double x) const {
    const double v = eval(x);
    return modulation_ ? modulation_(pt) * v : v;
}

double Nonlinearity::eval_prime(const std::array<double, 2>& pt, double x) const {
    const double v = eval_prime(x);
    return modulation_ ? modulation_(pt) * v : v;
}

Nonlinearity Nonlinearity::with_modulation(std::function<double(const std::array<double, 2>&)> m,
                                           double lo, double hi) const {
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("modulation range must satisfy 0 < lo <= hi");
    Nonlinearity n = *this;
    n.modulation_ = std::move(m);
    n.slope_inf_ = std::min(std::min(lo * slope_inf_, hi * slope_inf_),
                            std::min(lo * slope_sup_, hi * slope_sup_));
    n.slope_sup_ = std::max(std::max(lo * slope_inf_, hi * slope_inf_),
                            std::max(lo * slope_sup_, hi * slope_sup_));
    return n;
}

std::string Nonlinearity::kind_name() const {
    switch (kind_) {
        case Kind::ArctanGauss: return "arctan_gauss";
        case Kind::SmoothConvex: return "smooth_convex";
        case Kind::PiecewiseLinear: return "piecewise_linear";
        case Kind::Custom: return "custom";
    }
    return "custom";
}

Field asymptotic_nemitskii(const Nonlinearity& f, const Field& u) {
    GridField g = to_grid(u);
    const std::size_t n = g.values.size();
    Vec up(n);
    Vec un(n);
    kernels::pos_neg_split(g.values.data(), up.data(), un.data(), n);
    GridField out;
    out.basis = g.basis;
    out.values.resize(n);
    const double bp = f.asymptotic_slope_plus();
    const double am = f.asymptotic_slope_minus();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = bp * up[i] - am * un[i];
    if (f.modulated()) {
        // f(x, u) = m(x) f(u) scales the asymptotic map by the same weight
        for (std::size_t i = 0; i < n; ++i)
            out.values[i] *= f.modulation_at(g.basis->grid_point(static_cast<int>(i)));
    }
    return from_grid(out);
}

}  // namespace fiberfold
