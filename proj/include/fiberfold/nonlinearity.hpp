#pragma once

// Catalog of scalar nonlinearities with bounded derivative range: the
// arctan-Gaussian family, the smooth strictly convex family, piecewise-linear
// maps, and user-supplied customs. Each carries exact slope bounds
// [slope_inf, slope_sup] and the asymptotic slopes of f' at +-infinity.

#include "fiberfold/spectral.hpp"

#include <functional>
#include <optional>
#include <string>

namespace fiberfold {

class Nonlinearity {
public:
    enum class Kind { ArctanGauss, SmoothConvex, PiecewiseLinear, Custom };

    // f'(x) = scale*(atan(x/width) - gauss_coef*x*exp(-(x/width)^2)) + base,
    // integrated in closed form with f(0) = f0.
    static Nonlinearity arctan_gauss(double base, double scale, double width, double gauss_coef,
                                     double f0);

    // f'(x) = a + (b-a)/2*(1+tanh(sharpness*x)); smooth, strictly convex,
    // Ran f' = (a,b).
    static Nonlinearity smooth_convex(double a, double b, double sharpness, double f0 = 0.0);

    // f(x) = b*max(x,0) + a*min(x,0) + f0. f'(0) is reported as (a+b)/2 and
    // flagged; a == b degenerates to a linear map and is allowed.
    static Nonlinearity piecewise_linear(double a, double b, double f0 = 0.0);

    static Nonlinearity custom(std::function<double(double)> f, std::function<double(double)> fp,
                               double slope_inf, double slope_sup, double asym_minus,
                               double asym_plus, double f0);

    // Custom built from the derivative alone; f is recovered by adaptive
    // quadrature from 0 plus f0.
    static Nonlinearity custom_from_derivative(std::function<double(double)> fp, double slope_inf,
                                               double slope_sup, double asym_minus, double asym_plus,
                                               double f0);

    double eval(double x) const;
    double eval_prime(double x) const;

    // non-autonomous variants; identity when no modulation is set
    double eval(const std::array<double, 2>& pt, double x) const;
    double eval_prime(const std::array<double, 2>& pt, double x) const;

    Kind kind() const { return kind_; }
    double slope_inf() const { return slope_inf_; }
    double slope_sup() const { return slope_sup_; }
    double asymptotic_slope_minus() const { return asym_minus_; }
    double asymptotic_slope_plus() const { return asym_plus_; }
    double value_at_0() const { return f0_; }
    bool differentiable() const { return kind_ != Kind::PiecewiseLinear; }
    bool modulated() const { return static_cast<bool>(modulation_); }
    double modulation_at(const std::array<double, 2>& pt) const {
        return modulation_ ? modulation_(pt) : 1.0;
    }

    // Multiplier m(x) with declared range [lo, hi], 0 < lo <= hi; slope bounds
    // are widened to cover m(x)*f'(u).
    Nonlinearity with_modulation(std::function<double(const std::array<double, 2>&)> m, double lo,
                                 double hi) const;

    std::string kind_name() const;
    // raw parameters for serialization (kind dependent)
    const std::vector<double>& parameters() const { return params_; }

private:
    Nonlinearity() = default;

    Kind kind_ = Kind::Custom;
    std::vector<double> params_;
    double slope_inf_ = 0.0;
    double slope_sup_ = 0.0;
    double asym_minus_ = 0.0;
    double asym_plus_ = 0.0;
    double f0_ = 0.0;
    std::function<double(double)> custom_f_;
    std::function<double(double)> custom_fp_;
    std::function<double(const std::array<double, 2>&)> modulation_;

    void validate() const;
};

// Projection of the positive-homogeneous asymptotic map
// N_inf(u) = b_inf*u^+ - a_inf*u^-, evaluated pseudo-spectrally.
Field asymptotic_nemitskii(const Nonlinearity& f, const Field& u);

// Adaptive Simpson quadrature (used by custom_from_derivative).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

}  // namespace fiberfold
