#pragma once

// Coefficient vectors and the handful of operations the solvers need.
// Everything routes through the dispatched kernels.

#include "fiberfold/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace fiberfold {

using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) { return kernels::dot(x.data(), y.data(), x.size()); }

inline double norm2(const Vec& x) { return std::sqrt(kernels::nrm2sq(x.data(), x.size())); }

inline double max_abs(const Vec& x) { return kernels::max_abs(x.data(), x.size()); }

inline void axpy(double a, const Vec& x, Vec& y) { kernels::axpy(a, x.data(), y.data(), x.size()); }

inline void scale(Vec& x, double a) { kernels::scal(a, x.data(), x.size()); }

inline Vec operator+(Vec a, const Vec& b) {
    kernels::axpy(1.0, b.data(), a.data(), a.size());
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    kernels::axpy(-1.0, b.data(), a.data(), a.size());
    return a;
}

inline Vec operator*(double a, Vec x) {
    kernels::scal(a, x.data(), x.size());
    return x;
}

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace fiberfold
