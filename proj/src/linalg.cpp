#include "fiberfold/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fiberfold {

void Mat::symmetrize() {
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j) {
            const double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = m;
            (*this)(j, i) = m;
        }
}

double Mat::asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

double Mat::max_abs_entry() const { return kernels::max_abs(a_.data(), a_.size()); }

void matvec(const Mat& a, const Vec& x, Vec& y) {
    y.resize(a.rows());
    for (int i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row(i), x.data(), x.size());
}

LuFactors lu_factor(Mat a) {
    const int n = a.rows();
    LuFactors f;
    f.piv.resize(n);
    double umax = 0.0;
    double umin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        f.piv[k] = piv;
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        const double d = a(k, k);
        umax = std::max(umax, std::fabs(d));
        umin = std::min(umin, std::fabs(d));
        if (d == 0.0) {
            f.singular = true;
            continue;
        }
        for (int i = k + 1; i < n; ++i) {
            const double l = a(i, k) / d;
            a(i, k) = l;
            if (l != 0.0) kernels::axpy(-l, a.row(k) + k + 1, a.row(i) + k + 1, n - k - 1);
        }
    }
    f.pivot_ratio = umin > 0.0 ? umax / umin : std::numeric_limits<double>::infinity();
    f.lu = std::move(a);
    return f;
}

void lu_solve(const LuFactors& f, Vec& b) {
    const int n = f.lu.rows();
    if (f.singular) throw std::runtime_error("lu_solve: singular matrix");
    for (int k = 0; k < n; ++k) {
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
        // forward substitution uses the stored multipliers below the diagonal
    }
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * b[k];
    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) b[k] -= f.lu(k, j) * b[j];
        b[k] /= f.lu(k, k);
    }
}

namespace {

inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Householder reduction of a symmetric matrix to tridiagonal form,
// accumulating the transformation in z (classic tred2).
void tred2(Mat& z, Vec& d, Vec& e) {
    const int n = z.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }

    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on the tridiagonal (d, e), updating eigenvectors in z.
void tql2(Mat& z, Vec& d, Vec& e) {
    const int n = z.rows();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 || std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (m != l) {
                if (++iter == 50) throw std::runtime_error("sym_eigen: QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = i >= l;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    // rotate eigenvector columns i and i+1
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SymEigen sym_eigen(const Mat& a) {
    const int n = a.rows();
    SymEigen out;
    out.vectors = a;
    Vec e;
    tred2(out.vectors, out.values, e);
    tql2(out.vectors, out.values, e);

    // sort ascending, carrying columns along
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return out.values[i] < out.values[j]; });
    Vec sorted_vals(n);
    Mat sorted_vecs(n, n);
    for (int j = 0; j < n; ++j) {
        sorted_vals[j] = out.values[order[j]];
        for (int i = 0; i < n; ++i) sorted_vecs(i, j) = out.vectors(i, order[j]);
    }
    out.values = std::move(sorted_vals);
    out.vectors = std::move(sorted_vecs);
    return out;
}

Vec singular_values(const Mat& a) {
    const int k = a.rows();
    Mat gram(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double g = kernels::dot(a.row(i), a.row(j), a.cols());
            gram(i, j) = g;
            gram(j, i) = g;
        }
    SymEigen eig = sym_eigen(gram);
    Vec sv(k);
    for (int i = 0; i < k; ++i) sv[i] = std::sqrt(std::max(0.0, eig.values[k - 1 - i]));
    return sv;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double xtol) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                  double xtol, int max_iter) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: no sign change on bracket");

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

}  // namespace fiberfold
