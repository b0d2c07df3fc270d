#pragma once

// Dense row-major matrices, LU with partial pivoting, a symmetric eigensolver
// (Householder tridiagonalization + implicit-shift QL), and Brent root finding.
// Sizes here are at most a few hundred, so dense direct methods are the right
// tool; the hot loops route through the dispatched kernels.

#include "fiberfold/vec.hpp"

#include <functional>
#include <vector>

namespace fiberfold {

class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    void symmetrize();
    double asymmetry() const;  // max |A - A^T| entry
    double max_abs_entry() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// y = A x (row-major), built on the dot kernel.
void matvec(const Mat& a, const Vec& x, Vec& y);

struct LuFactors {
    Mat lu;
    std::vector<int> piv;
    // Ratio of largest to smallest |U_ii|; crude conditioning proxy, infinite
    // when a pivot vanished.
    double pivot_ratio = 0.0;
    bool singular = false;
};

LuFactors lu_factor(Mat a);
void lu_solve(const LuFactors& f, Vec& b);

struct SymEigen {
    Vec values;  // ascending
    Mat vectors; // column j is the eigenvector for values[j]
};

// Householder reduction + implicit-shift QL with eigenvector accumulation.
SymEigen sym_eigen(const Mat& a);

// Singular values (descending) of a small k x d matrix via the Gram matrix.
Vec singular_values(const Mat& a);

// Brent root finding on [a,b] with f(a), f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                  double xtol, int max_iter = 200);

// Golden-section minimizer on [a,b]; returns the abscissa.
double golden_min(const std::function<double(double)>& f, double a, double b, double xtol);

}  // namespace fiberfold
