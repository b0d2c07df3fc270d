#pragma once

// Dirichlet sine eigenbasis of -Laplace on an interval or rectangle, with
// coefficient/nodal conversions and pseudo-spectral evaluation of pointwise
// (Nemitskii) operators.
//
// The collocation grid is a tensor Gauss-Legendre rule, oversampled by
// grid_factor per axis. from_grid is the discrete L2 projection under that
// rule, so from_grid(to_grid(f)) reproduces band-limited data to machine
// precision for grid_factor >= 2, and projections of smooth compositions
// carry quadrature error far below the solver tolerances.

#include "fiberfold/errors.hpp"
#include "fiberfold/linalg.hpp"
#include "fiberfold/vec.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fiberfold {

struct BoxDomain {
    std::vector<double> lengths;  // one entry per axis, strictly positive

    int dim() const { return static_cast<int>(lengths.size()); }
};

BoxDomain make_box(std::vector<double> lengths);

using ModeTuple = std::array<int, 2>;  // second entry 0 in one dimension

class SpectralBasis {
public:
    SpectralBasis(BoxDomain domain, std::vector<int> mode_counts, int grid_factor = 4);

    const BoxDomain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    int modes() const { return static_cast<int>(eigenvalues_.size()); }
    int mode_count(int axis) const { return mode_counts_[axis]; }
    int grid_size(int axis) const { return grid_sizes_[axis]; }
    int grid_factor() const { return grid_factor_; }
    int grid_points() const;

    // Eigenvalues mu_k = pi^2 sum_i (k_i/L_i)^2, ascending, ties broken by
    // lexicographic tuple order.
    const Vec& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(int flat) const { return eigenvalues_[flat]; }
    ModeTuple mode_tuple(int flat) const { return tuples_[flat]; }
    int flat_index(const ModeTuple& t) const;
    int ground_state() const { return 0; }

    // groups of flat indices sharing an eigenvalue (square-domain ties)
    std::vector<std::vector<int>> degenerate_groups() const;

    const Vec& nodes(int axis) const { return nodes_[axis]; }
    const Vec& weights(int axis) const { return weights_[axis]; }
    std::array<double, 2> grid_point(int flat_node) const;

    // quadrature of the product of two nodal fields
    double quadrature_dot(const Vec& g1, const Vec& g2) const;

    void synthesize(const Vec& coef, Vec& grid_values) const;  // coef -> nodal
    void analyze(const Vec& grid_values, Vec& coef) const;     // nodal -> coef (L2 projection)

private:
    BoxDomain domain_;
    std::vector<int> mode_counts_;
    std::vector<int> grid_sizes_;
    int grid_factor_;

    Vec eigenvalues_;
    std::vector<ModeTuple> tuples_;
    std::vector<int> tensor_to_flat_;  // (k1-1)*my + (k2-1) -> flat sorted index

    std::vector<Vec> nodes_;    // per axis
    std::vector<Vec> weights_;  // per axis
    std::vector<Vec> synth_;    // per axis, (M x m) row-major: sqrt(2/L) sin(k pi x/L)
    std::vector<Vec> analy_;    // per axis, (m x M) row-major: weights * synth^T
    // per-axis Gram factors (S^T W S, ~identity): analysis solves against them
    // so that from_grid is the exact discrete least-squares projection and
    // from_grid(to_grid(f)) = f holds to machine precision for any factor >= 2
    std::vector<LuFactors> gram_;
};

struct Field {
    const SpectralBasis* basis = nullptr;
    Vec coef;

    double norm_Y() const { return norm2(coef); }
    double norm_X() const;
};

struct GridField {
    const SpectralBasis* basis = nullptr;
    Vec values;  // row-major over axes
};

Field make_field(const SpectralBasis& basis);
Field make_field(const SpectralBasis& basis, Vec coef);

GridField to_grid(const Field& f);
Field from_grid(const GridField& g);

using ScalarMap = std::function<double(double)>;
using PointScalarMap = std::function<double(const std::array<double, 2>&, double)>;

// Projection onto the basis of the pointwise map applied on the collocation
// grid. Throws NonFiniteValue if the map overflows at some node.
Field apply_nemitskii(const Field& u, const ScalarMap& map);
Field apply_nemitskii(const Field& u, const PointScalarMap& map);

// Pointwise map of nodal values with finiteness check.
GridField map_grid(const GridField& g, const ScalarMap& map);

}  // namespace fiberfold
