#include "fiberfold/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fiberfold {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre(int n, Vec& nodes, Vec& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int mid = (n + 1) / 2;
    for (int i = 0; i < mid; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        const double w = 1.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace

BoxDomain make_box(std::vector<double> lengths) {
    if (lengths.empty() || lengths.size() > 2)
        throw ConfigError("domain must have one or two lengths");
    for (double l : lengths)
        if (!(l > 0.0)) throw ConfigError("domain lengths must be strictly positive");
    return BoxDomain{std::move(lengths)};
}

SpectralBasis::SpectralBasis(BoxDomain domain, std::vector<int> mode_counts, int grid_factor)
    : domain_(std::move(domain)), mode_counts_(std::move(mode_counts)), grid_factor_(grid_factor) {
    const int d = domain_.dim();
    if (d < 1 || d > 2) throw ConfigError("basis supports one or two axes");
    if (static_cast<int>(mode_counts_.size()) != d)
        throw ConfigError("mode_counts must match the domain dimension");
    for (double l : domain_.lengths)
        if (!(l > 0.0)) throw ConfigError("domain lengths must be strictly positive");
    for (int m : mode_counts_)
        if (m < 1) throw ConfigError("mode counts must be >= 1");
    if (grid_factor_ < 2) throw ConfigError("grid_factor must be >= 2");

    grid_sizes_.resize(d);
    nodes_.resize(d);
    weights_.resize(d);
    synth_.resize(d);
    analy_.resize(d);
    gram_.resize(d);
    for (int ax = 0; ax < d; ++ax) {
        const double len = domain_.lengths[ax];
        const int m = mode_counts_[ax];
        const int big = grid_factor_ * m;
        grid_sizes_[ax] = big;
        gauss_legendre(big, nodes_[ax], weights_[ax]);
        for (int j = 0; j < big; ++j) {
            nodes_[ax][j] *= len;
            weights_[ax][j] *= len;
        }
        const double nrm = std::sqrt(2.0 / len);
        synth_[ax].assign(static_cast<std::size_t>(big) * m, 0.0);
        analy_[ax].assign(static_cast<std::size_t>(m) * big, 0.0);
        for (int j = 0; j < big; ++j)
            for (int k = 0; k < m; ++k) {
                const double v = nrm * std::sin((k + 1) * kPi * nodes_[ax][j] / len);
                synth_[ax][static_cast<std::size_t>(j) * m + k] = v;
                analy_[ax][static_cast<std::size_t>(k) * big + j] = weights_[ax][j] * v;
            }
        Mat gram(m, m);
        for (int k = 0; k < m; ++k)
            for (int l = k; l < m; ++l) {
                double s = 0.0;
                for (int j = 0; j < big; ++j)
                    s += weights_[ax][j] * synth_[ax][static_cast<std::size_t>(j) * m + k] *
                         synth_[ax][static_cast<std::size_t>(j) * m + l];
                gram(k, l) = s;
                gram(l, k) = s;
            }
        gram_[ax] = lu_factor(std::move(gram));
    }

    const int mx = mode_counts_[0];
    const int my = d == 2 ? mode_counts_[1] : 1;
    const int total = mx * my;
    struct Entry {
        double mu;
        ModeTuple t;
    };
    std::vector<Entry> entries;
    entries.reserve(total);
    for (int k1 = 1; k1 <= mx; ++k1)
        for (int k2 = 1; k2 <= my; ++k2) {
            double mu = kPi * kPi * (k1 * k1) / (domain_.lengths[0] * domain_.lengths[0]);
            ModeTuple t{k1, 0};
            if (d == 2) {
                mu += kPi * kPi * (k2 * k2) / (domain_.lengths[1] * domain_.lengths[1]);
                t[1] = k2;
            }
            entries.push_back({mu, t});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.mu != b.mu) return a.mu < b.mu;
        return a.t < b.t;  // deterministic tie order
    });
    eigenvalues_.resize(total);
    tuples_.resize(total);
    tensor_to_flat_.assign(total, -1);
    for (int i = 0; i < total; ++i) {
        eigenvalues_[i] = entries[i].mu;
        tuples_[i] = entries[i].t;
        const int k2 = d == 2 ? entries[i].t[1] : 1;
        tensor_to_flat_[(entries[i].t[0] - 1) * my + (k2 - 1)] = i;
    }
}

int SpectralBasis::grid_points() const {
    int n = grid_sizes_[0];
    if (dim() == 2) n *= grid_sizes_[1];
    return n;
}

int SpectralBasis::flat_index(const ModeTuple& t) const {
    const int my = dim() == 2 ? mode_counts_[1] : 1;
    const int k2 = dim() == 2 ? t[1] : 1;
    if (t[0] < 1 || t[0] > mode_counts_[0] || k2 < 1 || k2 > my)
        throw ConfigError("mode tuple out of range");
    return tensor_to_flat_[(t[0] - 1) * my + (k2 - 1)];
}

std::vector<std::vector<int>> SpectralBasis::degenerate_groups() const {
    std::vector<std::vector<int>> groups;
    const int n = modes();
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && eigenvalues_[j] <= eigenvalues_[i] * (1.0 + 1e-12)) ++j;
        if (j - i > 1) {
            std::vector<int> g;
            for (int k = i; k < j; ++k) g.push_back(k);
            groups.push_back(std::move(g));
        }
        i = j;
    }
    return groups;
}

std::array<double, 2> SpectralBasis::grid_point(int flat_node) const {
    if (dim() == 1) return {nodes_[0][flat_node], 0.0};
    const int ny = grid_sizes_[1];
    return {nodes_[0][flat_node / ny], nodes_[1][flat_node % ny]};
}

double SpectralBasis::quadrature_dot(const Vec& g1, const Vec& g2) const {
    if (dim() == 1) return kernels::dot3(weights_[0].data(), g1.data(), g2.data(), g1.size());
    const int nx = grid_sizes_[0];
    const int ny = grid_sizes_[1];
    double s = 0.0;
    for (int i = 0; i < nx; ++i)
        s += weights_[0][i] *
             kernels::dot3(weights_[1].data(), g1.data() + static_cast<std::size_t>(i) * ny,
                           g2.data() + static_cast<std::size_t>(i) * ny, ny);
    return s;
}

void SpectralBasis::synthesize(const Vec& coef, Vec& grid_values) const {
    if (dim() == 1) {
        const int big = grid_sizes_[0];
        const int m = mode_counts_[0];
        grid_values.assign(big, 0.0);
        // scatter sorted coefficients to tensor order k-1
        Vec c(m, 0.0);
        for (int f = 0; f < m; ++f) c[tuples_[f][0] - 1] = coef[f];
        for (int j = 0; j < big; ++j)
            grid_values[j] = kernels::dot(synth_[0].data() + static_cast<std::size_t>(j) * m, c.data(), m);
        return;
    }
    const int mx = mode_counts_[0];
    const int my = mode_counts_[1];
    const int nx = grid_sizes_[0];
    const int ny = grid_sizes_[1];
    Vec c(static_cast<std::size_t>(mx) * my, 0.0);
    for (int f = 0; f < modes(); ++f)
        c[static_cast<std::size_t>(tuples_[f][0] - 1) * my + (tuples_[f][1] - 1)] = coef[f];
    // U[k][j] = sum_l C[k][l] Sy[j][l]
    Vec u(static_cast<std::size_t>(mx) * ny, 0.0);
    for (int k = 0; k < mx; ++k) {
        const double* crow = c.data() + static_cast<std::size_t>(k) * my;
        double* urow = u.data() + static_cast<std::size_t>(k) * ny;
        for (int j = 0; j < ny; ++j)
            urow[j] = kernels::dot(crow, synth_[1].data() + static_cast<std::size_t>(j) * my, my);
    }
    // G[i][:] = sum_k Sx[i][k] U[k][:]
    grid_values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int i = 0; i < nx; ++i) {
        double* grow = grid_values.data() + static_cast<std::size_t>(i) * ny;
        const double* srow = synth_[0].data() + static_cast<std::size_t>(i) * mx;
        for (int k = 0; k < mx; ++k)
            if (srow[k] != 0.0)
                kernels::axpy(srow[k], u.data() + static_cast<std::size_t>(k) * ny, grow, ny);
    }
}

void SpectralBasis::analyze(const Vec& grid_values, Vec& coef) const {
    if (dim() == 1) {
        const int big = grid_sizes_[0];
        const int m = mode_counts_[0];
        Vec c(m);
        for (int k = 0; k < m; ++k)
            c[k] = kernels::dot(analy_[0].data() + static_cast<std::size_t>(k) * big, grid_values.data(), big);
        lu_solve(gram_[0], c);
        coef.assign(m, 0.0);
        for (int f = 0; f < m; ++f) coef[f] = c[tuples_[f][0] - 1];
        return;
    }
    const int mx = mode_counts_[0];
    const int my = mode_counts_[1];
    const int nx = grid_sizes_[0];
    const int ny = grid_sizes_[1];
    // T[i][l] = sum_j G[i][j] Ay[l][j]
    Vec t(static_cast<std::size_t>(nx) * my, 0.0);
    for (int i = 0; i < nx; ++i) {
        const double* grow = grid_values.data() + static_cast<std::size_t>(i) * ny;
        double* trow = t.data() + static_cast<std::size_t>(i) * my;
        for (int l = 0; l < my; ++l)
            trow[l] = kernels::dot(grow, analy_[1].data() + static_cast<std::size_t>(l) * ny, ny);
    }
    // C[k][:] = sum_i Ax[k][i] T[i][:]
    Vec c(static_cast<std::size_t>(mx) * my, 0.0);
    for (int k = 0; k < mx; ++k) {
        double* crow = c.data() + static_cast<std::size_t>(k) * my;
        const double* arow = analy_[0].data() + static_cast<std::size_t>(k) * nx;
        for (int i = 0; i < nx; ++i)
            if (arow[i] != 0.0)
                kernels::axpy(arow[i], t.data() + static_cast<std::size_t>(i) * my, crow, my);
    }
    // Gram solves along both axes: C <- Gx^{-1} C Gy^{-1}
    Vec line(std::max(mx, my));
    for (int k = 0; k < mx; ++k) {
        line.assign(c.begin() + static_cast<std::size_t>(k) * my,
                    c.begin() + static_cast<std::size_t>(k + 1) * my);
        lu_solve(gram_[1], line);
        std::copy(line.begin(), line.begin() + my, c.begin() + static_cast<std::size_t>(k) * my);
    }
    for (int l = 0; l < my; ++l) {
        line.resize(mx);
        for (int k = 0; k < mx; ++k) line[k] = c[static_cast<std::size_t>(k) * my + l];
        lu_solve(gram_[0], line);
        for (int k = 0; k < mx; ++k) c[static_cast<std::size_t>(k) * my + l] = line[k];
    }
    coef.assign(modes(), 0.0);
    for (int f = 0; f < modes(); ++f)
        coef[f] = c[static_cast<std::size_t>(tuples_[f][0] - 1) * my + (tuples_[f][1] - 1)];
}

double Field::norm_X() const {
    double s = 0.0;
    for (int k = 0; k < basis->modes(); ++k) {
        const double v = (1.0 + basis->eigenvalue(k)) * coef[k];
        s += v * v;
    }
    return std::sqrt(s);
}

Field make_field(const SpectralBasis& basis) { return Field{&basis, Vec(basis.modes(), 0.0)}; }

Field make_field(const SpectralBasis& basis, Vec coef) {
    if (static_cast<int>(coef.size()) != basis.modes())
        throw ConfigError("coefficient count does not match the basis");
    return Field{&basis, std::move(coef)};
}

GridField to_grid(const Field& f) {
    GridField g;
    g.basis = f.basis;
    f.basis->synthesize(f.coef, g.values);
    return g;
}

Field from_grid(const GridField& g) {
    Field f;
    f.basis = g.basis;
    g.basis->analyze(g.values, f.coef);
    return f;
}

GridField map_grid(const GridField& g, const ScalarMap& map) {
    GridField out;
    out.basis = g.basis;
    out.values.resize(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        out.values[i] = map(g.values[i]);
        if (!std::isfinite(out.values[i]))
            throw NonFiniteValue("pointwise map produced a non-finite nodal value");
    }
    return out;
}

Field apply_nemitskii(const Field& u, const ScalarMap& map) {
    GridField g = to_grid(u);
    return from_grid(map_grid(g, map));
}

Field apply_nemitskii(const Field& u, const PointScalarMap& map) {
    GridField g = to_grid(u);
    GridField mapped;
    mapped.basis = g.basis;
    mapped.values.resize(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        mapped.values[i] = map(g.basis->grid_point(static_cast<int>(i)), g.values[i]);
        if (!std::isfinite(mapped.values[i]))
            throw NonFiniteValue("pointwise map produced a non-finite nodal value");
    }
    return from_grid(mapped);
}

}  // namespace fiberfold
