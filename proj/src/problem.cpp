#include "fiberfold/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fiberfold {

void OperatorModel::apply_DN(const Vec& u, const Vec& v, Vec& out) const {
    Mat j;
    jacobian_N(u, j);
    matvec(j, v, out);
}

void OperatorModel::apply_N_asymptotic(const Vec&, Vec&) const {
    throw InvariantFailure("this operator model has no asymptotic form");
}

SpectralOperator::SpectralOperator(SpectralBasis basis, Nonlinearity f)
    : basis_(std::move(basis)), f_(std::move(f)) {}

void SpectralOperator::apply_N(const Vec& u, Vec& out) const {
    Field uf{&basis_, u};
    Field r = f_.modulated()
                  ? apply_nemitskii(uf, PointScalarMap([this](const std::array<double, 2>& pt,
                                                              double x) { return f_.eval(pt, x); }))
                  : apply_nemitskii(uf, ScalarMap([this](double x) { return f_.eval(x); }));
    out = std::move(r.coef);
}

void SpectralOperator::fprime_on_grid(const Vec& u, Vec& fp_grid) const {
    Vec u_grid;
    basis_.synthesize(u, u_grid);
    fp_grid.resize(u_grid.size());
    if (f_.modulated()) {
        for (std::size_t i = 0; i < u_grid.size(); ++i)
            fp_grid[i] = f_.eval_prime(basis_.grid_point(static_cast<int>(i)), u_grid[i]);
    } else {
        for (std::size_t i = 0; i < u_grid.size(); ++i) fp_grid[i] = f_.eval_prime(u_grid[i]);
    }
    for (double v : fp_grid)
        if (!std::isfinite(v)) throw NonFiniteValue("f' overflowed on the collocation grid");
}

void SpectralOperator::apply_DN(const Vec& u, const Vec& v, Vec& out) const {
    Vec fp_grid;
    fprime_on_grid(u, fp_grid);
    Vec v_grid;
    basis_.synthesize(v, v_grid);
    kernels::vmul(fp_grid.data(), v_grid.data(), v_grid.data(), v_grid.size());
    basis_.analyze(v_grid, out);
}

void SpectralOperator::jacobian_N(const Vec& u, Mat& out) const {
    const int m = basis_.modes();
    Vec fp_grid;
    fprime_on_grid(u, fp_grid);
    out = Mat(m, m);
    Vec e(m, 0.0);
    Vec col_grid;
    Vec col;
    for (int j = 0; j < m; ++j) {
        e[j] = 1.0;
        basis_.synthesize(e, col_grid);
        e[j] = 0.0;
        kernels::vmul(fp_grid.data(), col_grid.data(), col_grid.data(), col_grid.size());
        basis_.analyze(col_grid, col);
        for (int i = 0; i < m; ++i) out(i, j) = col[i];
    }
}

void SpectralOperator::apply_N_asymptotic(const Vec& u, Vec& out) const {
    Field uf{&basis_, u};
    out = asymptotic_nemitskii(f_, uf).coef;
}

std::string SpectralOperator::describe() const {
    std::ostringstream os;
    os << "dirichlet_laplacian_" << basis_.dim() << "d(modes=" << basis_.modes()
       << ", f=" << f_.kind_name() << ")";
    return os.str();
}

Vec ProblemSpec::phi_p() const {
    Vec e(dim(), 0.0);
    e[p] = 1.0;
    return e;
}

Vec ProblemSpec::apply_F(const Vec& u) const {
    Vec out;
    op->apply_N(u, out);
    const Vec& mu = op->spectrum();
    for (int k = 0; k < dim(); ++k) out[k] = mu[k] * u[k] - out[k];
    return out;
}

Vec ProblemSpec::apply_N_shifted(const Vec& u) const {
    Vec out;
    op->apply_N(u, out);
    kernels::axpy(-gamma, u.data(), out.data(), out.size());
    return out;
}

Vec ProblemSpec::apply_F_shifted(const Vec& u) const {
    Vec ns = apply_N_shifted(u);
    const Vec& mu = op->spectrum();
    for (int k = 0; k < dim(); ++k) ns[k] = (mu[k] - gamma) * u[k] - ns[k];
    return ns;
}

Vec ProblemSpec::apply_jacobian(const Vec& u, const Vec& v) const {
    Vec out;
    op->apply_DN(u, v, out);
    const Vec& mu = op->spectrum();
    for (int k = 0; k < dim(); ++k) out[k] = mu[k] * v[k] - out[k];
    return out;
}

Mat ProblemSpec::jacobian_matrix(const Vec& u) const {
    Mat m;
    op->jacobian_N(u, m);
    const int n = dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = -m(i, j);
    const Vec& mu = op->spectrum();
    for (int k = 0; k < n; ++k) m(k, k) += mu[k];
    if (op->symmetric_jacobian()) {
        const double scale = std::max(m.max_abs_entry(), 1e-300);
        if (m.asymmetry() > 1e-8 * scale)
            throw InvariantFailure("jacobian matrix asymmetry beyond roundoff");
        m.symmetrize();
    }
    return m;
}

ProblemSpec make_problem(std::shared_ptr<const OperatorModel> op, int p,
                         std::optional<double> gamma_override,
                         std::optional<double> lipschitz_override, std::optional<Vec> rhs) {
    ProblemSpec ps;
    ps.op = std::move(op);
    const int n = ps.op->dim();
    if (p < 0) p = 0;  // ground state
    if (p >= n) throw ConfigError("distinguished mode index out of range");
    ps.p = p;

    const auto [lo, hi] = ps.op->slope_range();
    ps.gamma = gamma_override.value_or(0.5 * (lo + hi));
    ps.lipschitz_n =
        lipschitz_override.value_or(std::max(hi - ps.gamma, ps.gamma - lo));
    if (ps.lipschitz_n < 0.0) throw ConfigError("negative Lipschitz bound");

    const Vec& mu = ps.op->spectrum();
    ps.lambda_p_shifted = mu[p] - ps.gamma;

    ps.gap_c = std::numeric_limits<double>::infinity();
    std::vector<int> in_window;
    for (int k = 0; k < n; ++k) {
        const double shifted = mu[k] - ps.gamma;
        if (k != p) ps.gap_c = std::min(ps.gap_c, std::fabs(shifted));
        if (std::fabs(shifted) <= ps.lipschitz_n) in_window.push_back(k);
        if (k != p && std::fabs(mu[k] - mu[p]) <= 1e-12 * (1.0 + std::fabs(mu[p]))) {
            std::ostringstream os;
            os << "distinguished eigenvalue mu_p = " << mu[p] << " is not simple (mode " << k
               << " ties)";
            throw MultipleInteraction({p, k}, os.str());
        }
    }
    if (in_window.size() > 1) {
        std::ostringstream os;
        os << "window [-n, n] with n = " << ps.lipschitz_n << " contains " << in_window.size()
           << " shifted eigenvalues";
        throw MultipleInteraction(in_window, os.str());
    }
    if (in_window.size() == 1 && in_window[0] != p) {
        std::ostringstream os;
        os << "window [-n, n] with n = " << ps.lipschitz_n
           << " reaches the non-distinguished eigenvalue mu = " << mu[in_window[0]]
           << " (gap c = " << ps.gap_c << ")";
        throw GapViolated(ps.lipschitz_n, ps.gap_c, os.str());
    }
    if (ps.lipschitz_n >= ps.gap_c) {
        std::ostringstream os;
        os << "Lipschitz bound n = " << ps.lipschitz_n << " is not below the spectral gap c = "
           << ps.gap_c;
        throw GapViolated(ps.lipschitz_n, ps.gap_c, os.str());
    }
    ps.lambda_p_in_window = !in_window.empty();

    if (rhs) {
        if (static_cast<int>(rhs->size()) != n)
            throw ConfigError("right-hand side size does not match the operator dimension");
        ps.rhs = std::move(rhs);
    }
    return ps;
}

}  // namespace fiberfold
