#pragma once

// Operator setup F = L - N in eigencoordinates of L, the gamma-shift, the
// H/V splitting at the distinguished mode p, and validation of the spectral
// interaction window [-n, n].
//
// Every concrete model (spectral Galerkin operators, finite matrix models,
// adapted-coordinate toys) presents the same surface: a diagonal linear part
// and a nonlinearity with a Jacobian, all in the coordinates of an orthonormal
// eigenbasis. The solver stack above never needs to know which one it drives.

#include "fiberfold/linalg.hpp"
#include "fiberfold/nonlinearity.hpp"
#include "fiberfold/spectral.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace fiberfold {

class OperatorModel {
public:
    virtual ~OperatorModel() = default;

    virtual int dim() const = 0;
    // diagonal of L, ascending
    virtual const Vec& spectrum() const = 0;
    virtual void apply_N(const Vec& u, Vec& out) const = 0;
    // dN/du as a dense matrix
    virtual void jacobian_N(const Vec& u, Mat& out) const = 0;
    // directional derivative DN(u)v; default builds the matrix
    virtual void apply_DN(const Vec& u, const Vec& v, Vec& out) const;
    // range of the spectrum of DN over all u (slope range for Nemitskii maps)
    virtual std::pair<double, double> slope_range() const = 0;
    virtual bool symmetric_jacobian() const { return true; }

    virtual bool has_asymptotic_form() const { return false; }
    // N_inf(u) = lim N(tu)/t
    virtual void apply_N_asymptotic(const Vec& u, Vec& out) const;

    virtual const SpectralBasis* spectral_basis() const { return nullptr; }
    virtual const Nonlinearity* scalar_nonlinearity() const { return nullptr; }
    virtual std::string describe() const = 0;
};

// F(u) = -Laplace u - f(u) discretized in the Dirichlet sine basis.
class SpectralOperator : public OperatorModel {
public:
    SpectralOperator(SpectralBasis basis, Nonlinearity f);

    int dim() const override { return basis_.modes(); }
    const Vec& spectrum() const override { return basis_.eigenvalues(); }
    void apply_N(const Vec& u, Vec& out) const override;
    void jacobian_N(const Vec& u, Mat& out) const override;
    void apply_DN(const Vec& u, const Vec& v, Vec& out) const override;
    std::pair<double, double> slope_range() const override {
        return {f_.slope_inf(), f_.slope_sup()};
    }
    bool has_asymptotic_form() const override { return true; }
    void apply_N_asymptotic(const Vec& u, Vec& out) const override;
    const SpectralBasis* spectral_basis() const override { return &basis_; }
    const Nonlinearity* scalar_nonlinearity() const override { return &f_; }
    std::string describe() const override;

    const SpectralBasis& basis() const { return basis_; }
    const Nonlinearity& f() const { return f_; }

private:
    SpectralBasis basis_;
    Nonlinearity f_;

    void fprime_on_grid(const Vec& u, Vec& fp_grid) const;
};

struct ProblemSpec {
    std::shared_ptr<const OperatorModel> op;
    int p = 0;
    double gamma = 0.0;
    double lambda_p_shifted = 0.0;  // mu_p - gamma
    double lipschitz_n = 0.0;       // Lipschitz bound for the shifted projected nonlinearity
    double gap_c = 0.0;             // min_{k != p} |mu_k - gamma|
    bool lambda_p_in_window = false;  // true: fold regime; false: full-gap regime
    std::optional<Vec> rhs;
    std::string name;

    int dim() const { return op->dim(); }
    double mu(int k) const { return op->spectrum()[k]; }
    double contraction_ratio() const { return gap_c > 0.0 ? lipschitz_n / gap_c : 1.0; }

    Vec phi_p() const;
    void project_H(Vec& v) const { v[p] = 0.0; }

    Vec apply_F(const Vec& u) const;          // diag(mu) u - N(u)
    Vec apply_F_shifted(const Vec& u) const;  // (L-gamma)u - (N(u)-gamma u)
    Vec apply_N_shifted(const Vec& u) const;  // N(u) - gamma u
    Vec apply_jacobian(const Vec& u, const Vec& v) const;
    Mat jacobian_matrix(const Vec& u) const;  // symmetrized when the model is symmetric
};

// Validates hypothesis on the interaction window and assembles all gap data.
// p < 0 selects the ground state (index 0). Throws MultipleInteraction when
// more than one shifted eigenvalue lies in [-n, n] (or mu_p is degenerate),
// GapViolated when the window reaches a non-distinguished eigenvalue.
ProblemSpec make_problem(std::shared_ptr<const OperatorModel> op, int p = -1,
                         std::optional<double> gamma_override = std::nullopt,
                         std::optional<double> lipschitz_override = std::nullopt,
                         std::optional<Vec> rhs = std::nullopt);

}  // namespace fiberfold
