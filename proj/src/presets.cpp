#include "fiberfold/presets.hpp"

#include <cmath>
#include <numbers>

namespace fiberfold {

namespace {

constexpr double kPi = std::numbers::pi;

Preset make_ap2d() {
    Preset preset;
    preset.name = "ap2d";
    SpectralBasis basis(make_box({1.0, 2.0}), {16, 16}, 4);
    const double lambda1 = basis.eigenvalue(0);           // pi^2 (1 + 1/4)
    const double lambda2 = basis.eigenvalue(1);           // 2 pi^2
    Nonlinearity f = Nonlinearity::arctan_gauss(lambda1, (lambda2 - lambda1) / kPi, 10.0,
                                                2.0 / 5.0, 47.12);
    auto op = std::make_shared<SpectralOperator>(basis, f);

    // g(x,y) = -100 x(x-1) y^2 (y-2) - 35 sin(pi x) sin(pi y / 2)
    const SpectralBasis& b = op->basis();
    Vec grid(b.grid_points());
    for (int i = 0; i < b.grid_points(); ++i) {
        const auto [x, y] = b.grid_point(i);
        grid[i] = -100.0 * (x * (x - 1.0) * y * y * (y - 2.0)) -
                  35.0 * std::sin(kPi * x) * std::sin(kPi * y / 2.0);
    }
    Vec g;
    b.analyze(grid, g);

    preset.problem = make_problem(op, -1, std::nullopt, std::nullopt, std::move(g));
    preset.problem.name = "ap2d";
    preset.t_lo = -40.0;
    preset.t_hi = 40.0;
    preset.steps = 201;
    // query the height of g itself: the four-preimage height of this run
    preset.default_height = (*preset.problem.rhs)[preset.problem.p];
    return preset;
}

Preset make_ap_convex_1d() {
    Preset preset;
    preset.name = "ap-convex-1d";
    SpectralBasis basis(make_box({kPi}), {32}, 4);
    Nonlinearity f = Nonlinearity::smooth_convex(0.0, 3.0, 1.0, 0.0);
    auto op = std::make_shared<SpectralOperator>(std::move(basis), f);
    Vec g(op->dim(), 0.0);
    g[0] = -2.0;   // mode 1 component: the height being queried
    g[1] = 0.7;    // mode 2
    g[2] = 0.3;    // mode 3
    preset.problem = make_problem(op, -1, std::nullopt, std::nullopt, std::move(g));
    preset.problem.name = "ap-convex-1d";
    preset.t_lo = -60.0;
    preset.t_hi = 60.0;
    preset.steps = 301;
    preset.default_height = -2.0;
    return preset;
}

Preset make_fucik_1d() {
    Preset preset;
    preset.name = "fucik-1d";
    const int p_mode = 2;
    FucikPair pair = locate_fucik_pair(kPi, p_mode, 4.8);
    SpectralBasis basis(make_box({kPi}), {64}, 4);
    Nonlinearity f = Nonlinearity::piecewise_linear(pair.a, pair.b, 0.0);
    auto op = std::make_shared<SpectralOperator>(std::move(basis), f);
    Vec g(op->dim(), 0.0);  // the collapse fiber runs through z0 = 0
    preset.problem = make_problem(op, p_mode - 1, std::nullopt, std::nullopt, std::move(g));
    preset.problem.name = "fucik-1d";
    preset.t_lo = 0.0;
    preset.t_hi = 100.0;
    preset.steps = 201;
    preset.default_height = 0.0;
    return preset;
}

Preset make_cusp_toy() {
    Preset preset;
    preset.name = "cusp-toy";
    preset.problem = normal_form_toy(ToyKind::Cusp, 6);
    preset.problem.name = "cusp-toy";
    preset.t_lo = -2.0;
    preset.t_hi = 2.0;
    preset.steps = 201;
    preset.default_height = 0.0;
    preset.toy_offsets = {-1.0, -0.5, 0.0, 0.5, 1.0};
    return preset;
}

Preset make_linear_1d() {
    Preset preset;
    preset.name = "linear1d";
    SpectralBasis basis(make_box({kPi}), {16}, 4);
    Nonlinearity f = Nonlinearity::piecewise_linear(0.0, 0.0, 0.0);
    auto op = std::make_shared<SpectralOperator>(std::move(basis), f);
    Vec g(op->dim(), 0.0);
    g[0] = 1.0;
    g[1] = 0.5;
    g[2] = 0.25;
    preset.problem = make_problem(op, -1, std::nullopt, std::nullopt, std::move(g));
    preset.problem.name = "linear1d";
    preset.t_lo = -10.0;
    preset.t_hi = 10.0;
    preset.steps = 101;
    preset.default_height = 1.0;
    return preset;
}

}  // namespace

Preset make_preset(const std::string& name) {
    if (name == "ap2d") return make_ap2d();
    if (name == "ap-convex-1d") return make_ap_convex_1d();
    if (name == "fucik-1d") return make_fucik_1d();
    if (name == "cusp-toy") return make_cusp_toy();
    if (name == "linear1d") return make_linear_1d();
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"ap2d", "ap-convex-1d", "fucik-1d", "cusp-toy", "linear1d"};
}

}  // namespace fiberfold
