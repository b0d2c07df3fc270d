// fiberfold: fiber-based solver suite for semilinear operator equations
// F(u) = Lu - N(u) = g on boxes, with preimage counting, singularity
// classification, and asymptotic checks.
//
// Exit codes: 0 ok, 2 config error, 3 spectral-gap violation,
// 4 non-convergence, 5 invariant failure.

#include "fiberfold/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace ff = fiberfold;

namespace {

struct CommonArgs {
    std::string preset;
    std::string problem_file;
    std::string out_dir = "out";
    std::string kernels = "auto";
    int threads = 1;
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--preset", args.preset, "shipped preset name")
        ->check(CLI::IsMember(ff::preset_names()));
    cmd->add_option("--problem", args.problem_file, "problem JSON file");
    cmd->add_option("--out", args.out_dir, "output directory (default: out)");
    cmd->add_option("--kernels", args.kernels, "kernel backend: auto|scalar|avx2|neon");
    cmd->add_option("--threads", args.threads, "upper bound on worker threads");
    cmd->add_flag("--svg", args.svg, "emit SVG plots");
}

ff::Preset resolve_problem(const CommonArgs& args) {
    if (!args.kernels.empty() && !ff::kernels::select_backend(args.kernels))
        throw ff::ConfigError("kernel backend '" + args.kernels + "' is unavailable here");
    if (!args.preset.empty() && !args.problem_file.empty())
        throw ff::ConfigError("give either --preset or --problem, not both");
    if (!args.preset.empty()) return ff::make_preset(args.preset);
    if (!args.problem_file.empty()) return ff::load_problem_file(args.problem_file);
    throw ff::ConfigError("one of --preset or --problem is required");
}

ff::Json common_config(const CommonArgs& args, const std::string& command) {
    ff::Json j;
    j["command"] = command;
    j["preset"] = args.preset;
    j["problem_file"] = args.problem_file;
    j["threads"] = args.threads;
    j["svg"] = args.svg;
    return j;
}

ff::Json tolerance_json(const ff::AnalysisOptions& opts) {
    ff::Json j;
    j["tol_residual"] = opts.fiber.solve.tol_residual;
    j["max_iters"] = opts.fiber.solve.max_iters;
    j["height_consistency_tol"] = opts.fiber.height_consistency_tol;
    j["root_xtol"] = opts.root_xtol;
    j["height_tol"] = opts.height_tol;
    j["separation"] = opts.separation;
    j["zero_band"] = opts.zero_band;
    j["rank_tol"] = opts.rank_tol;
    j["gap_tol"] = opts.gap_tol;
    return j;
}

void write_failed_marker(const std::string& out_dir, const std::string& command,
                         const ff::Error& e) {
    try {
        ff::Json j;
        j["failed"] = true;
        j["command"] = command;
        j["error_kind"] = e.kind();
        j["message"] = e.what();
        j["exit_code"] = e.exit_code();
        ff::atomic_write(out_dir + "/" + command + ".failed.json", ff::dump_json(j));
    } catch (...) {
        // marker writing is best effort
    }
}

int cmd_eigs(const CommonArgs& args) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    ff::Json config = common_config(args, "eigs");
    ff::Json rep = ff::report_header(ps, config, ff::Json::object());
    ff::Json eigs = ff::Json::array();
    for (int k = 0; k < ps.dim(); ++k) eigs.push_back(ps.mu(k));
    rep["eigenvalues"] = eigs;
    rep["hypothesis_window_ok"] = true;  // construction would have thrown otherwise
    ff::atomic_write(args.out_dir + "/eigs.json", ff::dump_json(rep));

    std::printf("problem: %s\n", ps.op->describe().c_str());
    const int show = std::min(8, ps.dim());
    for (int k = 0; k < show; ++k) std::printf("  lambda_%d = %.6f\n", k + 1, ps.mu(k));
    std::printf("gamma = %.6f, n = %.6f, c = %.6f, n/c = %.4f\n", ps.gamma, ps.lipschitz_n,
                ps.gap_c, ps.contraction_ratio());
    std::printf("interaction window: %s (lambda_p %s the window)\n", "ok",
                ps.lambda_p_in_window ? "inside" : "outside");
    return 0;
}

int cmd_fiber(const CommonArgs& args, double t_lo, double t_hi, int steps) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    if (t_lo == 0.0 && t_hi == 0.0) {
        t_lo = preset.t_lo;
        t_hi = preset.t_hi;
    }
    if (steps <= 0) steps = preset.steps;
    ff::Vec z0 = ps.rhs ? *ps.rhs : ff::Vec(ps.dim(), 0.0);
    ps.project_H(z0);

    ff::AnalysisOptions opts;
    ff::FiberTrace trace = ff::trace_fiber(ps, z0, t_lo, t_hi, steps, opts.fiber);

    ff::Json config = common_config(args, "fiber");
    config["t_min"] = t_lo;
    config["t_max"] = t_hi;
    config["steps"] = steps;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));
    rep["trace"] = ff::trace_json(trace);
    ff::atomic_write(args.out_dir + "/fiber.json", ff::dump_json(rep));
    ff::atomic_write(args.out_dir + "/fiber.csv", ff::trace_csv(trace));
    if (args.svg)
        ff::atomic_write(args.out_dir + "/fiber.svg", ff::svg_height_profile(trace, {}, 0.0));
    std::printf("traced %d points on t in [%g, %g]; worst residual %.3e; max |dw/dt| %.3f\n",
                steps, t_lo, t_hi, trace.worst_residual, trace.max_slope_Y);
    return 0;
}

int cmd_preimages(const CommonArgs& args, double height, bool height_set, double t_lo, double t_hi,
                  int steps) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    if (!ps.rhs) throw ff::ConfigError("preimages needs a problem with a right-hand side");
    if (t_lo == 0.0 && t_hi == 0.0) {
        t_lo = preset.t_lo;
        t_hi = preset.t_hi;
    }
    const double s = height_set ? height : preset.default_height;

    ff::AnalysisOptions opts;
    if (steps > 0) opts.trace_steps = steps;
    ff::Vec g = *ps.rhs;
    g[ps.p] = s;  // query the vertical line through g at the requested height

    ff::PreimageSet set = ff::find_preimages(ps, g, t_lo, t_hi, opts);

    ff::Json config = common_config(args, "preimages");
    config["height"] = s;
    config["t_min"] = t_lo;
    config["t_max"] = t_hi;
    config["steps"] = opts.trace_steps;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));
    rep["preimages"] = ff::preimages_json(ps, set);
    ff::atomic_write(args.out_dir + "/preimages.json", ff::dump_json(rep));

    if (const ff::SpectralBasis* basis = ps.op->spectral_basis()) {
        int idx = 1;
        for (const ff::Preimage& pre : set.solutions) {
            ff::Vec grid;
            basis->synthesize(pre.u, grid);
            ff::atomic_write(args.out_dir + "/solution_" + std::to_string(idx++) + ".csv",
                             ff::grid_csv(*basis, grid));
        }
    }
    if (args.svg) {
        ff::FiberTrace trace = ff::trace_fiber(ps, [&] {
            ff::Vec z0 = g;
            ps.project_H(z0);
            return z0;
        }(), t_lo, t_hi, opts.trace_steps, opts.fiber);
        std::vector<double> ts;
        for (const ff::Preimage& pre : set.solutions) ts.push_back(pre.t);
        ff::atomic_write(args.out_dir + "/preimages.svg", ff::svg_height_profile(trace, ts, s));
        if (const ff::SpectralBasis* basis = ps.op->spectral_basis()) {
            int idx = 1;
            for (const ff::Preimage& pre : set.solutions)
                ff::atomic_write(args.out_dir + "/solution_" + std::to_string(idx++) + ".svg",
                                 ff::svg_solution(*basis, pre.u));
        }
    }
    std::printf("height %.6g reached by %d preimage(s)\n", s,
                static_cast<int>(set.solutions.size()));
    for (const ff::Preimage& pre : set.solutions)
        std::printf("  t = %+.8f   residual = %.3e\n", pre.t, pre.residual);
    if (set.window_too_small)
        std::printf("warning: height has not turned down at a window end (WindowTooSmall)\n");
    return 0;
}

int cmd_classify(const CommonArgs& args, double t_lo, double t_hi, int steps) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    if (t_lo == 0.0 && t_hi == 0.0) {
        t_lo = preset.t_lo;
        t_hi = preset.t_hi;
    }
    ff::AnalysisOptions opts;
    if (steps > 0) opts.trace_steps = steps;
    ff::Vec z0 = ps.rhs ? *ps.rhs : ff::Vec(ps.dim(), 0.0);
    ps.project_H(z0);

    ff::FiberTrace trace = ff::trace_fiber(ps, z0, t_lo, t_hi, opts.trace_steps, opts.fiber);
    std::vector<ff::CriticalPoint> cps = ff::critical_points(ps, trace, opts);
    for (ff::CriticalPoint& cp : cps) cp = ff::classify_morin(ps, trace, cp, opts);
    ff::SpectralLinkReport link = ff::verify_spectral_link(ps, trace, opts);

    ff::Json config = common_config(args, "classify");
    config["t_min"] = t_lo;
    config["t_max"] = t_hi;
    config["steps"] = opts.trace_steps;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));
    rep["critical_points"] = ff::critical_points_json(cps);
    rep["spectral_link"] = ff::spectral_link_json(link);
    ff::atomic_write(args.out_dir + "/classify.json", ff::dump_json(rep));
    ff::atomic_write(args.out_dir + "/eigen_track.csv", ff::link_csv(link));

    std::printf("%d critical point(s)\n", static_cast<int>(cps.size()));
    for (const ff::CriticalPoint& cp : cps)
        std::printf("  t* = %+.8f   %s (order %d)%s   lambda_p = %+.3e\n", cp.t_star,
                    cp.kind_tag.c_str(), cp.morin_order,
                    cp.transversality_ok ? " transversal" : "", cp.lambda_p);
    std::printf("spectral link: signs %s over %d checked samples\n",
                link.signs_consistent ? "consistent" : "INCONSISTENT", link.checked_samples);
    return link.signs_consistent ? 0 : 5;
}

int cmd_sweep(const CommonArgs& args, double s_min, double s_max, int s_count, double t_lo,
              double t_hi) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    if (t_lo == 0.0 && t_hi == 0.0) {
        t_lo = preset.t_lo;
        t_hi = preset.t_hi;
    }
    ff::AnalysisOptions opts;
    opts.trace_steps = preset.steps;
    ff::Vec z0 = ps.rhs ? *ps.rhs : ff::Vec(ps.dim(), 0.0);
    ps.project_H(z0);

    std::vector<double> s_values;
    for (int i = 0; i < s_count; ++i)
        s_values.push_back(s_min + (s_max - s_min) * i / std::max(1, s_count - 1));
    ff::SweepResult sweep = ff::count_sweep(ps, z0, s_values, t_lo, t_hi, opts);

    ff::Json config = common_config(args, "sweep");
    config["s_min"] = s_min;
    config["s_max"] = s_max;
    config["s_count"] = s_count;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));
    rep["sweep"] = ff::sweep_json(sweep);
    ff::atomic_write(args.out_dir + "/sweep.json", ff::dump_json(rep));
    ff::atomic_write(args.out_dir + "/sweep.csv", ff::sweep_csv(sweep));

    std::printf("fold boundary estimate s* = %.6g\n", sweep.fold_boundary);
    for (std::size_t i = 0; i < s_values.size(); ++i)
        std::printf("  s = %+.6g -> %d preimage(s)\n", s_values[i], sweep.counts[i]);
    return 0;
}

int cmd_asymptotics(const CommonArgs& args, double epsilon, double T) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    ff::AnalysisOptions opts;
    ff::Vec z0 = ps.rhs ? *ps.rhs : ff::Vec(ps.dim(), 0.0);
    ps.project_H(z0);

    if (T <= 0.0) T = 50.0 * (1.0 + ff::norm2(z0));
    if (epsilon <= 0.0) {
        const auto [lo, hi] = ps.op->slope_range();
        const double room = std::min(ps.mu(ps.p) - lo, hi - ps.mu(ps.p));
        epsilon = room > 0.0 ? 0.1 * room : 0.1;
    }

    ff::Json config = common_config(args, "asymptotics");
    config["epsilon"] = epsilon;
    config["T"] = T;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));

    if (preset.name == "fucik-1d") {
        ff::FucikReport fucik = ff::fucik_check(ps, preset.t_hi, 0.02, opts);
        rep["fucik"] = ff::fucik_json(fucik);
        std::printf("fucik half-fiber collapse: %s (max |h|/(1+t) = %.3e)\n",
                    fucik.collapse_verified ? "verified" : "NOT verified",
                    fucik.max_height_scaled);
    } else {
        ff::FiberTrace trace =
            ff::trace_fiber(ps, z0, -2.5 * T, 2.5 * T, opts.trace_steps, opts.fiber);
        ff::VReport v = ff::check_V(ps, trace, epsilon, T);
        rep["V"] = ff::v_report_json(v);
        ff::atomic_write(args.out_dir + "/height_over_t.csv", ff::height_ratio_csv(trace));
        std::printf("(V+): %s (largest eps %.4f), (V-): %s (largest eps %.4f)\n",
                    v.v_plus_ok ? "ok" : "fails", v.eps_plus_max, v.v_minus_ok ? "ok" : "fails",
                    v.eps_minus_max);
        if (ps.op->has_asymptotic_form()) {
            ff::AsymptoticDirections dirs = ff::asymptotic_directions(ps);
            rep["directions"] = ff::asymptotic_directions_json(dirs);
            ff::SlopeLimitReport slope = ff::slope_limit_compare(ps, trace, T, opts);
            rep["slope_limit"] = ff::slope_limit_json(slope);
            if (ff::norm2(dirs.w_plus) <= 1e-8)
                rep["verticality"] = ff::verticality_json(ff::fit_verticality(ps, z0, T, true, opts));
            std::printf("asymptotic directions: ||w+|| = %.3e, ||w-|| = %.3e\n",
                        ff::norm2(dirs.w_plus), ff::norm2(dirs.w_minus));
            std::printf("slope-limit hypotheses %s; conclusion %s\n",
                        slope.hypotheses_hold ? "hold" : "fail",
                        slope.conclusion_holds ? "holds" : "fails");
        }
    }
    ff::atomic_write(args.out_dir + "/asymptotics.json", ff::dump_json(rep));
    return 0;
}

int cmd_oracle(const CommonArgs& args, int starts, unsigned seed, double height, bool height_set,
               double t_lo, double t_hi) {
    ff::Preset preset = resolve_problem(args);
    const ff::ProblemSpec& ps = preset.problem;
    if (!ps.rhs) throw ff::ConfigError("oracle needs a problem with a right-hand side");
    if (t_lo == 0.0 && t_hi == 0.0) {
        t_lo = preset.t_lo;
        t_hi = preset.t_hi;
    }
    const double s = height_set ? height : preset.default_height;
    ff::AnalysisOptions opts;
    opts.trace_steps = preset.steps;
    ff::Vec g = *ps.rhs;
    g[ps.p] = s;

    ff::PreimageSet fiber_set = ff::find_preimages(ps, g, t_lo, t_hi, opts);
    ff::NewtonOptions newton_opts;
    newton_opts.threads = std::max(1, args.threads);
    ff::MultistartResult newton =
        ff::newton_multistart(ps, g, starts, seed, t_lo, t_hi, newton_opts);

    bool match = fiber_set.solutions.size() == newton.preimages.solutions.size();
    double worst = 0.0;
    if (match)
        for (std::size_t i = 0; i < fiber_set.solutions.size(); ++i)
            worst = std::max(worst, ff::dist2(fiber_set.solutions[i].u,
                                              newton.preimages.solutions[i].u));
    match = match && worst <= 1e-6;

    ff::Json config = common_config(args, "oracle");
    config["starts"] = starts;
    config["seed"] = seed;
    config["height"] = s;
    ff::Json rep = ff::report_header(ps, config, tolerance_json(opts));
    rep["fiber_method"] = ff::preimages_json(ps, fiber_set);
    rep["newton_multistart"] = ff::multistart_json(newton);
    rep["match"] = match;
    rep["worst_distance"] = worst;
    ff::atomic_write(args.out_dir + "/oracle.json", ff::dump_json(rep));

    std::printf("%s: %d = %d (worst Y-distance %.3e)\n", match ? "MATCH" : "MISMATCH",
                static_cast<int>(fiber_set.solutions.size()),
                static_cast<int>(newton.preimages.solutions.size()), worst);
    return match ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fiber-based solver suite for semilinear operator equations F(u) = Lu - N(u) = g"};
    app.require_subcommand(1);

    CommonArgs args;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int steps = 0;
    double height = 0.0;
    bool height_set = false;
    double s_min = -1.0;
    double s_max = 1.0;
    int s_count = 50;
    double epsilon = 0.0;
    double T = 0.0;
    int starts = 200;
    unsigned seed = 7;

    CLI::App* eigs = app.add_subcommand("eigs", "basis eigenvalues and gap data");
    add_common(eigs, args);

    CLI::App* fiber = app.add_subcommand("fiber", "trace one fiber and its height profile");
    add_common(fiber, args);
    fiber->add_option("--t-min", t_lo);
    fiber->add_option("--t-max", t_hi);
    fiber->add_option("--steps", steps);

    CLI::App* preimages = app.add_subcommand("preimages", "all preimages at a height");
    add_common(preimages, args);
    preimages->add_option("--height", height)->each([&](const std::string&) { height_set = true; });
    preimages->add_option("--t-min", t_lo);
    preimages->add_option("--t-max", t_hi);
    preimages->add_option("--steps", steps);

    CLI::App* classify = app.add_subcommand("classify", "critical points and Morin orders");
    add_common(classify, args);
    classify->add_option("--t-min", t_lo);
    classify->add_option("--t-max", t_hi);
    classify->add_option("--steps", steps);

    CLI::App* sweep = app.add_subcommand("sweep", "preimage counts over a height sweep");
    add_common(sweep, args);
    sweep->add_option("--s-min", s_min);
    sweep->add_option("--s-max", s_max);
    sweep->add_option("--s-count", s_count);
    sweep->add_option("--t-min", t_lo);
    sweep->add_option("--t-max", t_hi);

    CLI::App* asym = app.add_subcommand("asymptotics", "turn-down checks and fiber directions");
    add_common(asym, args);
    asym->add_option("--epsilon", epsilon);
    asym->add_option("--T", T);

    CLI::App* oracle = app.add_subcommand("oracle", "fiber method vs Newton multistart");
    add_common(oracle, args);
    oracle->add_option("--starts", starts);
    oracle->add_option("--seed", seed);
    oracle->add_option("--height", height)->each([&](const std::string&) { height_set = true; });
    oracle->add_option("--t-min", t_lo);
    oracle->add_option("--t-max", t_hi);

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (eigs->parsed()) return cmd_eigs(args);
        if (fiber->parsed()) return cmd_fiber(args, t_lo, t_hi, steps);
        if (preimages->parsed())
            return cmd_preimages(args, height, height_set, t_lo, t_hi, steps);
        if (classify->parsed()) return cmd_classify(args, t_lo, t_hi, steps);
        if (sweep->parsed()) return cmd_sweep(args, s_min, s_max, s_count, t_lo, t_hi);
        if (asym->parsed()) return cmd_asymptotics(args, epsilon, T);
        if (oracle->parsed())
            return cmd_oracle(args, starts, seed, height, height_set, t_lo, t_hi);
    } catch (const ff::Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        write_failed_marker(args.out_dir, command, e);
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
