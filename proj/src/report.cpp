#include "fiberfold/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fiberfold {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            // std::map keeps keys sorted, so iteration order is deterministic
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                out += Json(it.key()).dump();
                out += ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(v, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

Json vec_json(const Vec& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f.good()) throw ConfigError("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const Json& config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(dump_json(config, 0)));
    return buf;
}

Json basis_json(const SpectralBasis& basis) {
    Json j;
    j["lengths"] = vec_json(basis.domain().lengths);
    Json mc = Json::array();
    for (int ax = 0; ax < basis.dim(); ++ax) mc.push_back(basis.mode_count(ax));
    j["mode_counts"] = mc;
    j["grid_factor"] = basis.grid_factor();
    j["eigenvalues"] = vec_json(basis.eigenvalues());
    return j;
}

Json problem_json(const ProblemSpec& ps) {
    Json j;
    j["operator"] = ps.op->describe();
    j["name"] = ps.name;
    j["dim"] = ps.dim();
    j["p"] = ps.p;
    j["gamma"] = ps.gamma;
    j["lambda_p_shifted"] = ps.lambda_p_shifted;
    j["lipschitz_n"] = ps.lipschitz_n;
    j["gap_c"] = ps.gap_c;
    j["contraction_ratio"] = ps.contraction_ratio();
    j["fold_regime"] = ps.lambda_p_in_window;
    if (const SpectralBasis* b = ps.op->spectral_basis()) j["basis"] = basis_json(*b);
    if (const Nonlinearity* f = ps.op->scalar_nonlinearity()) {
        Json fj;
        fj["kind"] = f->kind_name();
        fj["parameters"] = vec_json(f->parameters());
        fj["slope_inf"] = f->slope_inf();
        fj["slope_sup"] = f->slope_sup();
        fj["asymptotic_slopes"] = {f->asymptotic_slope_minus(), f->asymptotic_slope_plus()};
        fj["value_at_0"] = f->value_at_0();
        j["nonlinearity"] = fj;
    }
    return j;
}

Json report_header(const ProblemSpec& ps, const Json& config, const Json& tolerances) {
    Json j;
    j["config_hash"] = config_hash(config);
    j["config"] = config;
    j["problem"] = problem_json(ps);
    j["tolerances"] = tolerances;
    return j;
}

Json solve_report_json(const SolveReport& rep) {
    Json j;
    j["iterations"] = rep.iterations;
    j["final_residual"] = rep.final_residual;
    j["observed_rate"] = rep.observed_rate;
    j["max_ratio"] = rep.max_ratio;
    return j;
}

Json trace_json(const FiberTrace& trace) {
    Json j;
    j["z0"] = vec_json(trace.z0);
    j["steepness_bound"] = trace.steepness_bound;
    j["max_slope_Y"] = trace.max_slope_Y;
    j["max_slope_X"] = trace.max_slope_X;
    j["solver_iterations"] = trace.solver_iterations;
    j["worst_residual"] = trace.worst_residual;
    Json pts = Json::array();
    for (const FiberPoint& pt : trace.points) {
        Json pj;
        pj["t"] = pt.t;
        pj["height"] = pt.height;
        pj["residual"] = pt.residual;
        pj["norm_w"] = norm2(pt.w);
        pts.push_back(pj);
    }
    j["points"] = pts;
    return j;
}

Json preimages_json(const ProblemSpec& ps, const PreimageSet& set) {
    (void)ps;
    Json j;
    j["s"] = set.s;
    j["count"] = static_cast<int>(set.solutions.size());
    j["window_too_small"] = set.window_too_small;
    Json sols = Json::array();
    for (const Preimage& pre : set.solutions) {
        Json sj;
        sj["t"] = pre.t;
        sj["residual"] = pre.residual;
        sj["u"] = vec_json(pre.u);
        sols.push_back(sj);
    }
    j["solutions"] = sols;
    return j;
}

Json critical_points_json(const std::vector<CriticalPoint>& cps) {
    Json arr = Json::array();
    for (const CriticalPoint& cp : cps) {
        Json j;
        j["t_star"] = cp.t_star;
        j["morin_order"] = cp.morin_order;
        j["kind"] = cp.kind_tag;
        j["lambda_p"] = cp.lambda_p;
        j["eig_gap"] = cp.eig_gap;
        j["dt_h"] = {cp.dt_h[0], cp.dt_h[1], cp.dt_h[2], cp.dt_h[3]};
        j["transversality_ok"] = cp.transversality_ok;
        j["is_local_max"] = cp.is_local_max;
        j["low_confidence"] = cp.low_confidence;
        arr.push_back(j);
    }
    return arr;
}

Json spectral_link_json(const SpectralLinkReport& rep) {
    Json j;
    j["signs_consistent"] = rep.signs_consistent;
    j["checked_samples"] = rep.checked_samples;
    j["critical_ts"] = vec_json(rep.critical_ts);
    j["collapse_ts"] = vec_json(rep.collapse_ts);
    j["p_ratio_min"] = rep.p_ratio_min;
    j["p_ratio_max"] = rep.p_ratio_max;
    return j;
}

Json sweep_json(const SweepResult& rep) {
    Json j;
    j["s_values"] = vec_json(rep.s_values);
    j["counts"] = rep.counts;
    j["fold_boundary"] = rep.fold_boundary;
    j["window_too_small"] = rep.window_too_small;
    return j;
}

Json v_report_json(const VReport& rep) {
    Json j;
    j["v_plus_ok"] = rep.v_plus_ok;
    j["v_minus_ok"] = rep.v_minus_ok;
    j["eps_requested"] = rep.eps_requested;
    j["T"] = rep.T;
    j["eps_plus_max"] = rep.eps_plus_max;
    j["eps_minus_max"] = rep.eps_minus_max;
    j["c_plus"] = rep.c_plus;
    j["c_minus"] = rep.c_minus;
    return j;
}

Json asymptotic_directions_json(const AsymptoticDirections& dirs) {
    Json j;
    j["w_plus_norm"] = norm2(dirs.w_plus);
    j["w_minus_norm"] = norm2(dirs.w_minus);
    j["residual_plus"] = dirs.residual_plus;
    j["residual_minus"] = dirs.residual_minus;
    j["n_infinity_pairing"] = dirs.n_infinity_pairing;
    j["w_plus"] = vec_json(dirs.w_plus);
    j["w_minus"] = vec_json(dirs.w_minus);
    return j;
}

Json slope_limit_json(const SlopeLimitReport& rep) {
    Json j;
    j["eps"] = rep.eps;
    j["inv_norm"] = rep.inv_norm;
    j["q"] = rep.q;
    j["hyp_positivity"] = rep.hyp_positivity;
    j["hyp_small_linear"] = rep.hyp_small_linear;
    j["hyp_small_quadratic"] = rep.hyp_small_quadratic;
    j["hypotheses_hold"] = rep.hypotheses_hold;
    j["limit_estimate"] = rep.limit_estimate;
    j["conclusion_holds"] = rep.conclusion_holds;
    j["T"] = rep.T;
    return j;
}

Json fucik_json(const FucikReport& rep) {
    Json j;
    j["collapse_verified"] = rep.collapse_verified;
    j["max_height_scaled"] = rep.max_height_scaled;
    j["max_residual_scaled"] = rep.max_residual_scaled;
    j["T"] = rep.T;
    j["tol"] = rep.tol;
    return j;
}

Json multistart_json(const MultistartResult& rep) {
    Json j;
    j["count"] = static_cast<int>(rep.preimages.solutions.size());
    j["converged_starts"] = rep.converged_starts;
    j["dropped_starts"] = rep.dropped_starts;
    Json sols = Json::array();
    for (const Preimage& pre : rep.preimages.solutions) {
        Json sj;
        sj["t"] = pre.t;
        sj["residual"] = pre.residual;
        sols.push_back(sj);
    }
    j["solutions"] = sols;
    return j;
}

Json verticality_json(const VerticalityFit& fit) {
    Json j;
    j["alpha"] = fit.alpha;
    j["c"] = fit.c;
    Json samples = Json::array();
    for (auto [t, r] : fit.samples) samples.push_back({{"t", t}, {"ratio", r}});
    j["samples"] = samples;
    return j;
}

std::string trace_csv(const FiberTrace& trace) {
    std::string out = "t,height,residual,norm_w\r\n";
    for (const FiberPoint& pt : trace.points) {
        out += format_double(pt.t) + "," + format_double(pt.height) + "," +
               format_double(pt.residual) + "," + format_double(norm2(pt.w)) + "\r\n";
    }
    return out;
}

std::string height_ratio_csv(const FiberTrace& trace) {
    std::string out = "t,height,height_over_t\r\n";
    for (const FiberPoint& pt : trace.points) {
        const double ratio = pt.t != 0.0 ? pt.height / pt.t : 0.0;
        out += format_double(pt.t) + "," + format_double(pt.height) + "," + format_double(ratio) +
               "\r\n";
    }
    return out;
}

std::string grid_csv(const SpectralBasis& basis, const Vec& g) {
    std::string out = basis.dim() == 1 ? "x,value\r\n" : "x,y,value\r\n";
    for (int i = 0; i < basis.grid_points(); ++i) {
        const auto [x, y] = basis.grid_point(i);
        out += format_double(x);
        if (basis.dim() == 2) out += "," + format_double(y);
        out += "," + format_double(g[i]) + "\r\n";
    }
    return out;
}

std::string sweep_csv(const SweepResult& rep) {
    std::string out = "s,count\r\n";
    for (std::size_t i = 0; i < rep.s_values.size(); ++i)
        out += format_double(rep.s_values[i]) + "," + std::to_string(rep.counts[i]) + "\r\n";
    return out;
}

std::string link_csv(const SpectralLinkReport& rep) {
    std::string out = "t,lambda_p,dt_height,gap\r\n";
    for (const LinkSample& s : rep.samples)
        out += format_double(s.t) + "," + format_double(s.lambda_p) + "," +
               format_double(s.dt_height) + "," + format_double(s.gap) + "\r\n";
    return out;
}

namespace {

struct PlotBox {
    double x0, x1, y0, y1;
    double width = 720.0;
    double height = 440.0;
    double margin = 50.0;

    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double py(double y) const {
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }
};

std::string svg_open(double w, double h) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
       << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

void axes(std::ostringstream& os, const PlotBox& box, const std::string& xlabel,
          const std::string& ylabel) {
    os << "<line x1=\"" << box.margin << "\" y1=\"" << box.height - box.margin << "\" x2=\""
       << box.width - box.margin << "\" y2=\"" << box.height - box.margin
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << box.margin << "\" y1=\"" << box.margin << "\" x2=\"" << box.margin
       << "\" y2=\"" << box.height - box.margin << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << box.width / 2 << "\" y=\"" << box.height - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << box.height / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
       << "transform=\"rotate(-90 16 " << box.height / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

std::string svg_height_profile(const FiberTrace& trace, const std::vector<double>& marked_ts,
                               double marked_height) {
    PlotBox box{};
    box.x0 = trace.points.front().t;
    box.x1 = trace.points.back().t;
    box.y0 = box.y1 = trace.points.front().height;
    for (const FiberPoint& pt : trace.points) {
        box.y0 = std::min(box.y0, pt.height);
        box.y1 = std::max(box.y1, pt.height);
    }
    if (box.y1 == box.y0) {
        box.y0 -= 1.0;
        box.y1 += 1.0;
    }
    const double pad = 0.05 * (box.y1 - box.y0);
    box.y0 -= pad;
    box.y1 += pad;

    std::ostringstream os;
    os << svg_open(box.width, box.height);
    axes(os, box, "t", "height");
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const FiberPoint& pt : trace.points) os << box.px(pt.t) << "," << box.py(pt.height) << " ";
    os << "\"/>\n";
    if (!marked_ts.empty()) {
        os << "<line x1=\"" << box.margin << "\" y1=\"" << box.py(marked_height) << "\" x2=\""
           << box.width - box.margin << "\" y2=\"" << box.py(marked_height)
           << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
        for (double t : marked_ts)
            os << "<circle cx=\"" << box.px(t) << "\" cy=\"" << box.py(marked_height)
               << "\" r=\"4\" fill=\"#d62728\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_solution(const SpectralBasis& basis, const Vec& coef) {
    Vec grid;
    basis.synthesize(coef, grid);
    if (basis.dim() == 1) {
        PlotBox box{};
        box.x0 = 0.0;
        box.x1 = basis.domain().lengths[0];
        box.y0 = box.y1 = grid[0];
        for (double v : grid) {
            box.y0 = std::min(box.y0, v);
            box.y1 = std::max(box.y1, v);
        }
        if (box.y1 == box.y0) {
            box.y0 -= 1.0;
            box.y1 += 1.0;
        }
        std::ostringstream os;
        os << svg_open(box.width, box.height);
        axes(os, box, "x", "u");
        os << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i < basis.grid_size(0); ++i)
            os << box.px(basis.nodes(0)[i]) << "," << box.py(grid[i]) << " ";
        os << "\"/>\n</svg>\n";
        return os.str();
    }

    // 2D heatmap over the tensor collocation grid
    const int nx = basis.grid_size(0);
    const int ny = basis.grid_size(1);
    double vmax = 1e-300;
    for (double v : grid) vmax = std::max(vmax, std::fabs(v));
    const double lx = basis.domain().lengths[0];
    const double ly = basis.domain().lengths[1];
    const double w = 640.0;
    const double h = w * ly / lx;
    std::ostringstream os;
    os << svg_open(w, h);
    auto cell_edges = [](const Vec& nodes, double len, int i) {
        const double lo = i == 0 ? 0.0 : 0.5 * (nodes[i - 1] + nodes[i]);
        const double hi =
            i + 1 == static_cast<int>(nodes.size()) ? len : 0.5 * (nodes[i] + nodes[i + 1]);
        return std::pair<double, double>{lo, hi};
    };
    for (int i = 0; i < nx; ++i) {
        const auto [xlo, xhi] = cell_edges(basis.nodes(0), lx, i);
        for (int j = 0; j < ny; ++j) {
            const auto [ylo, yhi] = cell_edges(basis.nodes(1), ly, j);
            const double v = grid[static_cast<std::size_t>(i) * ny + j] / vmax;
            // blue-white-red
            const int r = static_cast<int>(255 * std::min(1.0, 1.0 + std::min(v, 0.0)));
            const int b = static_cast<int>(255 * std::min(1.0, 1.0 - std::max(v, 0.0)));
            const int g = std::min(r, b);
            os << "<rect x=\"" << xlo / lx * w << "\" y=\"" << (1.0 - yhi / ly) * h << "\" width=\""
               << (xhi - xlo) / lx * w << "\" height=\"" << (yhi - ylo) / ly * h << "\" fill=\"rgb("
               << r << "," << g << "," << b << ")\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace fiberfold
