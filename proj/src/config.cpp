#include "fiberfold/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fiberfold {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

double need_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number()) fail(where, "missing numeric field '" + key + "'");
    return j[key].get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].get<double>();
}

Nonlinearity nonlinearity_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail("nonlinearity", "expected an object with a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "arctan_gauss") {
        return Nonlinearity::arctan_gauss(
            need_number(j, "base", "nonlinearity"), need_number(j, "scale", "nonlinearity"),
            number_or(j, "width", 10.0), number_or(j, "gauss_coef", 0.4),
            number_or(j, "f0", 0.0));
    }
    if (kind == "smooth_convex") {
        return Nonlinearity::smooth_convex(need_number(j, "a", "nonlinearity"),
                                           need_number(j, "b", "nonlinearity"),
                                           number_or(j, "sharpness", 1.0), number_or(j, "f0", 0.0));
    }
    if (kind == "piecewise_linear") {
        return Nonlinearity::piecewise_linear(need_number(j, "a", "nonlinearity"),
                                              need_number(j, "b", "nonlinearity"),
                                              number_or(j, "f0", 0.0));
    }
    fail("nonlinearity", "unknown kind '" + kind + "' (catalog kinds: arctan_gauss, "
                         "smooth_convex, piecewise_linear; custom maps are API-only)");
}

Vec rhs_from_json(const Json& j, const SpectralBasis& basis) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail("rhs", "expected an object with a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "zero") return Vec(basis.modes(), 0.0);
    if (kind == "coefficients") {
        if (!j.contains("values") || !j["values"].is_array())
            fail("rhs", "'coefficients' needs an array 'values'");
        Vec g = j["values"].get<Vec>();
        if (static_cast<int>(g.size()) != basis.modes())
            fail("rhs", "coefficient count does not match the basis mode count");
        return g;
    }
    if (kind == "modes") {
        if (!j.contains("entries") || !j["entries"].is_array())
            fail("rhs", "'modes' needs an array 'entries'");
        Vec g(basis.modes(), 0.0);
        for (const Json& e : j["entries"]) {
            if (!e.contains("k") || !e["k"].is_array() || !e.contains("c"))
                fail("rhs", "each entry needs integer tuple 'k' and value 'c'");
            ModeTuple t{0, 0};
            const auto kk = e["k"].get<std::vector<int>>();
            if (static_cast<int>(kk.size()) != basis.dim())
                fail("rhs", "mode tuple dimension mismatch");
            t[0] = kk[0];
            if (basis.dim() == 2) t[1] = kk[1];
            g[basis.flat_index(t)] = e["c"].get<double>();
        }
        return g;
    }
    if (kind == "named") {
        if (!j.contains("name") || !j["name"].is_string()) fail("rhs", "'named' needs a 'name'");
        const std::string name = j["name"].get<std::string>();
        if (name == "ap2d") {
            if (basis.dim() != 2) fail("rhs", "named rhs 'ap2d' needs a 2d basis");
            constexpr double kPi = std::numbers::pi;
            Vec grid(basis.grid_points());
            for (int i = 0; i < basis.grid_points(); ++i) {
                const auto [x, y] = basis.grid_point(i);
                grid[i] = -100.0 * (x * (x - 1.0) * y * y * (y - 2.0)) -
                          35.0 * std::sin(kPi * x) * std::sin(kPi * y / 2.0);
            }
            Vec g;
            basis.analyze(grid, g);
            return g;
        }
        fail("rhs", "unknown named rhs '" + name + "'");
    }
    fail("rhs", "unknown kind '" + kind + "'");
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // e.byte is the offset of the failure; convert to line/column
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << origin << ":" << line << ":" << col << ": " << e.what();
        throw ConfigError(os.str());
    }
}

Preset preset_from_json(const Json& j) {
    if (!j.is_object()) fail("problem file", "top level must be an object");
    if (j.contains("preset")) {
        Preset preset = make_preset(j["preset"].get<std::string>());
        // window overrides ride along with the preset
        preset.t_lo = number_or(j, "t_min", preset.t_lo);
        preset.t_hi = number_or(j, "t_max", preset.t_hi);
        if (j.contains("steps")) preset.steps = j["steps"].get<int>();
        if (j.contains("height")) preset.default_height = j["height"].get<double>();
        return preset;
    }

    if (!j.contains("domain") || !j["domain"].is_object() || !j["domain"].contains("lengths"))
        fail("problem file", "missing domain.lengths");
    const auto lengths = j["domain"]["lengths"].get<std::vector<double>>();
    if (!j.contains("modes") || !j["modes"].is_array())
        fail("problem file", "missing integer array 'modes'");
    const auto modes = j["modes"].get<std::vector<int>>();
    const int grid_factor = j.contains("grid_factor") ? j["grid_factor"].get<int>() : 4;
    SpectralBasis basis(make_box(lengths), modes, grid_factor);

    if (!j.contains("nonlinearity")) fail("problem file", "missing 'nonlinearity' block");
    Nonlinearity f = nonlinearity_from_json(j["nonlinearity"]);

    int p = -1;
    if (j.contains("p")) {
        if (j["p"].is_string()) {
            if (j["p"].get<std::string>() != "ground")
                fail("problem file", "'p' must be an index or \"ground\"");
        } else {
            p = j["p"].get<int>();
        }
    }
    std::optional<double> gamma;
    if (j.contains("gamma")) gamma = j["gamma"].get<double>();
    std::optional<double> lipschitz;
    if (j.contains("lipschitz_n")) lipschitz = j["lipschitz_n"].get<double>();

    std::optional<Vec> rhs;
    if (j.contains("rhs")) rhs = rhs_from_json(j["rhs"], basis);

    auto op = std::make_shared<SpectralOperator>(std::move(basis), std::move(f));
    Preset preset;
    preset.name = j.contains("name") ? j["name"].get<std::string>() : std::string("custom");
    preset.problem = make_problem(op, p, gamma, lipschitz, std::move(rhs));
    preset.problem.name = preset.name;
    preset.t_lo = number_or(j, "t_min", -10.0);
    preset.t_hi = number_or(j, "t_max", 10.0);
    preset.steps = j.contains("steps") ? j["steps"].get<int>() : 201;
    preset.default_height = number_or(j, "height", 0.0);
    return preset;
}

Preset load_problem_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open problem file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return preset_from_json(parse_json_text(buf.str(), path));
}

}  // namespace fiberfold
