#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "fiberfold/config.hpp"
#include "fiberfold/report.hpp"

#include <filesystem>
#include <fstream>

using namespace fiberfold;

TEST_CASE("json dump: 17 significant digits, sorted keys, deterministic") {
    Json j;
    j["b"] = 0.1;
    j["a"] = 1.0 / 3.0;
    j["nested"] = {{"x", 1e-300}, {"arr", {1.5, 2, true, "s"}}};
    const std::string d1 = dump_json(j);
    const std::string d2 = dump_json(j);
    CHECK(d1 == d2);
    CHECK(d1.find("0.33333333333333331") != std::string::npos);
    CHECK(d1.find("\"a\"") < d1.find("\"b\""));
    // round trip through the parser preserves the doubles exactly
    Json back = Json::parse(d1);
    CHECK(back["a"].get<double>() == 1.0 / 3.0);
    CHECK(back["nested"]["x"].get<double>() == 1e-300);
}

TEST_CASE("atomic write replaces files completely") {
    const std::string path = "io_test_dir/report.json";
    atomic_write(path, "first");
    atomic_write(path, "second");
    std::ifstream f(path);
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(content == "second");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all("io_test_dir");
}

TEST_CASE("config hash is stable and sensitive") {
    Json a;
    a["x"] = 1.0;
    Json b;
    b["x"] = 1.0 + 1e-12;
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("problem json embeds gap data and nonlinearity block") {
    Preset preset = make_preset("ap-convex-1d");
    Json j = problem_json(preset.problem);
    CHECK(j["gamma"].get<double>() == doctest::Approx(1.5));
    CHECK(j["lipschitz_n"].get<double>() == doctest::Approx(1.5));
    CHECK(j["gap_c"].get<double>() == doctest::Approx(2.5));
    CHECK(j["nonlinearity"]["kind"] == "smooth_convex");
    CHECK(j["basis"]["mode_counts"][0] == 32);
}

TEST_CASE("solve reports serialize with their convergence data") {
    Preset preset = make_preset("ap-convex-1d");
    Vec z0 = *preset.problem.rhs;
    preset.problem.project_H(z0);
    SolveReport rep = solve_projected(preset.problem, z0, 1.0);
    Json j = solve_report_json(rep);
    CHECK(j["iterations"].get<int>() == rep.iterations);
    CHECK(j["final_residual"].get<double>() == rep.final_residual);
    CHECK(j["observed_rate"].get<double>() == rep.observed_rate);
}

TEST_CASE("csv exports are RFC-4180 flavored with CRLF") {
    Preset preset = make_preset("linear1d");
    Vec z0 = *preset.problem.rhs;
    preset.problem.project_H(z0);
    FiberTrace trace = trace_fiber(preset.problem, z0, -1.0, 1.0, 5);
    const std::string csv = trace_csv(trace);
    CHECK(csv.substr(0, csv.find('\n') + 1) == "t,height,residual,norm_w\r\n");
    CHECK(csv.find("\r\n") != std::string::npos);
    // one header plus five rows
    int lines = 0;
    for (std::size_t i = 0; i + 1 < csv.size(); ++i)
        if (csv[i] == '\r' && csv[i + 1] == '\n') ++lines;
    CHECK(lines == 6);
}

TEST_CASE("svg plots are well-formed svg documents") {
    Preset preset = make_preset("ap-convex-1d");
    Vec z0 = *preset.problem.rhs;
    preset.problem.project_H(z0);
    FiberTrace trace = trace_fiber(preset.problem, z0, -5.0, 5.0, 21);
    const std::string svg = svg_height_profile(trace, {0.5}, -2.0);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("circle") != std::string::npos);

    const std::string sol1d = svg_solution(*preset.problem.op->spectral_basis(),
                                           Vec(preset.problem.dim(), 0.5));
    CHECK(sol1d.find("polyline") != std::string::npos);

    Preset ap2d = make_preset("ap2d");
    const std::string sol2d =
        svg_solution(*ap2d.problem.op->spectral_basis(), Vec(ap2d.problem.dim(), 0.1));
    CHECK(sol2d.find("<rect") != std::string::npos);
}

TEST_CASE("problem files parse, validate, and report line numbers") {
    const std::string good = R"({
        "name": "tiny",
        "domain": {"lengths": [3.14159265358979]},
        "modes": [8],
        "grid_factor": 4,
        "nonlinearity": {"kind": "smooth_convex", "a": 0.0, "b": 3.0, "sharpness": 1.0},
        "rhs": {"kind": "modes", "entries": [{"k": [1], "c": -2.0}, {"k": [2], "c": 0.5}]},
        "t_min": -20.0, "t_max": 20.0, "steps": 101, "height": -2.0
    })";
    Preset preset = preset_from_json(parse_json_text(good, "inline"));
    CHECK(preset.name == "tiny");
    CHECK(preset.problem.dim() == 8);
    CHECK((*preset.problem.rhs)[0] == doctest::Approx(-2.0));
    CHECK(preset.t_hi == 20.0);

    // syntax error carries line:column
    try {
        parse_json_text("{\n  \"a\": 1,\n  oops\n}", "broken.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("broken.json:3") != std::string::npos);
    }

    // schema errors name the offending block
    const std::string bad_kind = R"({
        "domain": {"lengths": [1.0]},
        "modes": [4],
        "nonlinearity": {"kind": "cubic"}
    })";
    CHECK_THROWS_AS(preset_from_json(parse_json_text(bad_kind, "inline")), ConfigError);

    const std::string bad_rhs = R"({
        "domain": {"lengths": [1.0]},
        "modes": [4],
        "nonlinearity": {"kind": "piecewise_linear", "a": 0.0, "b": 0.5},
        "rhs": {"kind": "coefficients", "values": [1.0]}
    })";
    CHECK_THROWS_AS(preset_from_json(parse_json_text(bad_rhs, "inline")), ConfigError);
}

TEST_CASE("preset expansion honors window overrides") {
    Json j;
    j["preset"] = "linear1d";
    j["t_min"] = -3.0;
    j["t_max"] = 3.0;
    j["height"] = 0.25;
    Preset preset = preset_from_json(j);
    CHECK(preset.name == "linear1d");
    CHECK(preset.t_lo == -3.0);
    CHECK(preset.default_height == 0.25);
}

TEST_CASE("named ap2d rhs equals the preset right-hand side") {
    Preset preset = make_preset("ap2d");
    Json j;
    j["domain"] = {{"lengths", {1.0, 2.0}}};
    j["modes"] = {16, 16};
    j["grid_factor"] = 4;
    j["nonlinearity"] = {{"kind", "arctan_gauss"},
                         {"base", 12.337005501361697},
                         {"scale", 2.3561944901923448},
                         {"width", 10.0},
                         {"gauss_coef", 0.4},
                         {"f0", 47.12}};
    j["rhs"] = {{"kind", "named"}, {"name", "ap2d"}};
    Preset loaded = preset_from_json(j);
    CHECK(dist2(*loaded.problem.rhs, *preset.problem.rhs) < 1e-12);
}
