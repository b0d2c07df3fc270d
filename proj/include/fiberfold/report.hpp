#pragma once

// Report serialization: JSON with numbers formatted at 17 significant digits
// (so identical runs produce byte-identical files), RFC-4180 CSV, static SVG
// plots, and atomic file writes (temp + rename).

#include "fiberfold/asymptotics.hpp"
#include "fiberfold/oracle.hpp"
#include "fiberfold/presets.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace fiberfold {

using Json = nlohmann::json;

// Serialize with %.17g floats and sorted object keys; deterministic.
std::string dump_json(const Json& j, int indent = 2);

void atomic_write(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(std::string_view s);
std::string config_hash(const Json& config);

Json basis_json(const SpectralBasis& basis);
Json problem_json(const ProblemSpec& ps);

// Common report header: config hash, problem description, tolerance set.
Json report_header(const ProblemSpec& ps, const Json& config, const Json& tolerances);

Json solve_report_json(const SolveReport& rep);
Json trace_json(const FiberTrace& trace);
Json preimages_json(const ProblemSpec& ps, const PreimageSet& set);
Json critical_points_json(const std::vector<CriticalPoint>& cps);
Json spectral_link_json(const SpectralLinkReport& rep);
Json sweep_json(const SweepResult& rep);
Json v_report_json(const VReport& rep);
Json asymptotic_directions_json(const AsymptoticDirections& dirs);
Json slope_limit_json(const SlopeLimitReport& rep);
Json fucik_json(const FucikReport& rep);
Json multistart_json(const MultistartResult& rep);

Json verticality_json(const VerticalityFit& fit);

std::string trace_csv(const FiberTrace& trace);                   // t,height,residual,norm_w
std::string height_ratio_csv(const FiberTrace& trace);            // t,height,height_over_t
std::string grid_csv(const SpectralBasis& basis, const Vec& g);   // x[,y],value
std::string sweep_csv(const SweepResult& rep);                    // s,count
std::string link_csv(const SpectralLinkReport& rep);              // t,lambda_p,dt_height,gap

// Height profile h(t) with optional marked parameter values.
std::string svg_height_profile(const FiberTrace& trace, const std::vector<double>& marked_ts,
                               double marked_height);
// Nodal plot of one field: curve in 1D, heatmap in 2D.
std::string svg_solution(const SpectralBasis& basis, const Vec& coef);

}  // namespace fiberfold
