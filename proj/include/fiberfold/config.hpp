#pragma once

// Problem-file loading and validation. A problem file is JSON following
// docs/config-schema.json: domain lengths, mode counts, a nonlinearity block,
// the distinguished mode p, optional gamma/Lipschitz overrides, and a
// right-hand side given as a coefficient list, sparse mode list, or named
// builtin. A top-level {"preset": "<name>"} loads a shipped preset.

#include "fiberfold/presets.hpp"
#include "fiberfold/report.hpp"

#include <string>

namespace fiberfold {

// Parse with line/column diagnostics on syntax errors.
Json parse_json_text(const std::string& text, const std::string& origin);

// Build a preset from a parsed problem file (or expand its "preset" key).
Preset preset_from_json(const Json& j);

Preset load_problem_file(const std::string& path);

}  // namespace fiberfold
