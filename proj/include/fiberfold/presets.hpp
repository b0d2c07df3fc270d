#pragma once

// Shipped problem presets, one per reproducible experiment:
//   ap2d          rectangle [0,1]x[0,2], arctan-Gaussian f', the four-preimage run
//   ap-convex-1d  interval [0,pi], smooth convex f with a < lambda_1 < b < lambda_2
//   fucik-1d      interval [0,pi], piecewise-linear f at a located Fucik pair (p = 2)
//   cusp-toy      adapted-coordinate cusp normal form
//   linear1d      interval [0,pi], N = 0

#include "fiberfold/asymptotics.hpp"
#include "fiberfold/oracle.hpp"

#include <string>
#include <vector>

namespace fiberfold {

struct Preset {
    std::string name;
    ProblemSpec problem;
    double t_lo = -10.0;
    double t_hi = 10.0;
    int steps = 201;
    double default_height = 0.0;           // s for preimage queries
    std::vector<double> toy_offsets;       // cusp-toy sweep of <z, phi~>
};

Preset make_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace fiberfold
