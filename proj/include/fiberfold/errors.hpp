#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fiberfold {

// Error taxonomy shared across modules. exit_code is what the CLI maps each
// failure to: 2 config, 3 spectral-gap violation, 4 non-convergence,
// 5 invariant failure.
class Error : public std::runtime_error {
public:
    Error(std::string kind, int exit_code, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)), exit_code_(exit_code) {}

    const std::string& kind() const { return kind_; }
    int exit_code() const { return exit_code_; }

private:
    std::string kind_;
    int exit_code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("ConfigError", 2, msg) {}
};

class GapViolated : public Error {
public:
    GapViolated(double n, double c, const std::string& msg)
        : Error("GapViolated", 3, msg), lipschitz_n(n), gap_c(c) {}
    double lipschitz_n;
    double gap_c;
};

class MultipleInteraction : public Error {
public:
    MultipleInteraction(std::vector<int> modes, const std::string& msg)
        : Error("MultipleInteraction", 3, msg), interacting_modes(std::move(modes)) {}
    std::vector<int> interacting_modes;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& msg, double residual = 0.0)
        : Error("NonConvergence", 4, msg), final_residual(residual) {}
    double final_residual;
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(const std::string& msg) : Error("NonFiniteValue", 4, msg) {}
};

class IllConditioned : public Error {
public:
    explicit IllConditioned(const std::string& msg) : Error("IllConditioned", 5, msg) {}
};

class EigGapCollapse : public Error {
public:
    EigGapCollapse(double t, double gap, const std::string& msg)
        : Error("EigGapCollapse", 5, msg), at_t(t), gap(gap) {}
    double at_t;
    double gap;
};

class FucikLocationFailed : public Error {
public:
    explicit FucikLocationFailed(const std::string& msg) : Error("FucikLocationFailed", 5, msg) {}
};

class InvariantFailure : public Error {
public:
    explicit InvariantFailure(const std::string& msg) : Error("InvariantFailure", 5, msg) {}
};

}  // namespace fiberfold
