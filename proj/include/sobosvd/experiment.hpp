#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sobosvd/discretization.hpp"
#include "sobosvd/truncation.hpp"

namespace sobosvd {

inline const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"eckart_young", "h1_identity",      "ek_identity", "hosvd_bound",
                                                "quasi_opt",    "sandwich",         "derivative_bound",
                                                "diagnostics"};
    return names;
}

struct Tolerances {
    double eckart_young_rel = 1e-10;
    double identity_rel = 1e-10;
    double hosvd_abs = 1e-10;
    double quasi_opt_abs = 1e-10;
    double sandwich_abs = 1e-9;
    double derivative_bound_abs = 1e-10;
    double transfer_rel = 1e-10;
    // Relative residuals use max(|a|, |b|, floor * ||u||_1^2) as denominator.
    double relative_floor = 1e-8;
};

struct DiagnosticsExpectation {
    std::optional<double> h1_slope;
    double h1_slope_tol = 0.1;
    std::optional<double> l2_slope;
    double l2_slope_tol = 0.15;
    std::optional<std::string> flag;
};

struct ExperimentConfig {
    std::string case_spec;  // catalog name, parameters in `params`
    std::vector<double> params;
    std::filesystem::path file;  // raw samples instead of a catalog case
    std::vector<std::size_t> n;
    std::vector<RankVector> ranks;
    std::vector<std::string> checks;
    Tolerances tol;
    DiagnosticsExpectation expect;
    std::filesystem::path output = "out";
};

// Throws Error(Config) with a message naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

GridFunction load_function(const ExperimentConfig& cfg);

struct ExperimentResult {
    nlohmann::json report;
    std::string sigma_csv;
    bool passed = false;
};

// Rank vectors are validated against the grid here (Error(InvalidRank)).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const GridFunction& u);

std::string sigma_csv(const SobolevAnalysis& a);

// Relative residual with the floor described in Tolerances.
double relative_residual(double a, double b, double scale, double floor);

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitIo = 3 };

// Full pipeline behind `sobosvd run`; diagnostics go to stderr.
int run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir);

}  // namespace sobosvd
