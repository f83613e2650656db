#pragma once

// Experiment configuration and matrix files, both JSON.

#include "logstab/operators.hpp"
#include "logstab/region.hpp"
#include "logstab/stability.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace logstab::harness {

struct GeneratorConfig {
    std::string type = "heat"; ///< heat | ou | custom
    int n = 32;                ///< heat: number of sine modes
    double length = 3.14159265358979323846;
    int order = 8;             ///< ou: total polynomial degree
    Eigen::MatrixXd drift;     ///< ou
    Eigen::MatrixXd diffusion; ///< ou, identity when empty
    Eigen::MatrixXd matrix;    ///< custom
    double psi = 0.0;          ///< custom: analyticity angle
};

struct RegionConfig {
    std::string kind = "full"; ///< full | slabs | ball | mask
    double r = 0.5;
    double delta = 1.0;
    SlabLayout slabs;
    Eigen::VectorXd centre; ///< ball
    double radius = 1.0;    ///< ball
    std::vector<bool> mask; ///< mask: one flag per generator node
};

struct GeometryConfig {
    double theta = 1.0;
    std::optional<double> psi; ///< taken from the generator when absent
};

struct EnsembleConfig {
    int count = 100;
    std::uint64_t seed = 42;
    std::vector<double> amplitudes{1.0};
    int threads = 0; ///< 0 = hardware concurrency
};

struct TimeGridConfig {
    int n_times = 64; ///< trapezoid nodes for the observation integral
    int n_eval = 50;  ///< evaluation times jθ/n_eval, j = 1..n_eval
};

struct ExperimentConfig {
    GeneratorConfig generator;
    RegionConfig region;
    GeometryConfig geometry;
    stability::StabilityParams stability;
    EnsembleConfig ensemble;
    TimeGridConfig time_grid;
};

/// {"n": int, "rows": [[...], ...]}.
[[nodiscard]] Eigen::MatrixXd parse_matrix(const nlohmann::json& j);
[[nodiscard]] nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

/// A drift file is either a bare matrix or {"drift": matrix, "diffusion": matrix}.
[[nodiscard]] operators::DriftSpec parse_drift(const nlohmann::json& j);
[[nodiscard]] operators::DriftSpec load_drift(const std::filesystem::path& path);

[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& config);

[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace logstab::harness

namespace logstab::harness {

/// Built-in configurations: "heat" (32 sine modes), "ou" (2D drift
/// [[-1,2],[0,-1]], degree 8) and "ou-slabs" (the same with a slab region).
[[nodiscard]] ExperimentConfig preset_config(const std::string& name);

} // namespace logstab::harness
