#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace logstab::harness {

enum class ExperimentMode { logconvexity, stability };

[[nodiscard]] ExperimentMode parse_mode(const std::string& name);
[[nodiscard]] std::string to_string(ExperimentMode mode);

struct LogconvexityRecord {
    int sample_id = 0;
    double t = 0.0;
    double w = 0.0;
    double w_lower = 0.0;
    double actual = 0.0;     ///< ‖u(t)‖
    double final_norm = 0.0; ///< ‖u(θ)‖
    double bound = 0.0;
    double bound_surrogate = 0.0;
    double ratio = 0.0; ///< bound / actual
};

struct StabilityRecord {
    int sample_id = 0;
    double amplitude = 1.0;
    double init_norm = 0.0;
    double frac_norm = 0.0;
    double obs_norm = 0.0;
    double final_norm = 0.0;
    double kernel = 0.0;
    double ratio = 0.0; ///< init_norm / kernel^{s/p}
    bool skipped = false; ///< obs_norm >= 1, kernel undefined
};

struct AmplitudeLevel {
    double amplitude = 1.0;
    double empirical_K1 = 0.0;
    int used = 0;
};

struct ReportSummary {
    double psi = 0.0;
    double phi = 1.0;
    double c_psi = 1.0;
    double K = 1.0;
    double kappa = 0.0;
    double s_over_p = 0.0;
    double l2_radius = 0.0; ///< bound on ‖u₀‖ over the admissible set
    std::optional<double> empirical_K1;
    std::optional<double> kappa_obs;
    std::optional<double> kappa_adm;
    std::optional<double> conditioning;
    /// logconvexity: max(actual - bound); stability: max(‖u(θ)‖ - κ_obs·obs).
    double max_violation = -1e300;
    int violations = 0;
    int surrogate_violations = 0;
    double max_surrogate_violation = -1e300;
    int admissibility_violations = 0;
    int skipped = 0;
    bool kernel_monotone = true;
    bool cover_ok = true;
    std::vector<AmplitudeLevel> levels;
    /// max level K₁ / K₁ at the first amplitude.
    std::optional<double> k1_spread;
};

struct ExperimentReport {
    ExperimentMode mode = ExperimentMode::logconvexity;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<LogconvexityRecord> logconvexity;
    std::vector<StabilityRecord> stability;
    ReportSummary summary;
    std::vector<std::string> errors;
    [[nodiscard]] bool complete() const noexcept { return errors.empty(); }
};

/// Per-record CSV; the last two columns carry the config hash and seed.
/// Stability rows start with sample_id, init_norm, frac_norm, obs_norm, kernel, ratio.
void write_csv(const ExperimentReport& report, std::ostream& out);

/// Summary with keys empirical_K1, max_violation, kappa_obs, kappa_adm, psi, phi, c_psi,
/// followed by counts and metadata.
[[nodiscard]] nlohmann::ordered_json summary_json(const ExperimentReport& report);

/// Rows whose ratio column disagrees with its own bound columns (relative tol).
[[nodiscard]] std::vector<int> inconsistent_rows(const ExperimentReport& report, double tol = 1e-12);

} // namespace logstab::harness
