#include "logstab/report.hpp"

#include "logstab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace logstab::harness {

ExperimentMode parse_mode(const std::string& name) {
    if (name == "logconvexity") return ExperimentMode::logconvexity;
    if (name == "stability") return ExperimentMode::stability;
    detail::fail(ErrorKind::invalid_argument, "unknown mode '" + name + "'");
}

std::string to_string(ExperimentMode mode) {
    return mode == ExperimentMode::logconvexity ? "logconvexity" : "stability";
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::ordered_json opt(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// Maxima start at -1e300; report null when nothing was recorded.
nlohmann::ordered_json maximum(double v) { return opt(v > -1e299 ? std::optional<double>(v) : std::nullopt); }

bool close(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

void write_csv(const ExperimentReport& report, std::ostream& out) {
    const std::string tail = "," + report.config_hash + "," + std::to_string(report.seed) + "\n";
    if (report.mode == ExperimentMode::stability) {
        out << "sample_id,init_norm,frac_norm,obs_norm,kernel,ratio,config_hash,seed\n";
        for (const auto& r : report.stability) {
            out << r.sample_id << ',' << num(r.init_norm) << ',' << num(r.frac_norm) << ',' << num(r.obs_norm) << ','
                << num(r.skipped ? NAN : r.kernel) << ',' << num(r.skipped ? NAN : r.ratio) << tail;
        }
    } else {
        out << "sample_id,t,w,w_lower,actual,final_norm,bound,bound_surrogate,ratio,config_hash,seed\n";
        for (const auto& r : report.logconvexity) {
            out << r.sample_id << ',' << num(r.t) << ',' << num(r.w) << ',' << num(r.w_lower) << ','
                << num(r.actual) << ',' << num(r.final_norm) << ',' << num(r.bound) << ','
                << num(r.bound_surrogate) << ',' << num(r.ratio) << tail;
        }
    }
    for (const auto& e : report.errors) out << "# error: " << e << '\n';
}

nlohmann::ordered_json summary_json(const ExperimentReport& report) {
    const auto& s = report.summary;
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& l : s.levels) {
        levels.push_back({{"amplitude", l.amplitude}, {"empirical_K1", l.empirical_K1}, {"used", l.used}});
    }
    nlohmann::ordered_json j;
    j["empirical_K1"] = opt(s.empirical_K1);
    j["max_violation"] = maximum(s.max_violation);
    j["kappa_obs"] = opt(s.kappa_obs);
    j["kappa_adm"] = opt(s.kappa_adm);
    j["psi"] = s.psi;
    j["phi"] = s.phi;
    j["c_psi"] = s.c_psi;
    j["mode"] = to_string(report.mode);
    j["K"] = s.K;
    j["kappa"] = s.kappa;
    j["l2_radius"] = s.l2_radius;
    j["violations"] = s.violations;
    j["surrogate_violations"] = s.surrogate_violations;
    j["max_surrogate_violation"] = maximum(s.max_surrogate_violation);
    j["admissibility_violations"] = s.admissibility_violations;
    j["skipped"] = s.skipped;
    j["kernel_monotone"] = s.kernel_monotone;
    j["cover_ok"] = s.cover_ok;
    j["conditioning"] = opt(s.conditioning);
    j["k1_spread"] = opt(s.k1_spread);
    j["levels"] = std::move(levels);
    j["records"] = report.mode == ExperimentMode::stability ? report.stability.size() : report.logconvexity.size();
    j["errors"] = report.errors;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    return j;
}

std::vector<int> inconsistent_rows(const ExperimentReport& report, double tol) {
    std::vector<int> bad;
    if (report.mode == ExperimentMode::stability) {
        for (std::size_t i = 0; i < report.stability.size(); ++i) {
            const auto& r = report.stability[i];
            if (r.skipped) continue;
            if (!close(r.ratio, r.init_norm / std::pow(r.kernel, report.summary.s_over_p), tol)) {
                bad.push_back(static_cast<int>(i));
            }
        }
    } else {
        for (std::size_t i = 0; i < report.logconvexity.size(); ++i) {
            const auto& r = report.logconvexity[i];
            if (!close(r.ratio, r.bound / r.actual, tol)) bad.push_back(static_cast<int>(i));
        }
    }
    return bad;
}

} // namespace logstab::harness
