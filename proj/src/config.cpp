#include "logstab/config.hpp"

#include "logstab/errors.hpp"

#include <cstdio>
#include <fstream>

namespace logstab::harness {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Eigen::VectorXd parse_vector(const json& j) {
    detail::require(j.is_array(), "expected a numeric array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

} // namespace

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    detail::require(in.good(), "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        detail::fail(ErrorKind::invalid_argument, path.string() + ": " + e.what());
    }
}

Eigen::MatrixXd parse_matrix(const json& j) {
    detail::require(j.is_object() && j.contains("n") && j.contains("rows"), "matrix needs keys n and rows");
    const int n = j.at("n").get<int>();
    const auto& rows = j.at("rows");
    detail::require(n > 0, "matrix size n must be > 0");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n)) {
        detail::fail(ErrorKind::dimension_mismatch, "matrix rows do not match n");
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
            detail::fail(ErrorKind::dimension_mismatch, "matrix row " + std::to_string(i) + " has the wrong length");
        }
        for (int k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return json{{"n", m.rows()}, {"rows", std::move(rows)}};
}

operators::DriftSpec parse_drift(const json& j) {
    if (j.contains("drift")) {
        auto drift = parse_matrix(j.at("drift"));
        if (j.contains("diffusion")) return operators::DriftSpec(std::move(drift), parse_matrix(j.at("diffusion")));
        return operators::DriftSpec(std::move(drift));
    }
    return operators::DriftSpec(parse_matrix(j));
}

operators::DriftSpec load_drift(const std::filesystem::path& path) { return parse_drift(read_json_file(path)); }

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("generator")) {
            const auto& g = j.at("generator");
            read_opt(g, "type", c.generator.type);
            read_opt(g, "n", c.generator.n);
            read_opt(g, "length", c.generator.length);
            read_opt(g, "order", c.generator.order);
            read_opt(g, "psi", c.generator.psi);
            if (g.contains("drift")) c.generator.drift = parse_matrix(g.at("drift"));
            if (g.contains("diffusion")) c.generator.diffusion = parse_matrix(g.at("diffusion"));
            if (g.contains("matrix")) c.generator.matrix = parse_matrix(g.at("matrix"));
        }
        if (j.contains("region")) {
            const auto& r = j.at("region");
            read_opt(r, "kind", c.region.kind);
            read_opt(r, "r", c.region.r);
            read_opt(r, "delta", c.region.delta);
            read_opt(r, "axis", c.region.slabs.axis);
            read_opt(r, "half_width", c.region.slabs.half_width);
            read_opt(r, "gap", c.region.slabs.gap);
            read_opt(r, "offset", c.region.slabs.offset);
            read_opt(r, "radius", c.region.radius);
            if (r.contains("centre")) c.region.centre = parse_vector(r.at("centre"));
            if (r.contains("mask")) c.region.mask = r.at("mask").get<std::vector<bool>>();
        }
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            read_opt(g, "theta", c.geometry.theta);
            if (g.contains("psi") && !g.at("psi").is_null()) c.geometry.psi = g.at("psi").get<double>();
        }
        if (j.contains("stability_params")) {
            const auto& s = j.at("stability_params");
            read_opt(s, "eps", c.stability.eps);
            read_opt(s, "M", c.stability.M);
            read_opt(s, "p", c.stability.p);
            read_opt(s, "s", c.stability.s);
        }
        if (j.contains("ensemble")) {
            const auto& e = j.at("ensemble");
            read_opt(e, "count", c.ensemble.count);
            read_opt(e, "seed", c.ensemble.seed);
            read_opt(e, "amplitudes", c.ensemble.amplitudes);
            read_opt(e, "threads", c.ensemble.threads);
        }
        if (j.contains("time_grid")) {
            const auto& t = j.at("time_grid");
            read_opt(t, "n_times", c.time_grid.n_times);
            read_opt(t, "n_eval", c.time_grid.n_eval);
        }
    } catch (const json::exception& e) {
        detail::fail(ErrorKind::invalid_argument, std::string("config: ") + e.what());
    }
    c.stability.theta = c.geometry.theta;
    detail::require(c.ensemble.count > 0, "ensemble.count must be > 0");
    detail::require(!c.ensemble.amplitudes.empty(), "ensemble.amplitudes must not be empty");
    detail::require(c.time_grid.n_times >= 2, "time_grid.n_times must be >= 2");
    detail::require(c.time_grid.n_eval >= 1, "time_grid.n_eval must be >= 1");
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json gen{{"type", c.generator.type}, {"n", c.generator.n}, {"length", c.generator.length},
             {"order", c.generator.order}, {"psi", c.generator.psi}};
    if (c.generator.drift.size() != 0) gen["drift"] = matrix_to_json(c.generator.drift);
    if (c.generator.diffusion.size() != 0) gen["diffusion"] = matrix_to_json(c.generator.diffusion);
    if (c.generator.matrix.size() != 0) gen["matrix"] = matrix_to_json(c.generator.matrix);

    json region{{"kind", c.region.kind},
                {"r", c.region.r},
                {"delta", c.region.delta},
                {"axis", c.region.slabs.axis},
                {"half_width", c.region.slabs.half_width},
                {"gap", c.region.slabs.gap},
                {"offset", c.region.slabs.offset},
                {"radius", c.region.radius},
                {"centre", vector_to_json(c.region.centre)},
                {"mask", c.region.mask}};

    json geometry{{"theta", c.geometry.theta}, {"psi", nullptr}};
    if (c.geometry.psi) geometry["psi"] = *c.geometry.psi;

    return json{{"generator", std::move(gen)},
                {"region", std::move(region)},
                {"geometry", std::move(geometry)},
                {"stability_params",
                 {{"eps", c.stability.eps}, {"M", c.stability.M}, {"p", c.stability.p}, {"s", c.stability.s}}},
                {"ensemble",
                 {{"count", c.ensemble.count}, {"seed", c.ensemble.seed}, {"amplitudes", c.ensemble.amplitudes}}},
                {"time_grid", {{"n_times", c.time_grid.n_times}, {"n_eval", c.time_grid.n_eval}}}};
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_json_file(path)); }

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace logstab::harness

namespace logstab::harness {

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.ensemble.count = 100;
    c.ensemble.seed = 20240607;
    c.time_grid.n_eval = 50;
    c.time_grid.n_times = 64;
    if (name == "heat") {
        c.generator.type = "heat";
        c.generator.n = 32;
        return c;
    }
    if (name == "ou" || name == "ou-slabs") {
        c.generator.type = "ou";
        c.generator.order = 8;
        c.generator.drift.resize(2, 2);
        c.generator.drift << -1.0, 2.0, 0.0, -1.0;
        if (name == "ou-slabs") {
            c.region.kind = "slabs";
            c.region.slabs = SlabLayout{0, 1.0, 1.0, 0.0};
            c.region.r = 0.5;
            c.region.delta = 1.5;
            c.ensemble.amplitudes = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
        }
        return c;
    }
    detail::fail(ErrorKind::invalid_argument, "unknown preset '" + name + "'");
}

} // namespace logstab::harness
