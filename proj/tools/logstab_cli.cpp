// Command-line front end for the logstab library.

#include "logstab/config.hpp"
#include "logstab/conformal.hpp"
#include "logstab/errors.hpp"
#include "logstab/harness.hpp"
#include "logstab/invariants.hpp"
#include "logstab/operators.hpp"
#include "logstab/semigroup.hpp"
#include "logstab/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace logstab;
using nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

harness::ExperimentConfig resolve_config(const std::string& path, const std::string& preset) {
    if (!path.empty()) return harness::load_config(path);
    return harness::preset_config(preset);
}

int cmd_wmap(double psi, double theta, int grid) {
    const conformal::StripGeometry geom(theta, psi);
    detail::require(grid >= 1, "grid must be >= 1");
    std::cout << "t,w,lower_bound,h\n";
    for (int i = 1; i <= grid; ++i) {
        const double t = theta * i / grid;
        std::cout << num(t) << ',' << num(conformal::w_real(t, geom)) << ',' << num(conformal::w_lower_bound(t, geom))
                  << ',' << num(conformal::boundary_map_h(t, geom)) << '\n';
    }
    return 0;
}

int cmd_angle(const std::string& drift) {
    const auto spec = harness::load_drift(drift);
    const auto rep = operators::analyticity(spec);
    json out{{"psi", rep.psi},
             {"gamma", rep.gamma},
             {"q_inf", harness::matrix_to_json(rep.gramian.q_inf)},
             {"lyapunov_residual", operators::lyapunov_residual(spec, rep.gramian)}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const std::string& drift, const std::vector<double>& times, const std::string& f,
                 const std::vector<double>& point, int order) {
    const semigroup::OUModel model(harness::load_drift(drift), order);
    if (static_cast<int>(point.size()) != model.dims()) {
        detail::fail(ErrorKind::dimension_mismatch, "--x needs " + std::to_string(model.dims()) + " coordinates");
    }
    const auto field = semigroup::named_test_function(f);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size()));
    std::cout << "t,value\n";
    for (double t : times) std::cout << num(t) << ',' << num(semigroup::kolmogorov_apply(model, t, field, x)) << '\n';
    return 0;
}

int cmd_bounds(double psi, double theta, double eps, double p, double s, double obs) {
    stability::StabilityParams params;
    params.theta = theta;
    params.eps = eps;
    params.p = p;
    params.s = s;
    const conformal::StripGeometry geom(theta, psi);
    const auto b = stability::stability_rhs(obs, params, geom, 1.0);
    json out{{"kernel", b.kernel},   {"exact", b.exact}, {"simplified", b.simplified},
             {"phi", geom.phi()},    {"c_psi", geom.c_psi()}, {"K1", 1.0}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_observability(const std::string& config_path, const std::string& preset, int n_times_override) {
    const auto config = resolve_config(config_path, preset);
    const auto gen = harness::build_generator(config.generator);
    const auto region = harness::build_region(config.region, gen);
    const int n_times = n_times_override > 0 ? n_times_override : config.time_grid.n_times;
    const auto est = harness::estimate_observability(gen, region, config.geometry.theta, n_times);
    json out{{"kappa_obs", est.kappa_obs}, {"kappa_adm", est.kappa_adm}, {"conditioning", est.conditioning},
             {"n_times", n_times},         {"cover_ok", est.cover_ok},   {"dim", gen.dim()},
             {"config_hash", harness::config_hash(config)}};
    if (!est.warning.empty()) out["warning"] = est.warning;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_experiment(const std::string& mode, const std::string& config_path, const std::string& preset,
                   const std::string& csv_path, const std::string& json_path, int threads) {
    auto config = resolve_config(config_path, preset);
    if (threads >= 0) config.ensemble.threads = threads;
    const auto report = harness::run_experiment(harness::parse_mode(mode), config);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        detail::require(csv.good(), "cannot write " + csv_path);
        harness::write_csv(report, csv);
    }
    const auto summary = harness::summary_json(report).dump(2);
    if (!json_path.empty()) {
        std::ofstream js(json_path);
        detail::require(js.good(), "cannot write " + json_path);
        js << summary << '\n';
    }
    std::cout << summary << '\n';
    return report.complete() ? 0 : 1;
}

int cmd_verify(bool quick, int threads) {
    invariants::SuiteOptions options;
    options.quick = quick;
    options.threads = threads < 0 ? 0 : threads;
    int failed = 0;
    for (const auto& r : invariants::run_invariant_suite(options)) {
        std::printf("%s %-28s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%d check(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic-convexity and conditional-stability toolkit for analytic semigroups"};
    app.require_subcommand(1);

    double psi = 0.7853981633974483, theta = 1.0, eps = 0.5, p = 1.5, s = 0.2, obs = 1e-6;
    int grid = 50, order = 40, n_times = 0, threads = -1;
    bool quick = false;
    std::string drift, f = "x1", mode, config, preset = "heat", csv, json_out;
    std::vector<double> times{0.1, 0.5, 1.0}, point;

    auto* wmap = app.add_subcommand("wmap", "Harmonic weight w, its lower bound and the boundary map h as CSV");
    wmap->add_option("--psi", psi, "analyticity angle in (0, pi/2]");
    wmap->add_option("--theta", theta, "final time");
    wmap->add_option("--grid", grid, "number of points in (0, theta]");

    auto* angle = app.add_subcommand("angle", "Analyticity angle and invariant Gramian of an OU drift");
    angle->add_option("--drift", drift, "matrix JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "Evaluate T(t)f(x) through Kolmogorov's formula");
    simulate->add_option("--drift", drift, "matrix JSON file")->required();
    simulate->add_option("--t", times, "times")->delimiter(',');
    simulate->add_option("--f", f, "one | x1 | x1sq | poly4 | gauss | cos");
    simulate->add_option("--x", point, "point")->delimiter(',')->required();
    simulate->add_option("--order", order, "Gauss-Hermite nodes per dimension");

    auto* bounds = app.add_subcommand("bounds", "Stability right-hand side in exact and simplified form (K1 = 1)");
    bounds->add_option("--psi", psi, "analyticity angle");
    bounds->add_option("--theta", theta, "final time");
    bounds->add_option("--eps", eps, "fractional order");
    bounds->add_option("--p", p, "exponent p in (1, 1/(1-eps))");
    bounds->add_option("--s", s, "exponent s in (0, 1-1/p)");
    bounds->add_option("--obs", obs, "observation norm in (0, 1)");

    auto* observability = app.add_subcommand("observability", "Estimate observability and admissibility constants");
    observability->add_option("--config", config, "experiment config JSON");
    observability->add_option("--preset", preset, "heat | ou | ou-slabs (when no config is given)");
    observability->add_option("--n-times", n_times, "override the number of time nodes");

    auto* experiment = app.add_subcommand("experiment", "Run an ensemble experiment");
    experiment->add_option("--mode", mode, "logconvexity | stability")->required();
    experiment->add_option("--config", config, "experiment config JSON");
    experiment->add_option("--preset", preset, "heat | ou | ou-slabs (when no config is given)");
    experiment->add_option("--csv", csv, "per-record CSV output");
    experiment->add_option("--json", json_out, "summary JSON output");
    experiment->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* verify = app.add_subcommand("verify", "Run the invariant suite; nonzero exit on any violation");
    verify->add_flag("--quick", quick, "smaller ensembles");
    verify->add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*wmap) return cmd_wmap(psi, theta, grid);
        if (*angle) return cmd_angle(drift);
        if (*simulate) return cmd_simulate(drift, times, f, point, order);
        if (*bounds) return cmd_bounds(psi, theta, eps, p, s, obs);
        if (*observability) return cmd_observability(config, preset, n_times);
        if (*experiment) return cmd_experiment(mode, config, preset, csv, json_out, threads);
        if (*verify) return cmd_verify(quick, threads);
    } catch (const std::exception& e) {
        // Library errors already carry their kind as a prefix.
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
