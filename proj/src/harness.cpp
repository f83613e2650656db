#include "logstab/harness.hpp"

#include "logstab/conformal.hpp"
#include "logstab/errors.hpp"
#include "logstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace logstab::harness {

using operators::DiscreteGenerator;

namespace {

constexpr double kSlack = 1e-9;

// Runs body(i) for i in [0, count) on up to `threads` workers. Returns the
// message of the first failure; indices already finished keep their results.
template <typename Body>
std::optional<std::string> parallel_for(int count, int threads, Body body) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    std::mutex guard;
    std::optional<std::string> failure;
    auto run = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            {
                std::lock_guard lock(guard);
                if (failure) return;
            }
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard lock(guard);
                if (!failure) failure = "sample " + std::to_string(i) + ": " + e.what();
                return;
            }
        }
    };
    if (threads <= 1) {
        run(0, count);
        return failure;
    }
    std::vector<std::jthread> pool;
    const int chunk = (count + threads - 1) / threads;
    for (int b = 0; b < count; b += chunk) pool.emplace_back(run, b, std::min(count, b + chunk));
    pool.clear();
    return failure;
}

// Upper-triangular C with ‖C u‖² = Σ_q w_q 𝟙_ω(x_q) |(Φu)_q|².
Eigen::MatrixXd observation_factor(const operators::ObservationNodes& nodes, const std::vector<bool>& mask) {
    const auto dim = nodes.basis_values.cols();
    Eigen::Index kept = 0;
    for (bool m : mask) kept += m ? 1 : 0;
    if (kept == 0) return Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd rows(kept, dim);
    Eigen::Index r = 0;
    for (Eigen::Index q = 0; q < nodes.basis_values.rows(); ++q) {
        if (!mask[static_cast<std::size_t>(q)]) continue;
        rows.row(r++) = std::sqrt(nodes.weights(q)) * nodes.basis_values.row(q);
    }
    if (kept < dim) {
        Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(dim, dim);
        padded.topRows(kept) = rows;
        return padded;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows);
    return qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
}

} // namespace

ObservationOperator build_observation_operator(const DiscreteGenerator& gen, const ObservationRegion& region,
                                               double theta, int n_times) {
    detail::require(theta > 0.0, "theta must be > 0");
    detail::require(n_times >= 2, "n_times must be >= 2");
    const auto& nodes = gen.nodes();
    if (nodes.basis_values.size() == 0) {
        detail::fail(ErrorKind::dimension_mismatch, "generator carries no observation nodes");
    }
    ObservationOperator op;
    op.mask = region.mask_for(nodes.points);
    const Eigen::MatrixXd factor = observation_factor(nodes, op.mask);
    const int dim = gen.dim();
    op.stacked.resize(static_cast<Eigen::Index>(n_times) * dim, dim);
    const double h = theta / (n_times - 1);
    for (int i = 0; i < n_times; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == n_times - 1) ? 0.5 * h : h;
        op.t_grid.push_back(t);
        op.weights.push_back(w);
        const Eigen::MatrixXd e = i == 0 ? Eigen::MatrixXd::Identity(dim, dim) : operators::semigroup_matrix(gen, t);
        op.stacked.middleRows(static_cast<Eigen::Index>(i) * dim, dim) = std::sqrt(w) * factor * e;
    }
    op.final_map = operators::semigroup_matrix(gen, theta);
    return op;
}

double domain_radius(const DiscreteGenerator& gen) {
    if (const auto* ou = gen.ou()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(2.0 * ou->gramian.q_inf);
        return 8.0 * std::sqrt(es.eigenvalues().maxCoeff());
    }
    const auto& pts = gen.nodes().points;
    return pts.size() == 0 ? 1.0 : std::max(1.0, pts.cwiseAbs().maxCoeff());
}

ObservabilityEstimate estimate_observability(const DiscreteGenerator& gen, const ObservationRegion& region,
                                             double theta, int n_times) {
    const auto op = build_observation_operator(gen, region, theta, n_times);
    ObservabilityEstimate est;
    est.t_grid = op.t_grid;
    est.cover_ok = region_satisfies_cover(region, domain_radius(gen));
    if (!est.cover_ok) est.warning = "region fails the cover condition on the truncated domain";

    Eigen::BDCSVD<Eigen::MatrixXd> svd(op.stacked, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    est.conditioning = sv.minCoeff();
    est.kappa_adm = sv.maxCoeff();
    if (!(est.conditioning >= 1e-13)) {
        detail::fail(ErrorKind::degenerate_observation,
                     "smallest singular value of the observation map is " + std::to_string(est.conditioning) +
                         " (< 1e-13); kappa_obs unbounded");
    }
    const Eigen::MatrixXd pinv_dir = svd.matrixV() * sv.cwiseInverse().asDiagonal();
    est.kappa_obs = operators::spectral_norm(op.final_map * pinv_dir);
    return est;
}

std::vector<Eigen::VectorXd> sample_admissible(const DiscreteGenerator& gen, double eps, double M, int count,
                                               std::uint64_t seed) {
    detail::require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    detail::require(M > 0.0, "M must be > 0");
    detail::require(count >= 0, "count must be >= 0");
    const Eigen::MatrixXd power = operators::fractional_power(gen, eps);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    const int dim = gen.dim();
    while (static_cast<int>(out.size()) < count) {
        Eigen::VectorXd z(dim);
        for (int k = 0; k < dim; ++k) z(k) = normal(rng);
        const double norm = (power * z).norm();
        const double fraction = uniform(rng);
        if (!(norm > 0.0)) continue;
        out.push_back((fraction * M / norm) * z);
    }
    return out;
}

Eigen::MatrixXd random_stable_drift(std::mt19937_64& rng, int n) {
    detail::require(n >= 1, "dimension must be >= 1");
    std::uniform_real_distribution<double> re(-3.0, -0.1);
    std::uniform_real_distribution<double> im(0.0, 3.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n;) {
        if (k + 1 < n && coin(rng) < 0.5) {
            const double a = re(rng);
            const double b = im(rng);
            d(k, k) = a;
            d(k + 1, k + 1) = a;
            d(k, k + 1) = b;
            d(k + 1, k) = -b;
            k += 2;
        } else {
            d(k, k) = re(rng);
            k += 1;
        }
    }
    for (;;) {
        Eigen::MatrixXd v(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) v(i, j) = normal(rng);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
        const auto& s = svd.singularValues();
        if (s(n - 1) > 0.0 && s(0) / s(n - 1) < 50.0) return v * d * v.inverse();
    }
}

Eigen::MatrixXd random_symmetric_drift(std::mt19937_64& rng, int n) {
    detail::require(n >= 1, "dimension must be >= 1");
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> re(-3.0, -0.1);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) diag(i) = re(rng);
    Eigen::MatrixXd b = q * diag.asDiagonal() * q.transpose();
    return 0.5 * (b + b.transpose());
}

DiscreteGenerator build_generator(const GeneratorConfig& config) {
    if (config.type == "heat") return operators::build_heat_generator(config.n, config.length);
    if (config.type == "ou") {
        detail::require(config.drift.size() != 0, "generator.drift is required for type ou");
        const auto spec = config.diffusion.size() != 0 ? operators::DriftSpec(config.drift, config.diffusion)
                                                       : operators::DriftSpec(config.drift);
        return operators::build_ou_generator(spec, config.order);
    }
    if (config.type == "custom") {
        detail::require(config.matrix.size() != 0, "generator.matrix is required for type custom");
        const auto n = config.matrix.rows();
        operators::ObservationNodes nodes;
        nodes.points = Eigen::RowVectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
        nodes.weights = Eigen::VectorXd::Ones(n);
        nodes.basis_values = Eigen::MatrixXd::Identity(n, n);
        return operators::make_custom_generator(config.matrix, config.psi, std::move(nodes));
    }
    detail::fail(ErrorKind::invalid_argument, "unknown generator type '" + config.type + "'");
}

ObservationRegion build_region(const RegionConfig& config, const DiscreteGenerator& gen) {
    if (config.kind == "full") return ObservationRegion::full();
    if (config.kind == "slabs") return ObservationRegion::slabs(config.slabs, config.r, config.delta);
    const auto& pts = gen.nodes().points;
    if (config.kind == "ball") {
        Eigen::VectorXd centre = config.centre.size() == 0 ? Eigen::VectorXd::Zero(pts.rows()) : config.centre;
        if (centre.size() != pts.rows()) detail::fail(ErrorKind::dimension_mismatch, "ball centre dimension");
        std::vector<bool> mask(static_cast<std::size_t>(pts.cols()));
        for (Eigen::Index q = 0; q < pts.cols(); ++q) {
            mask[static_cast<std::size_t>(q)] = (pts.col(q) - centre).norm() <= config.radius;
        }
        return ObservationRegion::custom(pts, std::move(mask), config.r, config.delta);
    }
    if (config.kind == "mask") return ObservationRegion::custom(pts, config.mask, config.r, config.delta);
    detail::fail(ErrorKind::invalid_argument, "unknown region kind '" + config.kind + "'");
}

namespace {

struct Setup {
    DiscreteGenerator gen;
    conformal::StripGeometry geom;
    std::vector<Eigen::VectorXd> samples;
    double l2_radius;
};

Setup prepare(const ExperimentConfig& config) {
    auto gen = build_generator(config.generator);
    const double psi = config.geometry.psi.value_or(gen.psi());
    conformal::StripGeometry geom(config.geometry.theta, psi);
    const auto& sp = config.stability;
    auto samples = sample_admissible(gen, sp.eps, sp.M, config.ensemble.count, config.ensemble.seed);
    const double l2_radius = sp.M * operators::spectral_norm(operators::fractional_power(gen, -sp.eps));
    return Setup{std::move(gen), geom, std::move(samples), l2_radius};
}

void fill_common(ReportSummary& s, const Setup& setup) {
    s.psi = setup.geom.psi();
    s.phi = setup.geom.phi();
    s.c_psi = setup.geom.c_psi();
    s.K = setup.gen.sector_K();
    s.kappa = setup.gen.sector_kappa();
    s.l2_radius = setup.l2_radius;
}

void run_logconvexity(const ExperimentConfig& config, const Setup& setup, ExperimentReport& report) {
    const auto& gen = setup.gen;
    const auto& geom = setup.geom;
    const double theta = geom.theta();
    const double K = gen.sector_K();
    const double kappa = gen.sector_kappa();
    // ‖u₀‖ <= M is the hypothesis; the admissible set only guarantees the L² radius.
    const double m_bound = std::max(config.stability.M, setup.l2_radius);
    const int n_eval = config.time_grid.n_eval;

    std::vector<double> ts(static_cast<std::size_t>(n_eval)), ws(ts.size()), wls(ts.size());
    std::vector<Eigen::MatrixXd> flows(ts.size());
    for (int j = 0; j < n_eval; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        ts[jj] = theta * (j + 1) / n_eval;
        ws[jj] = conformal::w_real(ts[jj], geom);
        wls[jj] = conformal::w_lower_bound(ts[jj], geom);
        flows[jj] = operators::semigroup_matrix(gen, ts[jj]);
    }
    const Eigen::MatrixXd final_map = operators::semigroup_matrix(gen, theta);

    const int count = static_cast<int>(setup.samples.size());
    std::vector<std::vector<LogconvexityRecord>> rows(static_cast<std::size_t>(count));
    std::vector<char> done(static_cast<std::size_t>(count), 0);
    auto failure = parallel_for(count, config.ensemble.threads, [&](int i) {
        const auto& u0 = setup.samples[static_cast<std::size_t>(i)];
        const double fin = (final_map * u0).norm();
        auto& out = rows[static_cast<std::size_t>(i)];
        for (int j = 0; j < n_eval; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            LogconvexityRecord r;
            r.sample_id = i;
            r.t = ts[jj];
            r.w = ws[jj];
            r.w_lower = wls[jj];
            r.actual = (flows[jj] * u0).norm();
            r.final_norm = fin;
            r.bound = stability::logconvexity_bound(r.t, r.w, m_bound, fin, K, kappa, theta);
            r.bound_surrogate = stability::logconvexity_bound(r.t, r.w_lower, m_bound, fin, K, kappa, theta);
            r.ratio = r.bound / r.actual;
            out.push_back(r);
        }
        done[static_cast<std::size_t>(i)] = 1;
    });

    auto& s = report.summary;
    for (int i = 0; i < count; ++i) {
        if (!done[static_cast<std::size_t>(i)]) continue;
        for (const auto& r : rows[static_cast<std::size_t>(i)]) {
            const double excess = r.actual - r.bound;
            const double surrogate_excess = r.actual - r.bound_surrogate;
            s.max_violation = std::max(s.max_violation, excess);
            s.max_surrogate_violation = std::max(s.max_surrogate_violation, surrogate_excess);
            if (excess > kSlack) ++s.violations;
            if (surrogate_excess > kSlack) ++s.surrogate_violations;
            report.logconvexity.push_back(r);
        }
    }
    if (failure) report.errors.push_back(*failure);
}

void run_stability(const ExperimentConfig& config, const Setup& setup, ExperimentReport& report) {
    const auto& gen = setup.gen;
    const auto& geom = setup.geom;
    auto& s = report.summary;

    const auto region = build_region(config.region, gen);
    const auto est = estimate_observability(gen, region, geom.theta(), config.time_grid.n_times);
    const auto op = build_observation_operator(gen, region, geom.theta(), config.time_grid.n_times);
    s.kappa_obs = est.kappa_obs;
    s.kappa_adm = est.kappa_adm;
    s.conditioning = est.conditioning;
    s.cover_ok = est.cover_ok;

    stability::StabilityParams params = config.stability;
    params.theta = geom.theta();
    params.K = gen.sector_K();
    params.kappa = gen.sector_kappa();
    params.kappa_obs = est.kappa_obs;
    params.kappa_adm = est.kappa_adm;
    if (const auto bad = stability::validate_params(params); !bad.empty()) {
        std::string names;
        for (const auto& v : bad) names += (names.empty() ? "" : ", ") + v.name;
        detail::fail(ErrorKind::invalid_argument, "stability parameters violate: " + names);
    }
    const double s_over_p = params.s / params.p;
    s.s_over_p = s_over_p;
    const Eigen::MatrixXd power = operators::fractional_power(gen, params.eps);

    const int count = static_cast<int>(setup.samples.size());
    const auto& amps = config.ensemble.amplitudes;
    const int total = count * static_cast<int>(amps.size());
    std::vector<StabilityRecord> rows(static_cast<std::size_t>(total));
    std::vector<char> done(rows.size(), 0);
    auto failure = parallel_for(total, config.ensemble.threads, [&](int id) {
        const auto level = static_cast<std::size_t>(id / count);
        const Eigen::VectorXd u0 = amps[level] * setup.samples[static_cast<std::size_t>(id % count)];
        StabilityRecord r;
        r.sample_id = id;
        r.amplitude = amps[level];
        r.init_norm = u0.norm();
        r.frac_norm = (power * u0).norm();
        r.obs_norm = (op.stacked * u0).norm();
        r.final_norm = (op.final_map * u0).norm();
        if (r.obs_norm > 0.0 && r.obs_norm < 1.0) {
            r.kernel = stability::stability_rhs(r.obs_norm, params, geom, 1.0).kernel;
            r.ratio = r.init_norm / std::pow(r.kernel, s_over_p);
        } else {
            r.skipped = true;
        }
        rows[static_cast<std::size_t>(id)] = r;
        done[static_cast<std::size_t>(id)] = 1;
    });

    s.levels.resize(amps.size());
    for (std::size_t l = 0; l < amps.size(); ++l) s.levels[l].amplitude = amps[l];
    std::vector<const StabilityRecord*> used;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!done[i]) continue;
        const auto& r = rows[i];
        report.stability.push_back(r);
        const double excess = r.final_norm - est.kappa_obs * r.obs_norm;
        s.max_violation = std::max(s.max_violation, excess);
        if (excess > kSlack) ++s.violations;
        if (r.obs_norm > est.kappa_adm * r.init_norm + kSlack) ++s.admissibility_violations;
        if (r.skipped) {
            ++s.skipped;
            continue;
        }
        auto& level = s.levels[i / static_cast<std::size_t>(count)];
        level.empirical_K1 = std::max(level.empirical_K1, r.ratio);
        ++level.used;
        s.empirical_K1 = std::max(s.empirical_K1.value_or(0.0), r.ratio);
        used.push_back(&r);
    }
    // Pointers into rows, which is no longer resized.
    std::sort(used.begin(), used.end(), [](auto a, auto b) { return a->obs_norm < b->obs_norm; });
    for (std::size_t i = 1; i < used.size(); ++i) {
        const double gap = used[i]->obs_norm - used[i - 1]->obs_norm;
        const bool distinct = gap > 1e-12 * used[i]->obs_norm;
        if (distinct ? !(used[i]->kernel > used[i - 1]->kernel) : used[i]->kernel < used[i - 1]->kernel) {
            s.kernel_monotone = false;
        }
    }
    if (!s.levels.empty() && s.levels.front().used > 0 && s.levels.front().empirical_K1 > 0.0) {
        double top = 0.0;
        for (const auto& l : s.levels) top = std::max(top, l.empirical_K1);
        s.k1_spread = top / s.levels.front().empirical_K1;
    }
    if (failure) report.errors.push_back(*failure);
}

} // namespace

ExperimentReport run_experiment(ExperimentMode mode, const ExperimentConfig& config) {
    ExperimentReport report;
    report.mode = mode;
    report.seed = config.ensemble.seed;
    report.config_hash = config_hash(config);
    const auto setup = prepare(config);
    fill_common(report.summary, setup);
    report.summary.s_over_p = config.stability.s / config.stability.p;
    if (mode == ExperimentMode::logconvexity) {
        run_logconvexity(config, setup, report);
    } else {
        run_stability(config, setup, report);
    }
    return report;
}

} // namespace logstab::harness
