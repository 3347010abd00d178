#include "pathlab/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "pathlab/action.hpp"

namespace pathlab {

std::string_view to_string(ObservableId id) noexcept {
    switch (id) {
        case ObservableId::MidpointSq: return "MIDPOINT_SQ";
        case ObservableId::MeanSq: return "MEAN_SQ";
        case ObservableId::Endpoint: return "ENDPOINT";
        case ObservableId::MeanPath: return "MEAN_PATH";
    }
    return "UNKNOWN";
}

ObservableId parse_observable(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto id : {ObservableId::MidpointSq, ObservableId::MeanSq, ObservableId::Endpoint,
                    ObservableId::MeanPath})
        if (upper == to_string(id)) return id;
    throw std::invalid_argument("unknown observable '" + std::string(text) + "'");
}

std::size_t observable_dim(ObservableId id, const Lattice& lattice) noexcept {
    return id == ObservableId::MeanPath ? lattice.n_nodes() : 1;
}

std::vector<double> evaluate_observable(std::span<const double> path, ObservableId id,
                                        const Lattice& lattice) {
    if (path.size() != lattice.n_nodes())
        throw std::invalid_argument("observable path length does not match the lattice");
    switch (id) {
        case ObservableId::MidpointSq: {
            if (lattice.N() % 2 != 0)
                throw std::invalid_argument("MIDPOINT_SQ needs an even step count N");
            const double mid = path[lattice.N() / 2];
            return {mid * mid};
        }
        case ObservableId::MeanSq: {
            double s = 0.0;
            for (std::size_t i = 0; i < lattice.N(); ++i) s += path[i] * path[i];
            return {s * lattice.epsilon() / (2.0 * lattice.T())};
        }
        case ObservableId::Endpoint: return {path.back()};
        case ObservableId::MeanPath: return {path.begin(), path.end()};
    }
    return {};
}

std::vector<double> evaluate_observable(const Path& path, ObservableId id, const Lattice& lattice) {
    return evaluate_observable(path.view(), id, lattice);
}

namespace {

double block_standard_error(std::span<const double> x, std::size_t block) {
    const std::size_t m = x.size() / block;
    if (m < 2) return 0.0;
    std::vector<double> means(m);
    for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < block; ++j) s += x[k * block + j];
        means[k] = s / static_cast<double>(block);
    }
    const double mu = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(m);
    double ss = 0.0;
    for (double v : means) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
}

}  // namespace

BlockedError blocked_error(std::span<const double> samples) {
    if (samples.size() < kMinEstimatorSamples)
        throw std::invalid_argument("estimate needs at least 16 samples");
    const std::size_t max_block = samples.size() / kMinEstimatorSamples;
    std::size_t block = 1;
    double se = block_standard_error(samples, block);
    if (se == 0.0) return {0.0, 1};
    while (2 * block <= max_block) {
        const double next = block_standard_error(samples, 2 * block);
        block *= 2;
        const bool plateau = std::abs(next - se) < 0.1 * se;
        se = next;
        if (plateau) break;
    }
    return {se, block};
}

EstimatorResult estimate(std::span<const double> samples, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("estimate needs dim >= 1");
    if (samples.size() % dim != 0)
        throw std::invalid_argument("sample buffer is not a whole number of rows");
    const std::size_t n = samples.size() / dim;
    if (n < kMinEstimatorSamples) throw std::invalid_argument("estimate needs at least 16 samples");

    EstimatorResult r;
    r.n_samples = n;
    r.mean.resize(dim);
    r.std_error.resize(dim);
    r.block_size = 1;
    std::vector<double> column(n);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < n; ++i) column[i] = samples[i * dim + d];
        r.mean[d] = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
        const auto be = blocked_error(column);
        r.std_error[d] = be.std_error;
        r.block_size = std::max(r.block_size, be.block_size);
    }
    return r;
}

namespace {

std::vector<double> z_scores(const EstimatorResult& e1, const EstimatorResult& e2) {
    if (e1.mean.size() != e2.mean.size())
        throw std::invalid_argument("compare needs estimates of the same shape");
    std::vector<double> z(e1.mean.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double diff = e1.mean[i] - e2.mean[i];
        const double se = std::hypot(e1.std_error[i], e2.std_error[i]);
        if (se == 0.0) {
            if (diff != 0.0)
                throw DegenerateComparisonError(
                    "both standard errors are zero but the means differ");
            z[i] = 0.0;
        } else {
            z[i] = diff / se;
        }
    }
    return z;
}

Comparison worst(const std::vector<double>& z) {
    Comparison c;
    for (double v : z)
        if (std::abs(v) > std::abs(c.z)) c.z = v;
    c.pass = std::abs(c.z) < kPassSigma;
    return c;
}

// Row-major observable samples for a collection of paths.
std::vector<double> observable_stream(const std::vector<Path>& paths, ObservableId id,
                                      const Lattice& lattice) {
    const std::size_t dim = observable_dim(id, lattice);
    std::vector<double> out;
    out.reserve(paths.size() * dim);
    for (const auto& p : paths) {
        const auto v = evaluate_observable(p, id, lattice);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

}  // namespace

Comparison compare(const EstimatorResult& e1, const EstimatorResult& e2) {
    return worst(z_scores(e1, e2));
}

EquivalenceReport equivalence_experiment(const Lattice& lattice, const ModelParams& params,
                                         Branch branch, const SamplerConfig& config,
                                         const std::vector<ObservableId>& observables) {
    const SampleBatch mapped = sample_mapped_batch(lattice, params, branch, config);
    const SampleBatch chain = run_metropolis(lattice, params, branch, config);

    EquivalenceReport report;
    report.branch = branch;
    report.n_blowups = mapped.n_rejected_blowups;
    report.acceptance_rate = chain.acceptance_rate;
    report.proposal_width = config.proposal_width;
    for (const auto id : observables) {
        const std::size_t dim = observable_dim(id, lattice);
        EquivalenceRow row{id,
                           estimate(observable_stream(mapped.paths, id, lattice), dim),
                           estimate(observable_stream(chain.paths, id, lattice), dim),
                           {},
                           {}};
        row.z = z_scores(row.mapped, row.metropolis);
        row.comparison = worst(row.z);
        report.all_pass = report.all_pass && row.comparison.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

Path sweep_reference(const Lattice& lattice, const ModelParams& params, Branch branch, double x0) {
    if (branch == Branch::Plus) return kink_path(make_kink(params, lattice.T(), -x0), lattice);
    // A-(-phi) = A+(phi): the MINUS limit is the reflected PLUS limit from -x0
    return kink_path(make_kink(params, lattice.T(), x0), lattice).negated();
}

SweepReport hbar_sweep(const Lattice& lattice, const ModelParams& params, Branch branch,
                       const std::vector<double>& hbar_list, const SamplerConfig& config) {
    if (hbar_list.empty()) throw std::invalid_argument("hbar_list must not be empty");
    for (std::size_t i = 0; i < hbar_list.size(); ++i) {
        if (!(hbar_list[i] > 0.0)) throw std::invalid_argument("hbar_list entries must be positive");
        if (i > 0 && !(hbar_list[i] < hbar_list[i - 1]))
            throw std::invalid_argument("hbar_list must be strictly decreasing");
    }

    SweepReport report;
    report.branch = branch;
    report.kink = sweep_reference(lattice, params, branch, config.x0);
    const std::size_t nodes = lattice.n_nodes();
    const double a = params.a();

    for (const double hbar : hbar_list) {
        const ModelParams p = params.with_hbar(hbar);
        std::vector<double> sum(nodes, 0.0);
        std::vector<double> sum_sq(nodes, 0.0);
        const auto summary =
            for_each_mapped_path(lattice, p, branch, config, [&](std::span<const double> path) {
                for (std::size_t i = 0; i < nodes; ++i) {
                    sum[i] += path[i];
                    sum_sq[i] += path[i] * path[i];
                }
            });
        const auto n = static_cast<double>(summary.n_accepted);

        SweepRow row;
        row.hbar = hbar;
        row.n_blowups = summary.n_rejected_blowups;
        std::vector<double> mean(nodes);
        row.mean_path_std_error.resize(nodes);
        double dev = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            mean[i] = sum[i] / n;
            const double var = std::max(0.0, sum_sq[i] / n - mean[i] * mean[i]);
            row.mean_path_std_error[i] = n > 1.0 ? std::sqrt(var / (n - 1.0)) : 0.0;
            dev += (mean[i] - report.kink[i]) * (mean[i] - report.kink[i]);
        }
        row.mean_path = Path(std::move(mean));
        row.rms_dev_from_kink = std::sqrt(dev / static_cast<double>(nodes));

        const auto el7 = residual(row.mean_path, EquationId::ElSymmetric, lattice, p);
        const auto el9 = residual(row.mean_path, EquationId::ElBroken, lattice, p);
        for (double r : el7) row.max_el7_residual = std::max(row.max_el7_residual, std::abs(r));
        for (double r : el9) row.mean_el9_residual += std::abs(r);
        row.mean_el9_residual /= static_cast<double>(el9.size());
        report.rows.push_back(std::move(row));
    }

    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (!(report.rows[i].rms_dev_from_kink < report.rows[i - 1].rms_dev_from_kink))
            report.rms_strictly_decreasing = false;
    const auto& last = report.rows.back();
    report.el7_small = last.max_el7_residual < a / 5.0;
    report.el9_offset_matches = std::abs(last.mean_el9_residual - a) <= 0.2 * a;
    return report;
}

ItoCheckReport ito_check(const Lattice& lattice, const ModelParams& params,
                         const SamplerConfig& config) {
    config.validate();
    StreamRng rng(config.seed, static_cast<std::uint64_t>(RngStream::Ito), 0);
    const std::size_t n = config.n_samples;
    const double eps = lattice.epsilon();
    std::vector<double> qv(n), drift(n), diff(n);

    ItoCheckReport report;
    report.n_paths = n;
    for (std::size_t k = 0; k < n; ++k) {
        const Path phi = sample_wiener_path(lattice, params, config, rng);
        report.max_relative_identity_residual =
            std::max(report.max_relative_identity_residual,
                     discrete_ito_identity_relative_residual(phi));
        double q = 0.0;
        double d = 0.0;
        for (std::size_t i = 0; i < lattice.N(); ++i) {
            const double inc = phi[i + 1] - phi[i];
            q += phi[i] * inc * inc;
            d += phi[i];
        }
        qv[k] = q;
        drift[k] = params.hbar() * eps * d;
        diff[k] = qv[k] - drift[k];
    }
    report.quadratic_variation_term = estimate(qv);
    report.drift_term = estimate(drift);
    report.difference = estimate(diff);
    const double se = report.difference.std_error[0];
    report.z = se > 0.0 ? report.difference.mean[0] / se : 0.0;
    report.identity_pass = report.max_relative_identity_residual < kItoIdentityTolerance;
    report.statistical_pass = std::abs(report.z) < kPassSigma;
    return report;
}

}  // namespace pathlab
