#include "pathlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "pathlab/action.hpp"
#include "pathlab/kernels/kernels.hpp"

namespace pathlab {

void SamplerConfig::validate() const {
    if (n_samples < 1) throw std::invalid_argument("sampler.n_samples must be at least 1");
    if (n_thin < 1) throw std::invalid_argument("sampler.n_thin must be at least 1");
    if (!(proposal_width > 0.0) || !std::isfinite(proposal_width))
        throw std::invalid_argument("sampler.proposal_width must be positive");
    if (!std::isfinite(x0)) throw std::invalid_argument("sampler.x0 must be finite");
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("sampler.blowup_threshold must be positive");
    if (!(max_blowup_fraction >= 0.0))
        throw std::invalid_argument("sampler.max_blowup_fraction must be non-negative");
    if (n_chains < 1) throw std::invalid_argument("sampler.n_chains must be at least 1");
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
}

BlowupBudgetError::BlowupBudgetError(std::size_t rejected, std::size_t accepted,
                                     std::size_t requested)
    : std::runtime_error("mapped sampler rejected " + std::to_string(rejected) +
                         " blown-up draws while collecting " + std::to_string(accepted) + " of " +
                         std::to_string(requested) +
                         " paths; the blowup budget is exceeded, parameters are outside the "
                         "safe regime"),
      rejected_(rejected),
      accepted_(accepted) {}

std::size_t resolve_threads(std::size_t requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

// Runs task(0..n-1) on up to `threads` workers; tasks must write disjoint state.
template <typename Task>
void run_tasks(std::size_t n, std::size_t threads, Task&& task) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) task(i);
        });
    }
}

}  // namespace

Path sample_wiener_path(const Lattice& lattice, const ModelParams& params,
                        const SamplerConfig& config, StreamRng& rng) {
    const double sd = std::sqrt(params.hbar() * lattice.epsilon());
    std::vector<double> chi(lattice.n_nodes());
    chi[0] = config.x0;
    for (std::size_t i = 0; i < lattice.N(); ++i) chi[i + 1] = chi[i] + sd * rng.normal();
    return Path(std::move(chi));
}

namespace {

struct ChunkResult {
    std::vector<double> nodes;  // accepted paths, row-major, n_nodes each
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool over_budget = false;
};

ChunkResult mapped_chunk(const Lattice& lattice, const ModelParams& params, Branch branch,
                         const SamplerConfig& config, std::size_t chunk, std::size_t quota,
                         std::size_t reject_limit) {
    using kernels::kLanes;
    const std::size_t steps = lattice.N();
    const std::size_t nodes = lattice.n_nodes();
    const double sd = std::sqrt(params.hbar() * lattice.epsilon());
    const double coef = branch_sign(branch) * params.a() * lattice.epsilon();
    const double b2 = params.beta_sq();
    const auto& kt = kernels::active();

    StreamRng rng(config.seed, static_cast<std::uint64_t>(RngStream::Wiener), chunk);
    std::vector<double> dchi(steps * kLanes);
    std::vector<double> out(nodes * kLanes);
    const double x0[kLanes] = {config.x0, config.x0, config.x0, config.x0};

    ChunkResult result;
    result.nodes.reserve(quota * nodes);
    while (result.accepted < quota) {
        // increments are drawn path by path so the stream does not depend on kLanes layout
        for (std::size_t l = 0; l < kLanes; ++l)
            for (std::size_t s = 0; s < steps; ++s) dchi[s * kLanes + l] = sd * rng.normal();
        kt.inverse_map_lanes(dchi.data(), steps, x0, coef, b2, out.data());

        for (std::size_t l = 0; l < kLanes && result.accepted < quota; ++l) {
            bool ok = true;
            for (std::size_t i = 0; i < nodes; ++i) {
                const double v = out[i * kLanes + l];
                if (!std::isfinite(v) || std::abs(v) > config.blowup_threshold) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                if (++result.rejected > reject_limit) {
                    result.over_budget = true;
                    return result;
                }
                continue;
            }
            for (std::size_t i = 0; i < nodes; ++i) result.nodes.push_back(out[i * kLanes + l]);
            ++result.accepted;
        }
    }
    return result;
}

}  // namespace

MappedSummary for_each_mapped_path(const Lattice& lattice, const ModelParams& params,
                                   Branch branch, const SamplerConfig& config,
                                   const std::function<void(std::span<const double>)>& sink) {
    config.validate();
    const std::size_t nodes = lattice.n_nodes();
    const std::size_t n_chunks = (config.n_samples + kMappedChunk - 1) / kMappedChunk;
    const auto budget = static_cast<std::size_t>(
        std::floor(config.max_blowup_fraction * static_cast<double>(config.n_samples)));
    const std::size_t threads = resolve_threads(config.threads);

    MappedSummary summary;
    // chunks run in waves of `threads`, then drain to the sink in chunk order
    for (std::size_t first = 0; first < n_chunks; first += threads) {
        const std::size_t wave = std::min(threads, n_chunks - first);
        std::vector<ChunkResult> results(wave);
        run_tasks(wave, threads, [&](std::size_t w) {
            const std::size_t chunk = first + w;
            const std::size_t quota =
                std::min(kMappedChunk, config.n_samples - chunk * kMappedChunk);
            results[w] = mapped_chunk(lattice, params, branch, config, chunk, quota,
                                      budget - std::min(budget, summary.n_rejected_blowups));
        });
        for (auto& r : results) {
            summary.n_rejected_blowups += r.rejected;
            summary.n_accepted += r.accepted;
            if (r.over_budget || summary.n_rejected_blowups > budget)
                throw BlowupBudgetError(summary.n_rejected_blowups, summary.n_accepted,
                                        config.n_samples);
            for (std::size_t p = 0; p < r.accepted; ++p)
                sink(std::span<const double>(r.nodes.data() + p * nodes, nodes));
        }
    }
    return summary;
}

SampleBatch sample_mapped_batch(const Lattice& lattice, const ModelParams& params, Branch branch,
                                const SamplerConfig& config) {
    SampleBatch batch;
    batch.seed_used = config.seed;
    batch.paths.reserve(config.n_samples);
    const auto summary =
        for_each_mapped_path(lattice, params, branch, config, [&](std::span<const double> p) {
            batch.paths.emplace_back(std::vector<double>(p.begin(), p.end()));
        });
    batch.n_rejected_blowups = summary.n_rejected_blowups;
    return batch;
}

namespace {

struct ChainOutput {
    std::vector<Path> paths;
    std::size_t proposed = 0;
    std::size_t accepted = 0;
};

template <typename LocalDelta>
ChainOutput metropolis_chain(const Lattice& lattice, const ModelParams& params,
                             const SamplerConfig& config, double width, StreamRng& rng,
                             std::size_t n_burnin, std::size_t n_keep, bool store,
                             LocalDelta&& local_delta) {
    Path phi(lattice.n_nodes(), config.x0);
    const double inv_hbar = 1.0 / params.hbar();
    ChainOutput out;
    if (store) out.paths.reserve(n_keep);

    auto sweep = [&](bool measure) {
        for (std::size_t k = 1; k < phi.size(); ++k) {
            const double proposed = phi[k] + width * rng.normal();
            const double d_action = local_delta(phi, k, proposed);
            const double u = rng.uniform();
            const bool accept = d_action <= 0.0 || u < std::exp(-d_action * inv_hbar);
            if (accept) phi[k] = proposed;
            if (measure) {
                ++out.proposed;
                if (accept) ++out.accepted;
            }
        }
    };

    for (std::size_t s = 0; s < n_burnin; ++s) sweep(false);
    for (std::size_t n = 0; n < n_keep; ++n) {
        for (std::size_t t = 0; t < config.n_thin; ++t) sweep(true);
        if (store) out.paths.push_back(phi);
    }
    return out;
}

ChainOutput run_chain(const Lattice& lattice, const ModelParams& params, Branch branch,
                      const SamplerConfig& config, double width, StreamRng& rng,
                      std::size_t n_burnin, std::size_t n_keep, bool store,
                      MetropolisTarget target) {
    if (target == MetropolisTarget::Free) {
        return metropolis_chain(lattice, params, config, width, rng, n_burnin, n_keep, store,
                                [&](const Path& p, std::size_t k, double x) {
                                    return kinetic_local_delta(p, k, x, lattice);
                                });
    }
    return metropolis_chain(lattice, params, config, width, rng, n_burnin, n_keep, store,
                            [&](const Path& p, std::size_t k, double x) {
                                return exact_lattice_local_delta(p, k, x, branch, lattice, params);
                            });
}

}  // namespace

SampleBatch run_metropolis(const Lattice& lattice, const ModelParams& params, Branch branch,
                           const SamplerConfig& config, MetropolisTarget target) {
    config.validate();
    const std::size_t chains = std::min(config.n_chains, config.n_samples);
    std::vector<ChainOutput> outputs(chains);
    run_tasks(chains, resolve_threads(config.threads), [&](std::size_t c) {
        const std::size_t keep = config.n_samples / chains + (c < config.n_samples % chains ? 1 : 0);
        StreamRng rng(config.seed, static_cast<std::uint64_t>(RngStream::Metropolis), c);
        outputs[c] = run_chain(lattice, params, branch, config, config.proposal_width, rng,
                               config.n_burnin, keep, true, target);
    });

    SampleBatch batch;
    batch.seed_used = config.seed;
    batch.paths.reserve(config.n_samples);
    std::size_t proposed = 0;
    std::size_t accepted = 0;
    for (auto& o : outputs) {
        proposed += o.proposed;
        accepted += o.accepted;
        std::move(o.paths.begin(), o.paths.end(), std::back_inserter(batch.paths));
    }
    batch.acceptance_rate =
        proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
    return batch;
}

namespace {
constexpr std::size_t kPilotBurnin = 50;
constexpr std::size_t kPilotSweeps = 200;
constexpr double kTargetLow = 0.3;
constexpr double kTargetHigh = 0.6;
constexpr int kMaxTuningIterations = 30;
}  // namespace

double pilot_acceptance(const Lattice& lattice, const ModelParams& params, Branch branch,
                        const SamplerConfig& config, double width, std::uint64_t pilot_index,
                        MetropolisTarget target) {
    SamplerConfig pilot = config;
    pilot.n_thin = 1;
    StreamRng rng(config.seed, static_cast<std::uint64_t>(RngStream::Tuning), pilot_index);
    const auto out =
        run_chain(lattice, params, branch, pilot, width, rng, kPilotBurnin, kPilotSweeps, false, target);
    return static_cast<double>(out.accepted) / static_cast<double>(out.proposed);
}

double tune_proposal(const Lattice& lattice, const ModelParams& params, Branch branch,
                     const SamplerConfig& config, MetropolisTarget target) {
    // the free-theory optimum is of order sqrt(hbar * eps); bracket generously around it
    const double scale = std::sqrt(params.hbar() * lattice.epsilon());
    double log_lo = std::log(scale * 1e-3);
    double log_hi = std::log(scale * 1e2);
    double last = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < kMaxTuningIterations; ++it) {
        const double log_mid = 0.5 * (log_lo + log_hi);
        const double width = std::exp(log_mid);
        last = pilot_acceptance(lattice, params, branch, config, width,
                                static_cast<std::uint64_t>(it), target);
        if (last > kTargetHigh) {
            log_lo = log_mid;
        } else if (last < kTargetLow) {
            log_hi = log_mid;
        } else {
            return width;
        }
    }
    throw TuningError("proposal tuning did not reach acceptance in [0.3, 0.6] after 30 "
                      "iterations (last acceptance " + std::to_string(last) + ")");
}

}  // namespace pathlab
