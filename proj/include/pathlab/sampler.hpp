#pragma once

// Two independent routes to the interacting path measure exp(-S/hbar):
//  * mapped: Wiener increments for chi pushed through inverse_map;
//  * Metropolis: single-site random walk on phi under the EXACT_LATTICE action.
// Both pin phi(-T) = chi(-T) = x0 and leave the right end free.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pathlab/core.hpp"
#include "pathlab/transform.hpp"

namespace pathlab {

struct SamplerConfig {
    std::size_t n_samples = 100000;
    std::size_t n_burnin = 1000;  // Metropolis sweeps discarded per chain
    std::size_t n_thin = 10;      // sweeps between stored Metropolis samples
    double proposal_width = 0.25;
    std::uint64_t seed = 42;
    double x0 = 0.0;
    double blowup_threshold = kDefaultBlowupThreshold;
    /// Hard ceiling on rejected mapped draws, as a fraction of n_samples.
    double max_blowup_fraction = 0.01;
    std::size_t n_chains = 1;
    std::size_t threads = 0;  // 0: all hardware threads

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

struct SampleBatch {
    std::vector<Path> paths;
    std::size_t n_rejected_blowups = 0;
    double acceptance_rate = 1.0;  // mapped batches have no rejection step
    std::uint64_t seed_used = 0;
};

/// Mersenne-Twister stream keyed by (seed, stream, index).
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// Stream identifiers; distinct purposes never share a generator.
enum class RngStream : std::uint64_t { Wiener = 1, Metropolis = 2, Tuning = 3, Ito = 4, Check = 5 };

/// Thrown when mapped draws blow up more often than max_blowup_fraction allows.
class BlowupBudgetError : public std::runtime_error {
public:
    BlowupBudgetError(std::size_t rejected, std::size_t accepted, std::size_t requested);
    [[nodiscard]] std::size_t rejected() const noexcept { return rejected_; }
    [[nodiscard]] std::size_t accepted() const noexcept { return accepted_; }

private:
    std::size_t rejected_;
    std::size_t accepted_;
};

class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// chi[0] = x0, chi[i+1] = chi[i] + xi_i with xi_i ~ N(0, hbar * eps).
[[nodiscard]] Path sample_wiener_path(const Lattice& lattice, const ModelParams& params,
                                      const SamplerConfig& config, StreamRng& rng);

/// Draws per mapped chunk; chunk c always uses stream (seed, Wiener, c).
inline constexpr std::size_t kMappedChunk = 4096;

struct MappedSummary {
    std::size_t n_accepted = 0;
    std::size_t n_rejected_blowups = 0;
};

/// Streams config.n_samples mapped phi paths to sink, in a fixed order that does
/// not depend on the thread count or the kernel ISA. Draws that diverge or
/// exceed blowup_threshold are counted and redrawn.
MappedSummary for_each_mapped_path(const Lattice& lattice, const ModelParams& params,
                                   Branch branch, const SamplerConfig& config,
                                   const std::function<void(std::span<const double>)>& sink);

[[nodiscard]] SampleBatch sample_mapped_batch(const Lattice& lattice, const ModelParams& params,
                                              Branch branch, const SamplerConfig& config);

/// EXACT_LATTICE targets exp(-S_exact/hbar); FREE drops the interaction (kinetic only).
enum class MetropolisTarget { ExactLattice, Free };

[[nodiscard]] SampleBatch run_metropolis(const Lattice& lattice, const ModelParams& params,
                                         Branch branch, const SamplerConfig& config,
                                         MetropolisTarget target = MetropolisTarget::ExactLattice);

/// Bisects log(proposal_width) on short pilot chains until the acceptance rate
/// lies in [0.3, 0.6]. Throws TuningError after 30 iterations.
[[nodiscard]] double tune_proposal(const Lattice& lattice, const ModelParams& params,
                                   Branch branch, const SamplerConfig& config,
                                   MetropolisTarget target = MetropolisTarget::ExactLattice);

/// Acceptance rate of a pilot chain (used by tune_proposal, exposed for tests).
[[nodiscard]] double pilot_acceptance(const Lattice& lattice, const ModelParams& params,
                                      Branch branch, const SamplerConfig& config, double width,
                                      std::uint64_t pilot_index,
                                      MetropolisTarget target = MetropolisTarget::ExactLattice);

[[nodiscard]] std::size_t resolve_threads(std::size_t requested) noexcept;

}  // namespace pathlab
