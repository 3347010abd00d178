#pragma once

// Observables, blocked Monte Carlo error bars, the two-sampler equivalence
// experiment and the hbar sweep towards the classical limit.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathlab/classical.hpp"
#include "pathlab/core.hpp"
#include "pathlab/sampler.hpp"

namespace pathlab {

enum class ObservableId {
    MidpointSq,  // phi(0)^2, needs even N
    MeanSq,      // (1/2T) eps sum_{i<N} phi_i^2
    Endpoint,    // phi(+T)
    MeanPath,    // the whole path, node by node
};

[[nodiscard]] std::string_view to_string(ObservableId id) noexcept;
[[nodiscard]] ObservableId parse_observable(std::string_view text);

/// Number of components: N + 1 for MEAN_PATH, 1 otherwise.
[[nodiscard]] std::size_t observable_dim(ObservableId id, const Lattice& lattice) noexcept;

/// Throws std::invalid_argument for MIDPOINT_SQ on odd N or a length mismatch.
[[nodiscard]] std::vector<double> evaluate_observable(const Path& path, ObservableId id,
                                                      const Lattice& lattice);
[[nodiscard]] std::vector<double> evaluate_observable(std::span<const double> path,
                                                      ObservableId id, const Lattice& lattice);

struct EstimatorResult {
    std::vector<double> mean;
    std::vector<double> std_error;
    std::size_t n_samples = 0;
    std::size_t block_size = 1;  // largest block size chosen over the components
};

inline constexpr std::size_t kMinEstimatorSamples = 16;

/// Blocked standard error of one component stream. Block size doubles from 1
/// until the error changes by less than 10% over a doubling, capped at n/16.
/// Trailing samples that do not fill a block are dropped.
struct BlockedError {
    double std_error;
    std::size_t block_size;
};
[[nodiscard]] BlockedError blocked_error(std::span<const double> samples);

/// samples is row-major, n_samples x dim. Throws std::invalid_argument for fewer
/// than 16 samples.
[[nodiscard]] EstimatorResult estimate(std::span<const double> samples, std::size_t dim = 1);

class DegenerateComparisonError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Comparison {
    double z = 0.0;  // the component of largest |z|
    bool pass = true;
};

inline constexpr double kPassSigma = 3.0;

/// z = (m1 - m2) / sqrt(se1^2 + se2^2); pass iff |z| < 3.
[[nodiscard]] Comparison compare(const EstimatorResult& e1, const EstimatorResult& e2);

struct EquivalenceRow {
    ObservableId observable;
    EstimatorResult mapped;
    EstimatorResult metropolis;
    std::vector<double> z;  // per component
    Comparison comparison;
};

struct EquivalenceReport {
    Branch branch = Branch::Plus;
    std::vector<EquivalenceRow> rows;
    std::size_t n_blowups = 0;
    double acceptance_rate = 0.0;
    double proposal_width = 0.0;
    bool all_pass = true;
};

/// Mapped-Gaussian vs Metropolis estimates of each observable at identical parameters.
[[nodiscard]] EquivalenceReport equivalence_experiment(const Lattice& lattice,
                                                       const ModelParams& params, Branch branch,
                                                       const SamplerConfig& config,
                                                       const std::vector<ObservableId>& observables);

struct SweepRow {
    double hbar = 0.0;
    double rms_dev_from_kink = 0.0;
    double max_el7_residual = 0.0;   // max |EL_SYMMETRIC| of the mean path
    double mean_el9_residual = 0.0;  // mean |EL_BROKEN| of the mean path
    std::size_t n_blowups = 0;
    Path mean_path;
    std::vector<double> mean_path_std_error;
};

struct SweepReport {
    Branch branch = Branch::Plus;
    Path kink;  // classical reference matching phi(-T) = x0
    std::vector<SweepRow> rows;
    bool rms_strictly_decreasing = true;
    bool el7_small = false;          // max |EL7| < a/5 at the smallest hbar
    bool el9_offset_matches = false; // mean |EL9| within 20% of a at the smallest hbar
    [[nodiscard]] bool all_pass() const noexcept {
        return rms_strictly_decreasing && el7_small && el9_offset_matches;
    }
};

/// Classical reference for the sweep: the flow solution through phi(-T) = x0
/// (PLUS), or its reflection phi -> -phi for MINUS.
[[nodiscard]] Path sweep_reference(const Lattice& lattice, const ModelParams& params,
                                   Branch branch, double x0);

/// hbar_list must be strictly decreasing. Each entry streams config.n_samples
/// mapped paths; only running sums are kept.
[[nodiscard]] SweepReport hbar_sweep(const Lattice& lattice, const ModelParams& params,
                                     Branch branch, const std::vector<double>& hbar_list,
                                     const SamplerConfig& config);

struct ItoCheckReport {
    std::size_t n_paths = 0;
    double max_relative_identity_residual = 0.0;
    EstimatorResult quadratic_variation_term;  // sum phi_i (dphi_i)^2
    EstimatorResult drift_term;                // hbar eps sum phi_i
    EstimatorResult difference;                // per-path difference of the two
    double z = 0.0;
    bool identity_pass = false;
    bool statistical_pass = false;
    [[nodiscard]] bool all_pass() const noexcept { return identity_pass && statistical_pass; }
};

inline constexpr double kItoIdentityTolerance = 1e-10;

/// Wiener paths for chi: exact discrete identity per path, plus the statistical
/// statement sum phi (dphi)^2 ~ hbar sum phi eps behind the Ito correction.
[[nodiscard]] ItoCheckReport ito_check(const Lattice& lattice, const ModelParams& params,
                                       const SamplerConfig& config);

}  // namespace pathlab
