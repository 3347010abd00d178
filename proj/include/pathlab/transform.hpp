#pragma once

// The nonlocal substitution chi = phi +/- a * int (phi^2 - beta^2) dt on the
// lattice, its exact inverse, and detection of runaway (singular) paths.

#include <stdexcept>

#include "pathlab/core.hpp"

namespace pathlab {

inline constexpr double kDefaultBlowupThreshold = 1e6;

/// Raised by inverse_map when the recursion leaves the finite reals.
class BlowupError : public std::overflow_error {
public:
    BlowupError(const std::string& what, BlowupReport report)
        : std::overflow_error(what), report_(std::move(report)) {}
    [[nodiscard]] const BlowupReport& report() const noexcept { return report_; }

private:
    BlowupReport report_;
};

/// chi[0] = phi[0]; chi[i] = phi[i] + s a eps sum_{j<i} (phi[j]^2 - beta^2).
[[nodiscard]] Path forward_map(const Path& phi, Branch branch, const Lattice& lattice,
                               const ModelParams& params);

/// phi[i+1] = phi[i] + (chi[i+1] - chi[i]) - s a eps (phi[i]^2 - beta^2).
/// Never clamps. Throws BlowupError if any value becomes non-finite.
[[nodiscard]] Path inverse_map(const Path& chi, Branch branch, const Lattice& lattice,
                               const ModelParams& params);

/// Determinant of the central finite-difference Jacobian d chi / d phi.
/// Limited to N <= 16.
[[nodiscard]] double numeric_jacobian_det(const Path& phi, Branch branch, const Lattice& lattice,
                                          const ModelParams& params, double step = 1e-6);

inline constexpr std::size_t kMaxJacobianSteps = 16;

/// Flags nodes whose magnitude exceeds threshold or that are non-finite.
[[nodiscard]] BlowupReport scan_singularities(const Path& phi,
                                              double threshold = kDefaultBlowupThreshold);

}  // namespace pathlab
