#pragma once

// Potential and action functionals on lattice paths. All dt-integrals are
// left-point sums, matching the Ito prescription of the substitution map.

#include <functional>

#include "pathlab/core.hpp"

namespace pathlab {

/// EXACT_LATTICE is the kinetic action of the substituted path written in terms
/// of phi. BOUNDARY_FORM is the symmetric action plus the linear term and the
/// boundary terms that break phi -> -phi.
enum class ActionForm { ExactLattice, BoundaryForm };

/// (1/2) a^2 (x^2 - beta^2)^2
[[nodiscard]] double potential(double x, const ModelParams& params) noexcept;

/// sum_i (path[i+1] - path[i])^2 / (2 epsilon)
[[nodiscard]] double kinetic_action(const Path& path, const Lattice& lattice);

/// Kinetic action plus epsilon * sum_{i<N} V(path[i]).
[[nodiscard]] double symmetric_action(const Path& path, const Lattice& lattice,
                                      const ModelParams& params);

/// Left-point stochastic sum sum_{i<N} g(path[i]) (path[i+1] - path[i]).
[[nodiscard]] double ito_sum(const Path& path, const std::function<double(double)>& g);

/// Residual of the exact telescoping identity
///   sum x^2 dx + sum x dx^2 + sum dx^3 / 3 = (x_N^3 - x_0^3) / 3.
/// Zero to roundoff for every path.
[[nodiscard]] double discrete_ito_identity_residual(const Path& path);

/// Residual divided by the sum of magnitudes of the terms entering it.
[[nodiscard]] double discrete_ito_identity_relative_residual(const Path& path);

[[nodiscard]] double interacting_action(const Path& path, Branch branch, ActionForm form,
                                        const Lattice& lattice, const ModelParams& params);

/// Change in the EXACT_LATTICE action when node k moves from path[k] to proposed.
/// Only the (at most two) increments touching node k are evaluated.
[[nodiscard]] double exact_lattice_local_delta(const Path& path, std::size_t k, double proposed,
                                               Branch branch, const Lattice& lattice,
                                               const ModelParams& params) noexcept;

/// Same for the kinetic action alone (free theory).
[[nodiscard]] double kinetic_local_delta(const Path& path, std::size_t k, double proposed,
                                         const Lattice& lattice) noexcept;

}  // namespace pathlab
