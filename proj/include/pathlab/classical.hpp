#pragma once

// Classical side of the model: closed-form solutions of the first-order flow,
// pointwise residuals of the Euler-Lagrange / flow / boundary equations, the
// shooting solver for the broken theory and the action-gap audit.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathlab/core.hpp"

namespace pathlab {

/// Tanh inside the wells, coth outside, constant on a well, rational when beta = 0.
enum class KinkKind { Tanh, Coth, Constant, Rational };

[[nodiscard]] std::string_view to_string(KinkKind kind) noexcept;

/// Solution of phi' = -s a (phi^2 - beta^2) through phi(-s T) = -alpha, where
/// s = +1 for PLUS and -1 for MINUS. The MINUS profile is the PLUS profile
/// reflected in time.
struct KinkSolution {
    KinkKind kind = KinkKind::Tanh;
    double c = 0.0;  // integration constant of the argument a beta t + c
    double alpha = 0.0;
    double T = 1.0;
    Branch branch = Branch::Plus;
    ModelParams params;
};

/// c is fixed by the bound value: tanh(-a beta T + c) = -alpha / beta, or coth.
[[nodiscard]] KinkSolution make_kink(const ModelParams& params, double T, double alpha,
                                     Branch branch = Branch::Plus);

/// Tanh or coth profile with a given integration constant; alpha follows from it.
[[nodiscard]] KinkSolution make_kink_with_constant(const ModelParams& params, double T,
                                                   KinkKind kind, double c,
                                                   Branch branch = Branch::Plus);

class SingularityError : public std::domain_error {
public:
    SingularityError(const std::string& what, double pole)
        : std::domain_error(what), pole_(pole) {}
    [[nodiscard]] double pole() const noexcept { return pole_; }

private:
    double pole_;
};

/// Finite-time pole of a coth/rational profile (anywhere on the real line).
[[nodiscard]] std::optional<double> pole_time(const KinkSolution& solution) noexcept;

/// Throws SingularityError exactly at a pole.
[[nodiscard]] double kink_profile(const KinkSolution& solution, double t);

/// The profile sampled on the lattice nodes.
[[nodiscard]] Path kink_path(const KinkSolution& solution, const Lattice& lattice);

enum class EquationId {
    ElSymmetric,   // phi'' - 2 a^2 phi (phi^2 - beta^2)
    ElBroken,      // phi'' - 2 a^2 phi (phi^2 - beta^2) + a
    FlowPlus,      // phi' + a (phi^2 - beta^2)
    FlowMinus,     // phi' - a (phi^2 - beta^2)
    BoundaryCond,  // phi'(+-T) + a (phi(+-T)^2 - beta^2)
};

/// Pointwise residual. Euler-Lagrange and flow equations: centered differences
/// on the N - 1 interior nodes. Boundary conditions: one-sided differences at
/// nodes 0 and N, returned as a 2-vector.
[[nodiscard]] std::vector<double> residual(const Path& path, EquationId eq, const Lattice& lattice,
                                           const ModelParams& params);

// ---------------------------------------------------------------------------
// Shooting

namespace shooting {

struct State {
    double x;
    double v;
};

/// Acceleration x'' = f(t, x, v).
using Rhs = std::function<double(double t, double x, double v)>;

/// Classical fourth-order Runge-Kutta with fixed substeps per lattice interval.
/// Returns false as soon as |x| or |v| exceeds escape (or goes non-finite);
/// nodes then holds the states integrated so far.
bool integrate(const Rhs& rhs, State start, const Lattice& lattice, std::size_t substeps,
               double escape, std::vector<State>& nodes);

struct Problem {
    Rhs rhs;
    /// Velocity at -T implied by the left boundary condition for start value p.
    std::function<double(double p)> left_velocity;
    /// Residual of the right boundary condition at +T.
    std::function<double(const State& end)> right_residual;
};

struct Options {
    double p_lo = -3.0;
    double p_hi = 3.0;
    std::size_t scan_points = 801;
    std::size_t substeps = 4;  // RK4 step = eps / substeps
    double escape = 1e8;
    double tolerance = 1e-6;  // on both boundary residuals and the step-halving check
};

struct Solution {
    std::vector<State> nodes;  // one per lattice node
    double p = 0.0;
    double left_residual = 0.0;
    double right_residual = 0.0;
    double refinement_error = 0.0;  // max node gap against eps / (2 substeps)
    int iterations = 0;
};

struct Diagnostics {
    double p_lo = 0.0;
    double p_hi = 0.0;
    std::size_t scanned = 0;
    std::size_t escaped = 0;           // trajectories that ran away before +T
    std::size_t sign_changes = 0;
    double min_abs_residual = 0.0;     // over finite trajectories
    double argmin_p = 0.0;
    double max_residual = 0.0;
    double min_residual = 0.0;

    [[nodiscard]] std::string describe() const;
};

/// Scans [p_lo, p_hi] for a sign change of the right residual and refines it.
/// Throws ConvergenceError when no bracket exists or refinement fails.
[[nodiscard]] Solution solve(const Problem& problem, const Lattice& lattice, const Options& options);

}  // namespace shooting

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, shooting::Diagnostics diagnostics)
        : std::runtime_error(what + ": " + diagnostics.describe()),
          diagnostics_(diagnostics) {}
    [[nodiscard]] const shooting::Diagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    shooting::Diagnostics diagnostics_;
};

/// Shooting for the broken Euler-Lagrange equation with the natural boundary
/// conditions at both ends. The left condition fixes phi'(-T) from phi(-T);
/// phi(-T) is root-found on the right condition. The search bracket is
/// centered on initial_guess[0] with half-width 2 max(1, beta, max|guess|).
[[nodiscard]] shooting::Solution solve_broken_bvp(const Lattice& lattice,
                                                  const ModelParams& params,
                                                  const Path& initial_guess);

[[nodiscard]] shooting::Options broken_bvp_options(const ModelParams& params,
                                                   const Path& initial_guess);

[[nodiscard]] shooting::Problem broken_bvp_problem(const ModelParams& params);

/// Grid path of a shooting solution.
[[nodiscard]] Path positions(const shooting::Solution& solution);

// ---------------------------------------------------------------------------
// Action gap

/// interacting_action(PLUS, BOUNDARY_FORM) - symmetric_action for any path.
[[nodiscard]] double boundary_form_gap(const Path& path, const Lattice& lattice,
                                       const ModelParams& params);

/// The gap for the odd (c = 0) tanh profile. Throws std::invalid_argument for
/// any other configuration.
[[nodiscard]] double action_gap(const KinkSolution& solution, const Lattice& lattice,
                                const ModelParams& params);

/// 2 a phi(T) (phi(T)^2 / 3 - beta^2): the gap of an odd path when int phi dt = 0.
[[nodiscard]] double odd_path_gap_prediction(double phi_at_T, const ModelParams& params) noexcept;

}  // namespace pathlab
