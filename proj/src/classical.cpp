#include "pathlab/classical.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pathlab/action.hpp"

namespace pathlab {

std::string_view to_string(KinkKind kind) noexcept {
    switch (kind) {
        case KinkKind::Tanh: return "TANH";
        case KinkKind::Coth: return "COTH";
        case KinkKind::Constant: return "CONSTANT";
        case KinkKind::Rational: return "RATIONAL";
    }
    return "UNKNOWN";
}

namespace {

double acoth(double x) { return 0.5 * std::log((x + 1.0) / (x - 1.0)); }

// local time: PLUS profiles run forward, MINUS profiles are reflected
double local_time(const KinkSolution& s, double t) noexcept { return branch_sign(s.branch) * t; }

}  // namespace

KinkSolution make_kink(const ModelParams& params, double T, double alpha, Branch branch) {
    if (!(T > 0.0)) throw std::invalid_argument("kink half-interval T must be positive");
    if (!std::isfinite(alpha)) throw std::invalid_argument("kink bound value must be finite");
    const double a = params.a();
    const double beta = params.beta();
    const double start = -alpha;

    if (beta == 0.0) {
        if (alpha == 0.0) return KinkSolution{KinkKind::Constant, 0.0, alpha, T, branch, params};
        // phi = 1 / (a tau + c)
        return KinkSolution{KinkKind::Rational, 1.0 / start + a * T, alpha, T, branch, params};
    }
    const double ratio = start / beta;
    if (std::abs(std::abs(ratio) - 1.0) <= 1e-14)
        return KinkSolution{KinkKind::Constant, 0.0, alpha, T, branch, params};
    if (std::abs(ratio) < 1.0)
        return KinkSolution{KinkKind::Tanh, a * beta * T + std::atanh(ratio), alpha, T, branch,
                            params};
    return KinkSolution{KinkKind::Coth, a * beta * T + acoth(ratio), alpha, T, branch, params};
}

KinkSolution make_kink_with_constant(const ModelParams& params, double T, KinkKind kind, double c,
                                     Branch branch) {
    if (kind != KinkKind::Tanh && kind != KinkKind::Coth)
        throw std::invalid_argument("an explicit integration constant needs a TANH or COTH profile");
    if (!(params.beta() > 0.0))
        throw std::invalid_argument("TANH/COTH profiles need beta > 0");
    KinkSolution s{kind, c, 0.0, T, branch, params};
    s.alpha = -kink_profile(s, branch == Branch::Plus ? -T : T);
    return s;
}

std::optional<double> pole_time(const KinkSolution& s) noexcept {
    const double sign = branch_sign(s.branch);
    switch (s.kind) {
        case KinkKind::Coth: return sign * (-s.c / (s.params.a() * s.params.beta()));
        case KinkKind::Rational: return sign * (-s.c / s.params.a());
        default: return std::nullopt;
    }
}

double kink_profile(const KinkSolution& s, double t) {
    const double tau = local_time(s, t);
    const double a = s.params.a();
    const double beta = s.params.beta();
    switch (s.kind) {
        case KinkKind::Constant: return -s.alpha;
        case KinkKind::Tanh: return beta * std::tanh(a * beta * tau + s.c);
        case KinkKind::Coth: {
            const double u = a * beta * tau + s.c;
            if (u == 0.0)
                throw SingularityError("coth profile evaluated at its pole", *pole_time(s));
            return beta / std::tanh(u);
        }
        case KinkKind::Rational: {
            const double d = a * tau + s.c;
            if (d == 0.0)
                throw SingularityError("rational profile evaluated at its pole", *pole_time(s));
            return 1.0 / d;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Path kink_path(const KinkSolution& solution, const Lattice& lattice) {
    return sample_on(lattice, [&](double t) { return kink_profile(solution, t); });
}

std::vector<double> residual(const Path& path, EquationId eq, const Lattice& lattice,
                             const ModelParams& params) {
    require_matching(path, lattice);
    const double a = params.a();
    const double b2 = params.beta_sq();
    const double eps = lattice.epsilon();
    const std::size_t N = lattice.N();

    if (eq == EquationId::BoundaryCond) {
        const double left = (path[1] - path[0]) / eps + a * (path[0] * path[0] - b2);
        const double right = (path[N] - path[N - 1]) / eps + a * (path[N] * path[N] - b2);
        return {left, right};
    }

    std::vector<double> r(N - 1);
    for (std::size_t i = 1; i < N; ++i) {
        const double x = path[i];
        switch (eq) {
            case EquationId::ElSymmetric:
            case EquationId::ElBroken: {
                const double acc = (path[i + 1] - 2.0 * x + path[i - 1]) / (eps * eps);
                r[i - 1] = acc - 2.0 * a * a * x * (x * x - b2);
                if (eq == EquationId::ElBroken) r[i - 1] += a;
                break;
            }
            case EquationId::FlowPlus:
            case EquationId::FlowMinus: {
                const double vel = (path[i + 1] - path[i - 1]) / (2.0 * eps);
                const double drift = a * (x * x - b2);
                r[i - 1] = eq == EquationId::FlowPlus ? vel + drift : vel - drift;
                break;
            }
            case EquationId::BoundaryCond: break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace shooting {

bool integrate(const Rhs& rhs, State start, const Lattice& lattice, std::size_t substeps,
               double escape, std::vector<State>& nodes) {
    nodes.clear();
    nodes.reserve(lattice.n_nodes());
    nodes.push_back(start);
    const double h = lattice.epsilon() / static_cast<double>(substeps);
    State y = start;
    for (std::size_t i = 0; i < lattice.N(); ++i) {
        const double t0 = lattice.time(i);
        for (std::size_t k = 0; k < substeps; ++k) {
            const double t = t0 + static_cast<double>(k) * h;
            const double k1x = y.v;
            const double k1v = rhs(t, y.x, y.v);
            const double k2x = y.v + 0.5 * h * k1v;
            const double k2v = rhs(t + 0.5 * h, y.x + 0.5 * h * k1x, k2x);
            const double k3x = y.v + 0.5 * h * k2v;
            const double k3v = rhs(t + 0.5 * h, y.x + 0.5 * h * k2x, k3x);
            const double k4x = y.v + h * k3v;
            const double k4v = rhs(t + h, y.x + h * k3x, k4x);
            y.x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            y.v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if (!std::isfinite(y.x) || !std::isfinite(y.v) || std::abs(y.x) > escape ||
                std::abs(y.v) > escape)
                return false;
        }
        nodes.push_back(y);
    }
    return true;
}

std::string Diagnostics::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << "scanned " << scanned << " start values in [" << p_lo << ", " << p_hi << "], "
       << escaped << " trajectories escaped, " << sign_changes
       << " sign changes of the right boundary residual; residual range over finite "
          "trajectories ["
       << min_residual << ", " << max_residual << "], closest approach |R| = " << min_abs_residual
       << " at p = " << argmin_p;
    return os.str();
}

namespace {

double end_residual(const Problem& problem, const Lattice& lattice, std::size_t substeps,
                    double escape, double p, std::vector<State>& buffer) {
    if (!integrate(problem.rhs, State{p, problem.left_velocity(p)}, lattice, substeps, escape,
                   buffer))
        return std::numeric_limits<double>::quiet_NaN();
    return problem.right_residual(buffer.back());
}

}  // namespace

Solution solve(const Problem& problem, const Lattice& lattice, const Options& options) {
    if (!(options.p_hi > options.p_lo) || options.scan_points < 2)
        throw std::invalid_argument("shooting needs p_lo < p_hi and at least two scan points");

    Diagnostics diag;
    diag.p_lo = options.p_lo;
    diag.p_hi = options.p_hi;
    diag.scanned = options.scan_points;
    diag.min_abs_residual = std::numeric_limits<double>::infinity();
    diag.max_residual = -std::numeric_limits<double>::infinity();
    diag.min_residual = std::numeric_limits<double>::infinity();

    std::vector<State> buffer;
    std::vector<double> ps(options.scan_points);
    std::vector<double> rs(options.scan_points);
    const double center = 0.5 * (options.p_lo + options.p_hi);
    const double dp = (options.p_hi - options.p_lo) / static_cast<double>(options.scan_points - 1);
    for (std::size_t k = 0; k < options.scan_points; ++k) {
        ps[k] = options.p_lo + static_cast<double>(k) * dp;
        rs[k] = end_residual(problem, lattice, options.substeps, options.escape, ps[k], buffer);
        if (std::isnan(rs[k])) {
            ++diag.escaped;
            continue;
        }
        diag.max_residual = std::max(diag.max_residual, rs[k]);
        diag.min_residual = std::min(diag.min_residual, rs[k]);
        if (std::abs(rs[k]) < diag.min_abs_residual) {
            diag.min_abs_residual = std::abs(rs[k]);
            diag.argmin_p = ps[k];
        }
    }

    // pick the bracketing interval closest to the center of the scan
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k + 1 < options.scan_points; ++k) {
        if (std::isnan(rs[k]) || std::isnan(rs[k + 1])) continue;
        if (rs[k] == 0.0 || (rs[k] < 0.0) != (rs[k + 1] < 0.0)) {
            ++diag.sign_changes;
            const auto dist = [&](std::size_t j) { return std::abs(ps[j] - center); };
            if (!best || dist(k) < dist(*best)) best = k;
        }
    }
    if (!best) throw ConvergenceError("no root of the right boundary residual in the bracket", diag);

    Solution sol;
    if (rs[*best] == 0.0) {
        sol.p = ps[*best];
    } else {
        auto f = [&](double p) {
            const double r = end_residual(problem, lattice, options.substeps, options.escape, p, buffer);
            if (std::isnan(r)) throw ConvergenceError("trajectory escaped during refinement", diag);
            return r;
        };
        std::uintmax_t max_iter = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            f, ps[*best], ps[*best + 1], rs[*best], rs[*best + 1],
            boost::math::tools::eps_tolerance<double>(52), max_iter);
        sol.p = 0.5 * (lo + hi);
        sol.iterations = static_cast<int>(max_iter);
    }

    if (!integrate(problem.rhs, State{sol.p, problem.left_velocity(sol.p)}, lattice,
                   options.substeps, options.escape, sol.nodes))
        throw ConvergenceError("trajectory at the refined root escaped", diag);
    sol.left_residual = sol.nodes.front().v - problem.left_velocity(sol.p);
    sol.right_residual = problem.right_residual(sol.nodes.back());

    std::vector<State> fine;
    if (!integrate(problem.rhs, sol.nodes.front(), lattice, 2 * options.substeps, options.escape,
                   fine))
        throw ConvergenceError("refined trajectory escaped", diag);
    for (std::size_t i = 0; i < fine.size(); ++i)
        sol.refinement_error = std::max(sol.refinement_error, std::abs(fine[i].x - sol.nodes[i].x));

    if (std::abs(sol.right_residual) > options.tolerance ||
        std::abs(sol.left_residual) > options.tolerance ||
        sol.refinement_error > options.tolerance)
        throw ConvergenceError("root found but residual tolerances not met", diag);
    return sol;
}

}  // namespace shooting

shooting::Problem broken_bvp_problem(const ModelParams& params) {
    const double a = params.a();
    const double b2 = params.beta_sq();
    return shooting::Problem{
        [a, b2](double, double x, double) { return 2.0 * a * a * x * (x * x - b2) - a; },
        [a, b2](double p) { return -a * (p * p - b2); },
        [a, b2](const shooting::State& end) { return end.v + a * (end.x * end.x - b2); },
    };
}

shooting::Options broken_bvp_options(const ModelParams& params, const Path& initial_guess) {
    double reach = std::max(1.0, params.beta());
    for (double v : initial_guess.values()) reach = std::max(reach, std::abs(v));
    shooting::Options opt;
    const double center = initial_guess.size() > 0 ? initial_guess.front() : 0.0;
    opt.p_lo = center - 2.0 * reach;
    opt.p_hi = center + 2.0 * reach;
    return opt;
}

shooting::Solution solve_broken_bvp(const Lattice& lattice, const ModelParams& params,
                                    const Path& initial_guess) {
    require_matching(initial_guess, lattice);
    return shooting::solve(broken_bvp_problem(params), lattice,
                           broken_bvp_options(params, initial_guess));
}

Path positions(const shooting::Solution& solution) {
    std::vector<double> v(solution.nodes.size());
    std::transform(solution.nodes.begin(), solution.nodes.end(), v.begin(),
                   [](const shooting::State& s) { return s.x; });
    return Path(std::move(v));
}

// ---------------------------------------------------------------------------

double boundary_form_gap(const Path& path, const Lattice& lattice, const ModelParams& params) {
    return interacting_action(path, Branch::Plus, ActionForm::BoundaryForm, lattice, params) -
           symmetric_action(path, lattice, params);
}

double action_gap(const KinkSolution& solution, const Lattice& lattice, const ModelParams& params) {
    if (solution.kind != KinkKind::Tanh || solution.c != 0.0 || solution.branch != Branch::Plus)
        throw std::invalid_argument(
            "action_gap is defined for the odd PLUS tanh profile (c = 0) only");
    return boundary_form_gap(kink_path(solution, lattice), lattice, params);
}

double odd_path_gap_prediction(double phi_at_T, const ModelParams& params) noexcept {
    return 2.0 * params.a() * phi_at_T * (phi_at_T * phi_at_T / 3.0 - params.beta_sq());
}

}  // namespace pathlab
