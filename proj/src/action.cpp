#include "pathlab/action.hpp"

#include <cmath>
#include <stdexcept>

#include "pathlab/kernels/kernels.hpp"

namespace pathlab {

double potential(double x, const ModelParams& params) noexcept {
    const double w = x * x - params.beta_sq();
    return 0.5 * params.a() * params.a() * w * w;
}

double kinetic_action(const Path& path, const Lattice& lattice) {
    require_matching(path, lattice);
    return kernels::sum_sq_increments(path.view()) / (2.0 * lattice.epsilon());
}

double symmetric_action(const Path& path, const Lattice& lattice, const ModelParams& params) {
    require_matching(path, lattice);
    const double a2 = params.a() * params.a();
    return kinetic_action(path, lattice) +
           0.5 * a2 * kernels::sum_well_sq(path.view(), params.beta_sq()) * lattice.epsilon();
}

double ito_sum(const Path& path, const std::function<double(double)>& g) {
    if (path.size() < 2) throw std::invalid_argument("ito_sum needs at least two nodes");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) s += g(path[i]) * (path[i + 1] - path[i]);
    return s;
}

namespace {
struct ItoBalance {
    double residual;
    double scale;
};

ItoBalance ito_balance(const Path& path) {
    if (path.size() < 2)
        throw std::invalid_argument("discrete Ito identity needs at least two nodes");
    const auto s = kernels::ito_sums(path.view());
    const double x0 = path.front();
    const double xn = path.back();
    const double boundary = (xn * xn * xn - x0 * x0 * x0) / 3.0;
    return {s.x2_dx + s.x_dx2 + s.dx3 / 3.0 - boundary, s.abs_scale + std::abs(boundary)};
}
}  // namespace

double discrete_ito_identity_residual(const Path& path) { return ito_balance(path).residual; }

double discrete_ito_identity_relative_residual(const Path& path) {
    const auto b = ito_balance(path);
    return b.scale > 0.0 ? std::abs(b.residual) / b.scale : 0.0;
}

double interacting_action(const Path& path, Branch branch, ActionForm form,
                          const Lattice& lattice, const ModelParams& params) {
    require_matching(path, lattice);
    const double s = branch_sign(branch);
    const double a = params.a();
    const double eps = lattice.epsilon();
    if (form == ActionForm::ExactLattice) {
        return kernels::sum_shifted_sq_increments(path.view(), s * a * eps, params.beta_sq()) /
               (2.0 * eps);
    }
    const double x0 = path.front();
    const double xn = path.back();
    const double linear = a * kernels::sum_left(path.view()) * eps;
    const double cubic = (a / 3.0) * (xn * xn * xn - x0 * x0 * x0);
    const double shift = a * params.beta_sq() * (xn - x0);
    return symmetric_action(path, lattice, params) + s * (-linear + cubic - shift);
}

double exact_lattice_local_delta(const Path& path, std::size_t k, double proposed, Branch branch,
                                 const Lattice& lattice, const ModelParams& params) noexcept {
    const double coef = branch_sign(branch) * params.a() * lattice.epsilon();
    const double b2 = params.beta_sq();
    const double inv2eps = 1.0 / (2.0 * lattice.epsilon());
    const double old = path[k];
    double delta = 0.0;
    if (k > 0) {
        const double prev = path[k - 1];
        const double drift = coef * (prev * prev - b2);
        const double d_new = (proposed - prev) + drift;
        const double d_old = (old - prev) + drift;
        delta += d_new * d_new - d_old * d_old;
    }
    if (k + 1 < path.size()) {
        const double next = path[k + 1];
        const double d_new = (next - proposed) + coef * (proposed * proposed - b2);
        const double d_old = (next - old) + coef * (old * old - b2);
        delta += d_new * d_new - d_old * d_old;
    }
    return delta * inv2eps;
}

double kinetic_local_delta(const Path& path, std::size_t k, double proposed,
                           const Lattice& lattice) noexcept {
    const double inv2eps = 1.0 / (2.0 * lattice.epsilon());
    const double old = path[k];
    double delta = 0.0;
    if (k > 0) {
        const double prev = path[k - 1];
        delta += (proposed - prev) * (proposed - prev) - (old - prev) * (old - prev);
    }
    if (k + 1 < path.size()) {
        const double next = path[k + 1];
        delta += (next - proposed) * (next - proposed) - (next - old) * (next - old);
    }
    return delta * inv2eps;
}

}  // namespace pathlab
