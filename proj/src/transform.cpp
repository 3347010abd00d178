#include "pathlab/transform.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

namespace pathlab {

Path forward_map(const Path& phi, Branch branch, const Lattice& lattice,
                 const ModelParams& params) {
    require_matching(phi, lattice);
    const double coef = branch_sign(branch) * params.a() * lattice.epsilon();
    const double b2 = params.beta_sq();
    std::vector<double> chi(phi.size());
    double cumulative = 0.0;
    chi[0] = phi[0];
    for (std::size_t i = 1; i < phi.size(); ++i) {
        cumulative += phi[i - 1] * phi[i - 1] - b2;
        chi[i] = phi[i] + coef * cumulative;
    }
    return Path(std::move(chi));
}

Path inverse_map(const Path& chi, Branch branch, const Lattice& lattice,
                 const ModelParams& params) {
    require_matching(chi, lattice);
    const double coef = branch_sign(branch) * params.a() * lattice.epsilon();
    const double b2 = params.beta_sq();
    std::vector<double> phi(chi.size());
    phi[0] = chi[0];
    for (std::size_t i = 0; i + 1 < chi.size(); ++i) {
        const double x = phi[i];
        // same operation order as kernels::inverse_map_lanes
        phi[i + 1] = (x + (chi[i + 1] - chi[i])) - coef * (x * x - b2);
    }
    Path result(std::move(phi));
    auto report = scan_singularities(result, std::numeric_limits<double>::max());
    if (!report.all_finite) {
        const std::string what =
            "inverse map diverged at node " + std::to_string(report.flagged_indices.front());
        throw BlowupError(what, std::move(report));
    }
    return result;
}

double numeric_jacobian_det(const Path& phi, Branch branch, const Lattice& lattice,
                            const ModelParams& params, double step) {
    require_matching(phi, lattice);
    if (lattice.N() > kMaxJacobianSteps)
        throw std::invalid_argument("numeric_jacobian_det is limited to N <= 16");
    const auto n = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Path up = phi;
        Path down = phi;
        up[static_cast<std::size_t>(j)] += step;
        down[static_cast<std::size_t>(j)] -= step;
        const Path cu = forward_map(up, branch, lattice, params);
        const Path cd = forward_map(down, branch, lattice, params);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            jac(i, j) = (cu[k] - cd[k]) / (2.0 * step);
        }
    }
    return jac.fullPivLu().determinant();
}

BlowupReport scan_singularities(const Path& phi, double threshold) {
    BlowupReport report;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double v = phi[i];
        if (!std::isfinite(v)) {
            report.all_finite = false;
            report.max_abs = std::numeric_limits<double>::infinity();
            report.flagged_indices.push_back(i);
        } else {
            if (std::abs(v) > report.max_abs) report.max_abs = std::abs(v);
            if (std::abs(v) > threshold) report.flagged_indices.push_back(i);
        }
    }
    return report;
}

}  // namespace pathlab
