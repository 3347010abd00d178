#include "pathlab/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace pathlab {

ModelParams make_params(double a, double b, double hbar) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("model parameter a must be positive and finite");
    if (!(b >= 0.0) || !std::isfinite(b))
        throw std::invalid_argument("model parameter b must be non-negative and finite");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw std::invalid_argument("model parameter hbar must be positive and finite");
    return ModelParams(a, b, hbar);
}

ModelParams ModelParams::with_hbar(double hbar) const { return make_params(a_, b_, hbar); }

Lattice::Lattice(double T, std::size_t N)
    : T_(T), N_(N), epsilon_(2.0 * T / static_cast<double>(N)), times_(N + 1) {
    for (std::size_t i = 0; i < N; ++i) times_[i] = -T + static_cast<double>(i) * epsilon_;
    times_[N] = T;
}

Lattice make_lattice(double T, std::size_t N) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("lattice half-interval T must be positive and finite");
    if (N < 2) throw std::invalid_argument("lattice step count N must be at least 2");
    return Lattice(T, N);
}

Path Path::negated() const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [](double x) { return -x; });
    return Path(std::move(v));
}

std::string_view to_string(Branch b) noexcept { return b == Branch::Plus ? "PLUS" : "MINUS"; }

Branch parse_branch(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "PLUS") return Branch::Plus;
    if (upper == "MINUS") return Branch::Minus;
    throw std::invalid_argument("unknown branch '" + std::string(text) + "' (expected PLUS or MINUS)");
}

void require_matching(const Path& path, const Lattice& lattice) {
    if (path.size() != lattice.n_nodes())
        throw std::invalid_argument("path has " + std::to_string(path.size()) +
                                    " entries but the lattice has " +
                                    std::to_string(lattice.n_nodes()) + " nodes");
}

}  // namespace pathlab
