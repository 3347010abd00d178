#pragma once

// Shared value types: model parameters, the uniform time lattice, paths on it,
// the branch selector and the singularity report.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathlab {

/// Physical constants of the double-well model. beta is always b / (2a).
class ModelParams {
public:
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double beta_sq() const noexcept { return beta_ * beta_; }
    [[nodiscard]] double hbar() const noexcept { return hbar_; }

    /// Same a and b with a different quantum scale.
    [[nodiscard]] ModelParams with_hbar(double hbar) const;

    friend ModelParams make_params(double a, double b, double hbar);

private:
    ModelParams(double a, double b, double hbar) noexcept
        : a_(a), b_(b), beta_(b / (2.0 * a)), hbar_(hbar) {}

    double a_;
    double b_;
    double beta_;
    double hbar_;
};

/// Throws std::invalid_argument unless a > 0, b >= 0 and hbar > 0.
ModelParams make_params(double a, double b, double hbar);

/// Uniform grid on [-T, +T] with N steps and N + 1 nodes.
class Lattice {
public:
    [[nodiscard]] double T() const noexcept { return T_; }
    [[nodiscard]] std::size_t N() const noexcept { return N_; }
    [[nodiscard]] std::size_t n_nodes() const noexcept { return N_ + 1; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] double time(std::size_t i) const { return times_.at(i); }

    friend Lattice make_lattice(double T, std::size_t N);

private:
    Lattice(double T, std::size_t N);

    double T_;
    std::size_t N_;
    double epsilon_;
    std::vector<double> times_;
};

/// Throws std::invalid_argument unless T > 0 and N >= 2.
Lattice make_lattice(double T, std::size_t N);

/// Field values at the lattice nodes. Used both for phi and for chi.
class Path {
public:
    Path() = default;
    explicit Path(std::vector<double> values) : values_(std::move(values)) {}
    Path(std::size_t n, double fill) : values_(n, fill) {}
    Path(std::initializer_list<double> values) : values_(values) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    [[nodiscard]] double front() const { return values_.front(); }
    [[nodiscard]] double back() const { return values_.back(); }

    [[nodiscard]] std::span<const double> view() const noexcept { return values_; }
    [[nodiscard]] std::span<double> view() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] Path negated() const;

    friend bool operator==(const Path&, const Path&) = default;

private:
    std::vector<double> values_;
};

/// Samples f on every lattice node.
template <typename F>
Path sample_on(const Lattice& lattice, F&& f) {
    std::vector<double> v(lattice.n_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(lattice.time(i));
    return Path(std::move(v));
}

/// PLUS selects A+, the substitution with +a and the space X+; MINUS the mirror.
enum class Branch { Plus, Minus };

/// +1 for PLUS, -1 for MINUS.
[[nodiscard]] constexpr double branch_sign(Branch b) noexcept {
    return b == Branch::Plus ? 1.0 : -1.0;
}

[[nodiscard]] std::string_view to_string(Branch b) noexcept;
/// Accepts "PLUS"/"MINUS" in any case; throws std::invalid_argument otherwise.
[[nodiscard]] Branch parse_branch(std::string_view text);

struct BlowupReport {
    std::vector<std::size_t> flagged_indices;  // ascending
    double max_abs = 0.0;                      // +inf when any entry is non-finite
    bool all_finite = true;

    [[nodiscard]] bool clean() const noexcept { return flagged_indices.empty(); }
};

/// Throws std::invalid_argument when the path does not have N + 1 entries.
void require_matching(const Path& path, const Lattice& lattice);

}  // namespace pathlab
