#pragma once

// Data-parallel inner loops behind the action sums and the batched inverse map.
//
// Every kernel has a scalar reference implementation; an AVX2 variant is
// compiled in on x86-64 and selected at runtime when the CPU supports it.
// Reductions agree with the scalar reference to roundoff (lane-wise partial
// sums). The lane recursion is elementwise and bit-identical across variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace pathlab::kernels {

enum class Isa { Scalar, Avx2 };

/// Paths advanced together by inverse_map_lanes.
inline constexpr std::size_t kLanes = 4;

struct ItoSums {
    double x2_dx = 0.0;   // sum x_i^2 dx_i
    double x_dx2 = 0.0;   // sum x_i dx_i^2
    double dx3 = 0.0;     // sum dx_i^3
    double abs_scale = 0.0;  // sum of |terms| above, for relative checks
};

// All reductions run over the n - 1 increments of a node array of length n
// (left-point convention: x_i for i < n - 1).
struct KernelTable {
    Isa isa;
    double (*sum_sq_increments)(const double* x, std::size_t n);
    double (*sum_left)(const double* x, std::size_t n);
    double (*sum_well_sq)(const double* x, std::size_t n, double beta_sq);
    /// sum (x_{i+1} - x_i + coef (x_i^2 - beta_sq))^2
    double (*sum_shifted_sq_increments)(const double* x, std::size_t n, double coef,
                                        double beta_sq);
    ItoSums (*ito_sums)(const double* x, std::size_t n);
    /// x_{i+1} = x_i + dchi_i - coef (x_i^2 - beta_sq) for kLanes independent paths.
    /// dchi is step-major [step * kLanes + lane]; out holds steps + 1 nodes, node-major.
    void (*inverse_map_lanes)(const double* dchi, std::size_t steps, const double* x0,
                              double coef, double beta_sq, double* out);
};

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;
[[nodiscard]] bool supported(Isa isa) noexcept;
[[nodiscard]] Isa best_available() noexcept;

/// Kernel table for a specific ISA; throws std::invalid_argument when unsupported.
[[nodiscard]] const KernelTable& table(Isa isa);

/// The table used by the library. Defaults to best_available().
[[nodiscard]] const KernelTable& active() noexcept;
void select(Isa isa);

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(PATHLAB_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
}  // namespace detail

// Span conveniences over the active table.
inline double sum_sq_increments(std::span<const double> x) {
    return active().sum_sq_increments(x.data(), x.size());
}
inline double sum_left(std::span<const double> x) { return active().sum_left(x.data(), x.size()); }
inline double sum_well_sq(std::span<const double> x, double beta_sq) {
    return active().sum_well_sq(x.data(), x.size(), beta_sq);
}
inline double sum_shifted_sq_increments(std::span<const double> x, double coef, double beta_sq) {
    return active().sum_shifted_sq_increments(x.data(), x.size(), coef, beta_sq);
}
inline ItoSums ito_sums(std::span<const double> x) { return active().ito_sums(x.data(), x.size()); }

}  // namespace pathlab::kernels
