#include "pathlab/kernels/kernels.hpp"

#include <cmath>

namespace pathlab::kernels {
namespace {

double sum_sq_increments(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = x[i + 1] - x[i];
        s += d * d;
    }
    return s;
}

double sum_left(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) s += x[i];
    return s;
}

double sum_well_sq(const double* x, std::size_t n, double beta_sq) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double w = x[i] * x[i] - beta_sq;
        s += w * w;
    }
    return s;
}

double sum_shifted_sq_increments(const double* x, std::size_t n, double coef, double beta_sq) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (x[i + 1] - x[i]) + coef * (x[i] * x[i] - beta_sq);
        s += d * d;
    }
    return s;
}

ItoSums ito_sums(const double* x, std::size_t n) {
    ItoSums r;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = x[i + 1] - x[i];
        const double t1 = x[i] * x[i] * d;
        const double t2 = x[i] * d * d;
        const double t3 = d * d * d;
        r.x2_dx += t1;
        r.x_dx2 += t2;
        r.dx3 += t3;
        r.abs_scale += std::abs(t1) + std::abs(t2) + std::abs(t3);
    }
    return r;
}

void inverse_map_lanes(const double* dchi, std::size_t steps, const double* x0, double coef,
                       double beta_sq, double* out) {
    for (std::size_t l = 0; l < kLanes; ++l) out[l] = x0[l];
    for (std::size_t s = 0; s < steps; ++s) {
        const double* cur = out + s * kLanes;
        double* next = out + (s + 1) * kLanes;
        const double* d = dchi + s * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) {
            const double x = cur[l];
            next[l] = (x + d[l]) - coef * (x * x - beta_sq);
        }
    }
}

constexpr KernelTable kScalar{
    Isa::Scalar,         &sum_sq_increments, &sum_left,         &sum_well_sq,
    &sum_shifted_sq_increments, &ito_sums,   &inverse_map_lanes,
};

}  // namespace

const KernelTable& detail::scalar_table() noexcept { return kScalar; }

}  // namespace pathlab::kernels
