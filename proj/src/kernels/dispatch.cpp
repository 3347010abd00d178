#include "pathlab/kernels/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace pathlab::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(PATHLAB_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
    }
    return false;
}

// TODO: add a NEON table for aarch64 builds.
Isa best_available() noexcept { return supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

const KernelTable& table(Isa isa) {
    if (!supported(isa))
        throw std::invalid_argument("kernel ISA '" + std::string(to_string(isa)) +
                                    "' is not available on this machine/build");
#if defined(PATHLAB_HAVE_AVX2)
    if (isa == Isa::Avx2) return detail::avx2_table();
#endif
    return detail::scalar_table();
}

namespace {
std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{&table(best_available())};
    return slot;
}
}  // namespace

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void select(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

}  // namespace pathlab::kernels
