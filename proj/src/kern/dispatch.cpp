#include "ac/kern/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ac::kern {
namespace {

const Kernels* g_active = nullptr;

const Kernels* pick(std::string_view name) {
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2") {
        const Kernels* k = avx2_kernels();
        if (!k) throw std::runtime_error("kernels: avx2 not supported on this CPU");
        return k;
    }
    if (name == "auto" || name.empty()) {
        if (const Kernels* k = avx2_kernels()) return k;
        return &scalar_kernels();
    }
    throw std::runtime_error("kernels: unknown variant '" + std::string(name) + "'");
}

const Kernels* initial() {
    const char* env = std::getenv("ASYNC_CREDIT_KERNELS");
    return pick(env ? std::string_view(env) : std::string_view("auto"));
}

}  // namespace

const Kernels& active() {
    if (!g_active) g_active = initial();
    return *g_active;
}

void select(std::string_view name) { g_active = pick(name); }

}  // namespace ac::kern
