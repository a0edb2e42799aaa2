#include "ladder/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace ladder::kernels {
namespace {

std::atomic<int> g_forced{-1};

bool env_forces_scalar() {
    const char* v = std::getenv("LADDER_FORCE_SCALAR");
    return v != nullptr && *v != '\0' && std::strcmp(v, "0") != 0;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

void force_scalar(bool on) { g_forced.store(on ? 1 : 0); }

const KernelTable& active() {
    int f = g_forced.load();
    bool scalar = f == 1 || (f == -1 && env_forces_scalar());
    if (!scalar && avx2_available()) return avx2_table();
    return scalar_table();
}

}  // namespace ladder::kernels
