#include "gss/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "gss/error.hpp"

namespace gss::kernels {

namespace detail {
const Ops* avx2_table();  // defined in kernels_avx2.cpp, nullptr off x86
}

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return detail::avx2_table();
#endif
    return nullptr;
}

namespace {

const Ops* pick_default() {
    if (const char* env = std::getenv("GSS_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0) {
            if (const Ops* t = avx2_ops()) return t;
            throw Error("config_error", "GSS_KERNEL_BACKEND=avx2 but AVX2 is unavailable");
        }
        throw Error("config_error", std::string("unknown GSS_KERNEL_BACKEND value: ") + env);
    }
    if (const Ops* t = avx2_ops()) return t;
    return &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
    static std::atomic<const Ops*> slot{pick_default()};
    return slot;
}

}  // namespace

const Ops& ops() { return *active_slot().load(std::memory_order_acquire); }

void select_backend(Backend b) {
    const Ops* t = nullptr;
    switch (b) {
        case Backend::scalar: t = &scalar_ops(); break;
        case Backend::avx2: t = avx2_ops(); break;
    }
    if (!t) throw Error("config_error", "requested kernel backend is unavailable on this CPU");
    active_slot().store(t, std::memory_order_release);
}

Backend active_backend() {
    return &ops() == &scalar_ops() ? Backend::scalar : Backend::avx2;
}

}  // namespace gss::kernels
