#include "shiftlab/kernels/wordscan.hpp"

#include <cstdlib>
#include <cstring>

namespace shiftlab::kernels {

namespace {

std::optional<Impl> g_forced;

Impl detect() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("bmi2"))
        return Impl::avx2;
#endif
    return Impl::scalar;
}

Impl select() {
    if (g_forced) return *g_forced;
    if (const char* env = std::getenv("SHIFTLAB_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Impl::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Impl::avx2;
    }
    return detect();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("bmi2");
#else
    return false;
#endif
}

Impl active_impl() { return select(); }

void force_impl(std::optional<Impl> impl) { g_forced = impl; }

const char* impl_name(Impl impl) {
    return impl == Impl::avx2 ? "avx2" : "scalar";
}

uint64_t first_survivor(const ScanFrame& frame, uint64_t v_begin, uint64_t v_end) {
    if (active_impl() == Impl::avx2)
        return first_survivor_avx2(frame, v_begin, v_end);
    return first_survivor_scalar(frame, v_begin, v_end);
}

void kill_containing(uint64_t* survivors, int len, const PackedWord& f) {
    if (active_impl() == Impl::avx2) {
        kill_containing_avx2(survivors, len, f);
        return;
    }
    kill_containing_scalar(survivors, len, f);
}

}  // namespace shiftlab::kernels
