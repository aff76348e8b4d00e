#include "shiftlab/kernels/wordscan.hpp"

#if defined(__AVX2__) && defined(__BMI2__)

#include <immintrin.h>

namespace shiftlab::kernels {

namespace {

// 8-lane dead mask (bit j set when lane j's word contains some forbidden).
inline uint32_t dead_lanes(__m256i words, int hull_len, const PackedWord* forbidden,
                           std::size_t count) {
    __m256i dead = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    for (std::size_t i = 0; i < count; ++i) {
        const PackedWord& f = forbidden[i];
        if (f.width > hull_len) continue;
        const __m256i fbits = _mm256_set1_epi32(static_cast<int>(f.bits));
        const __m256i fmask = _mm256_set1_epi32(static_cast<int>(f.mask));
        const int max_shift = hull_len - f.width;
        for (int s = 0; s <= max_shift; ++s) {
            const __m256i shifted = _mm256_srl_epi32(words, _mm_cvtsi32_si128(s));
            const __m256i diff =
                _mm256_and_si256(_mm256_xor_si256(shifted, fbits), fmask);
            dead = _mm256_or_si256(dead, _mm256_cmpeq_epi32(diff, zero));
        }
    }
    return static_cast<uint32_t>(_mm256_movemask_ps(_mm256_castsi256_ps(dead)));
}

inline __m256i fill_words(const ScanFrame& frame, uint64_t v) {
    alignas(32) int lanes[8];
    for (int j = 0; j < 8; ++j) {
        lanes[j] = static_cast<int>(
            frame.fixed_bits |
            _pdep_u32(static_cast<uint32_t>(v + static_cast<uint64_t>(j)),
                      frame.free_mask));
    }
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes));
}

}  // namespace

uint64_t first_survivor_avx2(const ScanFrame& frame, uint64_t v_begin,
                             uint64_t v_end) {
    uint64_t v = v_begin;
    while (v + 8 <= v_end) {
        const uint32_t dead = dead_lanes(fill_words(frame, v), frame.hull_len,
                                         frame.forbidden, frame.forbidden_count);
        if (dead != 0xffu) {
            for (int j = 0; j < 8; ++j) {
                if ((dead & (1u << j)) == 0) return v + static_cast<uint64_t>(j);
            }
        }
        v += 8;
    }
    return first_survivor_scalar(frame, v, v_end);
}

void kill_containing_avx2(uint64_t* survivors, int len, const PackedWord& f) {
    if (f.width > len) return;
    const uint64_t total = uint64_t{1} << len;
    if (total < 64) {
        kill_containing_scalar(survivors, len, f);
        return;
    }
    const __m256i iota = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    for (uint64_t base = 0; base < total; base += 64) {
        uint64_t dead64 = 0;
        for (int blk = 0; blk < 8; ++blk) {
            const __m256i words = _mm256_add_epi32(
                _mm256_set1_epi32(static_cast<int>(base + uint64_t(blk) * 8)), iota);
            const uint32_t dead = dead_lanes(words, len, &f, 1);
            dead64 |= static_cast<uint64_t>(dead) << (blk * 8);
        }
        survivors[base >> 6] &= ~dead64;
    }
}

}  // namespace shiftlab::kernels

#else

namespace shiftlab::kernels {

uint64_t first_survivor_avx2(const ScanFrame& frame, uint64_t v_begin,
                             uint64_t v_end) {
    return first_survivor_scalar(frame, v_begin, v_end);
}

void kill_containing_avx2(uint64_t* survivors, int len, const PackedWord& f) {
    kill_containing_scalar(survivors, len, f);
}

}  // namespace shiftlab::kernels

#endif
