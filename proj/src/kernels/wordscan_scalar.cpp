#include "shiftlab/kernels/wordscan.hpp"

namespace shiftlab::kernels {

uint32_t scatter_bits(uint32_t value, uint32_t mask) {
    uint32_t out = 0;
    uint32_t m = mask;
    int vbit = 0;
    while (m != 0) {
        uint32_t low = m & (~m + 1);
        if (value & (1u << vbit)) out |= low;
        m &= m - 1;
        ++vbit;
    }
    return out;
}

bool word_dies(uint32_t word, int hull_len, const PackedWord* forbidden,
               std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        const PackedWord& f = forbidden[i];
        if (f.width > hull_len) continue;
        const int max_shift = hull_len - f.width;
        for (int s = 0; s <= max_shift; ++s) {
            if ((((word >> s) ^ f.bits) & f.mask) == 0) return true;
        }
    }
    return false;
}

uint64_t first_survivor_scalar(const ScanFrame& frame, uint64_t v_begin,
                               uint64_t v_end) {
    for (uint64_t v = v_begin; v < v_end; ++v) {
        const uint32_t word =
            frame.fixed_bits | scatter_bits(static_cast<uint32_t>(v), frame.free_mask);
        if (!word_dies(word, frame.hull_len, frame.forbidden, frame.forbidden_count))
            return v;
    }
    return v_end;
}

void kill_containing_scalar(uint64_t* survivors, int len, const PackedWord& f) {
    if (f.width > len) return;
    const uint64_t total = uint64_t{1} << len;
    const int max_shift = len - f.width;
    for (uint64_t w = 0; w < total; ++w) {
        const uint32_t word = static_cast<uint32_t>(w);
        for (int s = 0; s <= max_shift; ++s) {
            if ((((word >> s) ^ f.bits) & f.mask) == 0) {
                survivors[w >> 6] &= ~(uint64_t{1} << (w & 63));
                break;
            }
        }
    }
}

}  // namespace shiftlab::kernels
