#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace shiftlab::kernels {

// A masked binary word packed into 32 bits. The letter of cell i sits at
// bit i; `mask` marks the cells that carry a constraint (gapped patterns
// have holes in the mask). `bits` is always a subset of `mask`.
struct PackedWord {
    uint32_t bits = 0;
    uint32_t mask = 0;
    int width = 0;  // cells [0, width)
};

// One flat exhaustion frame over a contiguous hull of `hull_len` binary
// cells: `fixed_bits` are the already-placed letters, the remaining cells
// are the set bits of `free_mask`. Filling value v scatters its low bits
// into `free_mask` in ascending bit-position order, so v order equals the
// numeric order of the filled words.
struct ScanFrame {
    uint32_t fixed_bits = 0;
    uint32_t free_mask = 0;
    int hull_len = 0;
    const PackedWord* forbidden = nullptr;
    std::size_t forbidden_count = 0;
};

// Software pdep: scatter the low popcount(mask) bits of value into mask,
// lowest value bit -> lowest set mask bit.
uint32_t scatter_bits(uint32_t value, uint32_t mask);

// True when some forbidden word occurs in `word` (all shifts that keep the
// forbidden support inside the hull).
bool word_dies(uint32_t word, int hull_len, const PackedWord* forbidden,
               std::size_t count);

// Index of the first filling v in [v_begin, v_end) whose filled word
// survives every forbidden test, or v_end when every filling dies.
uint64_t first_survivor(const ScanFrame& frame, uint64_t v_begin, uint64_t v_end);
uint64_t first_survivor_scalar(const ScanFrame& frame, uint64_t v_begin, uint64_t v_end);
uint64_t first_survivor_avx2(const ScanFrame& frame, uint64_t v_begin, uint64_t v_end);

// Clears survivors[w] for every length-`len` binary word w (0 <= w < 2^len,
// letter i at bit i) that contains the packed word. `survivors` holds
// 2^len bits in u64 blocks, bit w of block w/64.
void kill_containing(uint64_t* survivors, int len, const PackedWord& f);
void kill_containing_scalar(uint64_t* survivors, int len, const PackedWord& f);
void kill_containing_avx2(uint64_t* survivors, int len, const PackedWord& f);

enum class Impl { scalar, avx2 };

bool avx2_supported();
// Active implementation: SHIFTLAB_SIMD=scalar|avx2|auto, else auto-detect.
Impl active_impl();
// Test hook; pass nullopt to restore env/auto selection.
void force_impl(std::optional<Impl> impl);
const char* impl_name(Impl impl);

}  // namespace shiftlab::kernels
