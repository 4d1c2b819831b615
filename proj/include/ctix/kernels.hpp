#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

namespace ctix::kernels {

// Build-time inner loops with data-parallel structure. Each kernel has a
// scalar reference implementation; vector variants are registered per
// architecture and selected once from CPU capabilities. All variants of a
// kernel are observationally identical; the test suite runs them against
// each other on the same inputs.

enum class Variant : uint8_t { scalar = 0, avx2 = 1 };

const char* variant_name(Variant v);
bool variant_available(Variant v);
Variant active_variant();

// Forces a variant for the current process (testing hook). Returns the
// variant actually in effect, which stays unchanged when the requested one
// is unavailable.
Variant force_variant(Variant v);

// Total set bits in words[0..n).
uint64_t count_ones(const uint64_t* words, size_t n);

// Per-block popcounts: out[b] = set bits in words[b*wpb .. min((b+1)*wpb, n)).
// out must hold ceil(n/wpb) entries; wpb > 0.
void block_popcounts(const uint64_t* words, size_t n, size_t wpb, uint64_t* out);

// Spiral codes for n displacement pairs; |dx[i]|, |dy[i]| <= 32767.
void spiral_encode_batch(const int32_t* dx, const int32_t* dy, size_t n, uint32_t* out);

// Component-wise sums of n displacement pairs.
std::pair<int64_t, int64_t> sum_displacements(const int32_t* dx, const int32_t* dy, size_t n);

}  // namespace ctix::kernels
