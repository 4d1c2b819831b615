// AVX2 kernel variants. Compiled with -mavx2 and only reached after a
// runtime capability check; everything here must stay observationally
// identical to the scalar reference for in-range inputs.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>
#include <utility>

namespace ctix::kernels::avx2 {

namespace {

// Nibble-table popcount; returns four 64-bit partial sums per 256-bit lane
// group via SAD against zero.
inline __m256i popcount_epi64(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
    __m256i cnt8 = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(cnt8, _mm256_setzero_si256());
}

inline uint64_t hsum_epi64(__m256i v) {
    __m128i lo = _mm256_castsi256_si128(v);
    __m128i hi = _mm256_extracti128_si256(v, 1);
    __m128i s = _mm_add_epi64(lo, hi);
    return uint64_t(_mm_cvtsi128_si64(s)) + uint64_t(_mm_extract_epi64(s, 1));
}

inline uint64_t count_ones_range(const uint64_t* words, size_t n) {
    __m256i acc = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + i));
        acc = _mm256_add_epi64(acc, popcount_epi64(v));
    }
    uint64_t total = hsum_epi64(acc);
    for (; i < n; ++i) total += uint64_t(__builtin_popcountll(words[i]));
    return total;
}

}  // namespace

uint64_t count_ones(const uint64_t* words, size_t n) { return count_ones_range(words, n); }

void block_popcounts(const uint64_t* words, size_t n, size_t wpb, uint64_t* out) {
    size_t b = 0;
    for (size_t i = 0; i < n; i += wpb) {
        size_t end = i + wpb < n ? i + wpb : n;
        out[b++] = count_ones_range(words + i, end - i);
    }
}

void spiral_encode_batch(const int32_t* dx, const int32_t* dy, size_t n, uint32_t* out) {
    const __m256i one = _mm256_set1_epi32(1);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dx + i));
        __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dy + i));
        __m256i r = _mm256_max_epi32(_mm256_abs_epi32(x), _mm256_abs_epi32(y));
        __m256i nr = _mm256_sub_epi32(_mm256_setzero_si256(), r);
        // base = (2r-1)^2; 32-bit wraparound is harmless because the true
        // code always fits in 32 bits for in-range displacements.
        __m256i tr1 = _mm256_sub_epi32(_mm256_add_epi32(r, r), one);
        __m256i base = _mm256_mullo_epi32(tr1, tr1);
        __m256i rm1 = _mm256_sub_epi32(r, one);

        // Edge values in walk order; later blends have higher precedence.
        __m256i v1 = _mm256_add_epi32(base, _mm256_sub_epi32(rm1, y));
        __m256i v2 = _mm256_add_epi32(base, _mm256_add_epi32(_mm256_add_epi32(r, r), _mm256_sub_epi32(rm1, x)));
        __m256i v3 = _mm256_add_epi32(base, _mm256_add_epi32(_mm256_slli_epi32(r, 2), _mm256_add_epi32(y, rm1)));
        __m256i v4 = _mm256_add_epi32(
            base, _mm256_add_epi32(_mm256_add_epi32(_mm256_slli_epi32(r, 2), _mm256_add_epi32(r, r)),
                                   _mm256_add_epi32(x, rm1)));

        __m256i e1 = _mm256_and_si256(_mm256_cmpeq_epi32(x, r), _mm256_cmpgt_epi32(r, y));
        __m256i e2 = _mm256_cmpeq_epi32(y, nr);
        __m256i e3 = _mm256_cmpeq_epi32(x, nr);

        __m256i res = v4;
        res = _mm256_blendv_epi8(res, v3, e3);
        res = _mm256_blendv_epi8(res, v2, e2);
        res = _mm256_blendv_epi8(res, v1, e1);
        // Ring 0 is the single code 0.
        res = _mm256_andnot_si256(_mm256_cmpeq_epi32(r, _mm256_setzero_si256()), res);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), res);
    }
    for (; i < n; ++i) {
        // Scalar closed form, kept in sync with the vector lanes above.
        int32_t xs = dx[i], ys = dy[i];
        int32_t ax = xs < 0 ? -xs : xs, ay = ys < 0 ? -ys : ys;
        int32_t r = ax > ay ? ax : ay;
        if (r == 0) {
            out[i] = 0;
            continue;
        }
        uint32_t base = uint32_t(2 * r - 1) * uint32_t(2 * r - 1);
        if (xs == r && ys < r) out[i] = base + uint32_t(r - 1 - ys);
        else if (ys == -r) out[i] = base + uint32_t(2 * r) + uint32_t(r - 1 - xs);
        else if (xs == -r) out[i] = base + uint32_t(4 * r) + uint32_t(ys + r - 1);
        else out[i] = base + uint32_t(6 * r) + uint32_t(xs + r - 1);
    }
}

std::pair<int64_t, int64_t> sum_displacements(const int32_t* dx, const int32_t* dy, size_t n) {
    __m256i accx = _mm256_setzero_si256();
    __m256i accy = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dx + i));
        __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dy + i));
        accx = _mm256_add_epi64(accx, _mm256_cvtepi32_epi64(x));
        accy = _mm256_add_epi64(accy, _mm256_cvtepi32_epi64(y));
    }
    int64_t sx = int64_t(hsum_epi64(accx));
    int64_t sy = int64_t(hsum_epi64(accy));
    for (; i < n; ++i) {
        sx += dx[i];
        sy += dy[i];
    }
    return {sx, sy};
}

}  // namespace ctix::kernels::avx2
