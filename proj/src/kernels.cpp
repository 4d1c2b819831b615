#include "ctix/kernels.hpp"

#include "ctix/spiral.hpp"

namespace ctix::kernels {

// ---------------------------------------------------------------- scalar --

namespace scalar {

uint64_t count_ones(const uint64_t* words, size_t n) {
    uint64_t total = 0;
    for (size_t i = 0; i < n; ++i) total += uint64_t(__builtin_popcountll(words[i]));
    return total;
}

void block_popcounts(const uint64_t* words, size_t n, size_t wpb, uint64_t* out) {
    size_t b = 0;
    for (size_t i = 0; i < n; i += wpb) {
        size_t end = i + wpb < n ? i + wpb : n;
        uint64_t sum = 0;
        for (size_t j = i; j < end; ++j) sum += uint64_t(__builtin_popcountll(words[j]));
        out[b++] = sum;
    }
}

void spiral_encode_batch(const int32_t* dx, const int32_t* dy, size_t n, uint32_t* out) {
    for (size_t i = 0; i < n; ++i) out[i] = spiral_encode(dx[i], dy[i]);
}

std::pair<int64_t, int64_t> sum_displacements(const int32_t* dx, const int32_t* dy, size_t n) {
    int64_t sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += dx[i];
        sy += dy[i];
    }
    return {sx, sy};
}

}  // namespace scalar

// -------------------------------------------------------------- dispatch --

#if defined(CTIX_HAVE_AVX2_VARIANTS)
namespace avx2 {
uint64_t count_ones(const uint64_t* words, size_t n);
void block_popcounts(const uint64_t* words, size_t n, size_t wpb, uint64_t* out);
void spiral_encode_batch(const int32_t* dx, const int32_t* dy, size_t n, uint32_t* out);
std::pair<int64_t, int64_t> sum_displacements(const int32_t* dx, const int32_t* dy, size_t n);
}  // namespace avx2
#endif

namespace {

struct KernelTable {
    uint64_t (*count_ones)(const uint64_t*, size_t);
    void (*block_popcounts)(const uint64_t*, size_t, size_t, uint64_t*);
    void (*spiral_encode_batch)(const int32_t*, const int32_t*, size_t, uint32_t*);
    std::pair<int64_t, int64_t> (*sum_displacements)(const int32_t*, const int32_t*, size_t);
};

constexpr KernelTable kScalarTable = {
    scalar::count_ones,
    scalar::block_popcounts,
    scalar::spiral_encode_batch,
    scalar::sum_displacements,
};

#if defined(CTIX_HAVE_AVX2_VARIANTS)
constexpr KernelTable kAvx2Table = {
    avx2::count_ones,
    avx2::block_popcounts,
    avx2::spiral_encode_batch,
    avx2::sum_displacements,
};
#endif

bool avx2_supported() {
#if defined(CTIX_HAVE_AVX2_VARIANTS)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

struct Dispatch {
    const KernelTable* table;
    Variant variant;

    Dispatch() {
#if defined(CTIX_HAVE_AVX2_VARIANTS)
        if (avx2_supported()) {
            table = &kAvx2Table;
            variant = Variant::avx2;
            return;
        }
#endif
        table = &kScalarTable;
        variant = Variant::scalar;
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::scalar: return "scalar";
        case Variant::avx2: return "avx2";
    }
    return "?";
}

bool variant_available(Variant v) {
    if (v == Variant::scalar) return true;
    if (v == Variant::avx2) return avx2_supported();
    return false;
}

Variant active_variant() { return dispatch().variant; }

Variant force_variant(Variant v) {
    if (!variant_available(v)) return dispatch().variant;
    switch (v) {
        case Variant::scalar:
            dispatch().table = &kScalarTable;
            break;
        case Variant::avx2:
#if defined(CTIX_HAVE_AVX2_VARIANTS)
            dispatch().table = &kAvx2Table;
#endif
            break;
    }
    dispatch().variant = v;
    return v;
}

uint64_t count_ones(const uint64_t* words, size_t n) {
    return dispatch().table->count_ones(words, n);
}

void block_popcounts(const uint64_t* words, size_t n, size_t wpb, uint64_t* out) {
    dispatch().table->block_popcounts(words, n, wpb, out);
}

void spiral_encode_batch(const int32_t* dx, const int32_t* dy, size_t n, uint32_t* out) {
    dispatch().table->spiral_encode_batch(dx, dy, n, out);
}

std::pair<int64_t, int64_t> sum_displacements(const int32_t* dx, const int32_t* dy, size_t n) {
    return dispatch().table->sum_displacements(dx, dy, n);
}

}  // namespace ctix::kernels
