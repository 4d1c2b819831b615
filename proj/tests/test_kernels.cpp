#include <doctest.h>

#include <bit>
#include <random>
#include <vector>

#include "ctix/kernels.hpp"
#include "ctix/spiral.hpp"
#include "oracles.hpp"

using namespace ctix;

namespace {

std::vector<kernels::Variant> testable_variants() {
    std::vector<kernels::Variant> v{kernels::Variant::scalar};
    if (kernels::variant_available(kernels::Variant::avx2)) v.push_back(kernels::Variant::avx2);
    return v;
}

struct VariantGuard {
    kernels::Variant saved = kernels::active_variant();
    ~VariantGuard() { kernels::force_variant(saved); }
};

}  // namespace

TEST_CASE("kernel variant bookkeeping") {
    VariantGuard guard;
    CHECK(kernels::variant_available(kernels::Variant::scalar));
    CHECK(kernels::force_variant(kernels::Variant::scalar) == kernels::Variant::scalar);
    CHECK(kernels::active_variant() == kernels::Variant::scalar);
    CHECK(std::string(kernels::variant_name(kernels::Variant::scalar)) == "scalar");
    CHECK(std::string(kernels::variant_name(kernels::Variant::avx2)) == "avx2");
}

TEST_CASE("count_ones matches std::popcount across variants") {
    VariantGuard guard;
    auto gen = oracles::rng(101);
    for (size_t n : {size_t(0), size_t(1), size_t(3), size_t(4), size_t(5), size_t(64),
                     size_t(257), size_t(1000)}) {
        std::vector<uint64_t> words(n);
        for (auto& w : words) w = gen();
        uint64_t expect = 0;
        for (auto w : words) expect += std::popcount(w);
        for (auto v : testable_variants()) {
            kernels::force_variant(v);
            CHECK(kernels::count_ones(words.data(), words.size()) == expect);
        }
    }
}

TEST_CASE("block_popcounts matches per-block loop across variants") {
    VariantGuard guard;
    auto gen = oracles::rng(102);
    for (size_t n : {size_t(1), size_t(7), size_t(8), size_t(9), size_t(63), size_t(512)}) {
        for (size_t wpb : {size_t(1), size_t(3), size_t(8)}) {
            std::vector<uint64_t> words(n);
            for (auto& w : words) w = gen();
            size_t nblocks = (n + wpb - 1) / wpb;
            std::vector<uint64_t> expect(nblocks, 0);
            for (size_t i = 0; i < n; ++i) expect[i / wpb] += std::popcount(words[i]);
            for (auto v : testable_variants()) {
                kernels::force_variant(v);
                std::vector<uint64_t> got(nblocks, ~uint64_t(0));
                kernels::block_popcounts(words.data(), n, wpb, got.data());
                CHECK(got == expect);
            }
        }
    }
}

TEST_CASE("spiral_encode_batch agrees with the scalar codec across variants") {
    VariantGuard guard;
    auto gen = oracles::rng(103);
    std::uniform_int_distribution<int32_t> small(-300, 300);
    std::vector<int32_t> dx, dy;
    for (int i = 0; i < 5000; ++i) {
        dx.push_back(small(gen));
        dy.push_back(small(gen));
    }
    // Extremes and corners of several rings.
    for (int32_t v : {0, 1, -1, 2, -2, 32767, -32767}) {
        for (int32_t w : {0, 1, -1, 32767, -32767}) {
            dx.push_back(v);
            dy.push_back(w);
        }
    }
    std::vector<uint32_t> expect(dx.size());
    for (size_t i = 0; i < dx.size(); ++i) expect[i] = spiral_encode(dx[i], dy[i]);
    for (auto v : testable_variants()) {
        kernels::force_variant(v);
        std::vector<uint32_t> got(dx.size(), ~uint32_t(0));
        kernels::spiral_encode_batch(dx.data(), dy.data(), dx.size(), got.data());
        CHECK(got == expect);
    }
}

TEST_CASE("sum_displacements matches accumulation across variants") {
    VariantGuard guard;
    auto gen = oracles::rng(104);
    std::uniform_int_distribution<int32_t> any(-1000000, 1000000);
    for (size_t n : {size_t(0), size_t(1), size_t(7), size_t(8), size_t(1001)}) {
        std::vector<int32_t> dx(n), dy(n);
        int64_t ex = 0, ey = 0;
        for (size_t i = 0; i < n; ++i) {
            dx[i] = any(gen);
            dy[i] = any(gen);
            ex += dx[i];
            ey += dy[i];
        }
        for (auto v : testable_variants()) {
            kernels::force_variant(v);
            auto [gx, gy] = kernels::sum_displacements(dx.data(), dy.data(), n);
            CHECK(gx == ex);
            CHECK(gy == ey);
        }
    }
}
