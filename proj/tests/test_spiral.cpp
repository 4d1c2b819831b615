#include <doctest.h>

#include <random>
#include <stdexcept>

#include "ctix/spiral.hpp"
#include "oracles.hpp"

using namespace ctix;

TEST_CASE("spiral codes match an explicit ring walk") {
    auto walk = oracles::spiral_walk(40);
    for (const auto& [d, code] : walk) {
        CHECK(spiral_encode(d.first, d.second) == code);
        Displacement back = spiral_decode(code);
        CHECK(back.dx == d.first);
        CHECK(back.dy == d.second);
    }
    // The walk is a bijection onto 0..(2*40+1)^2-1; spot-check the extent.
    CHECK(walk.size() == 81u * 81u);
}

TEST_CASE("anchor codes") {
    CHECK(spiral_encode(0, 0) == 0);
    CHECK(spiral_encode(1, 0) == 1);
    CHECK(spiral_encode(0, 1) == 7);
    CHECK(spiral_encode(1, 1) == 8);
    CHECK(spiral_encode(2, 1) == 9);
    CHECK(spiral_encode(2, 2) == 24);
    CHECK(spiral_encode(-2, 0) == 18);
    CHECK(spiral_encode(-2, 2) == 20);
    CHECK(spiral_encode(-2, -2) == 16);
}

TEST_CASE("square laws on ring corners") {
    for (int32_t k = 1; k <= 50; ++k) {
        CHECK(spiral_encode(-k, -k) == uint32_t(2 * k) * uint32_t(2 * k));
        CHECK(spiral_encode(k + 1, k) == uint32_t(2 * k + 1) * uint32_t(2 * k + 1));
        // Ring k ends just before ring k+1 starts.
        CHECK(spiral_encode(k, k) == uint32_t(2 * k + 1) * uint32_t(2 * k + 1) - 1);
    }
}

TEST_CASE("decode inverts encode at the extremes") {
    auto gen = oracles::rng(401);
    std::uniform_int_distribution<int32_t> big(-32767, 32767);
    for (int i = 0; i < 20000; ++i) {
        int32_t dx = big(gen), dy = big(gen);
        Displacement d = spiral_decode(spiral_encode(dx, dy));
        CHECK(d.dx == dx);
        CHECK(d.dy == dy);
    }
    Displacement corner = spiral_decode(spiral_encode(32767, -32767));
    CHECK(corner.dx == 32767);
    CHECK(corner.dy == -32767);
    CHECK(spiral_decode(0) == Displacement{0, 0});
}

TEST_CASE("codes are dense: every code below a ring bound decodes inside it") {
    const uint32_t bound = 41 * 41;  // rings 0..20
    for (uint32_t c = 0; c < bound; ++c) {
        Displacement d = spiral_decode(c);
        CHECK(std::max(std::abs(d.dx), std::abs(d.dy)) <= 20);
        CHECK(spiral_encode(d) == c);
    }
}

TEST_CASE("displacements beyond the supported range are rejected") {
    CHECK_THROWS_AS(spiral_encode(32768, 0), std::invalid_argument);
    CHECK_THROWS_AS(spiral_encode(0, -32768), std::invalid_argument);
}
