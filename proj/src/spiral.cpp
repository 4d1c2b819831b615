#include "ctix/spiral.hpp"

#include <cmath>
#include <stdexcept>

namespace ctix {

uint32_t spiral_encode(int32_t dx, int32_t dy) {
    int64_t ax = dx < 0 ? -int64_t(dx) : dx;
    int64_t ay = dy < 0 ? -int64_t(dy) : dy;
    int64_t r = ax > ay ? ax : ay;
    if (r == 0) return 0;
    if (r > 32767) throw std::invalid_argument("displacement out of range");
    int64_t base = (2 * r - 1) * (2 * r - 1);
    // Edge membership mirrors the clockwise walk; each corner belongs to the
    // edge that reaches it last.
    if (dx == r && dy < r) return uint32_t(base + (r - 1 - dy));
    if (dy == -r) return uint32_t(base + 2 * r + (r - 1 - dx));
    if (dx == -r) return uint32_t(base + 4 * r + (dy + r - 1));
    return uint32_t(base + 6 * r + (dx + r - 1));
}

namespace {

uint32_t isqrt_u32(uint32_t v) {
    // sqrt on a 53-bit mantissa is exact for 32-bit inputs up to rounding;
    // one correction pass settles the boundary cases.
    uint32_t s = static_cast<uint32_t>(std::sqrt(double(v)));
    while (uint64_t(s) * s > v) --s;
    while (uint64_t(s + 1) * (s + 1) <= v) ++s;
    return s;
}

}  // namespace

Displacement spiral_decode(uint32_t code) {
    if (code == 0) return {0, 0};
    int64_t r = (isqrt_u32(code) + 1) / 2;
    int64_t o = code - (2 * r - 1) * (2 * r - 1);
    if (o < 2 * r) return {int32_t(r), int32_t(r - 1 - o)};
    if (o < 4 * r) return {int32_t(3 * r - 1 - o), int32_t(-r)};
    if (o < 6 * r) return {int32_t(-r), int32_t(o - 5 * r + 1)};
    return {int32_t(o - 7 * r + 1), int32_t(r)};
}

}  // namespace ctix
