#pragma once

#include <cstdint>

namespace ctix {

// Relative movement between two grid cells. Component order follows the
// dataset's (row, col) axes: dx is the row delta, dy the column delta.
struct Displacement {
    int32_t dx = 0;
    int32_t dy = 0;

    friend bool operator==(const Displacement& a, const Displacement& b) {
        return a.dx == b.dx && a.dy == b.dy;
    }
};

// Square-spiral enumeration of displacements. Codes grow with the Chebyshev
// ring r = max(|dx|, |dy|): ring r owns the interval [(2r-1)^2, (2r+1)^2).
// Within a ring the walk starts at (r, r-1) and proceeds clockwise: down the
// dy-descending edge to (r, -r), across to (-r, -r), up to (-r, r), across to
// (r, r). Consequences used as fixed anchors elsewhere:
//
//   (0,0) -> 0      (1,0)  -> 1     (0,1)  -> 7     (1,1) -> 8
//   (2,1) -> 9      (2,2)  -> 24    (-2,0) -> 18
//   (-2,2) -> 20    (-2,-2)-> 16
//   (-k,-k) -> (2k)^2    (k+1,k) -> (2k+1)^2
//
// Small displacements get small codes, which is what makes the downstream
// byte coder effective on slow-moving objects.
//
// Valid input range: |dx|, |dy| <= 32767 (codes then fit in 32 bits).

uint32_t spiral_encode(int32_t dx, int32_t dy);
inline uint32_t spiral_encode(const Displacement& d) { return spiral_encode(d.dx, d.dy); }

Displacement spiral_decode(uint32_t code);

}  // namespace ctix
