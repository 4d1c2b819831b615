#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ctix/bitseq.hpp"
#include "ctix/io.hpp"

namespace ctix {

// Pointerless quadtree over a side x side grid (side = k^height, the smallest
// power of k covering both dimensions). Internal levels live concatenated in
// T, the deepest level in L; the children of the 1-bit at position p of T
// start at block rank1(T, p) * k*k of the concatenation T:L. Quadrants are
// numbered row-major within each block.
class K2Tree {
public:
    K2Tree() = default;

    // Points are (row, col), zero-based, duplicates allowed. k in {2, 3, 4}.
    static K2Tree build(uint32_t k, uint64_t rows, uint64_t cols,
                        std::vector<std::pair<uint64_t, uint64_t>> points);

    uint32_t k() const { return k_; }
    uint64_t rows() const { return rows_; }
    uint64_t cols() const { return cols_; }
    uint64_t side() const { return side_; }
    uint32_t height() const { return height_; }

    const BitSequence& tree_bits() const { return tree_; }
    const BitSequence& leaf_bits() const { return leaves_; }

    // Index into leaf_bits() of the cell, or -1 when the path from the root
    // dies early (the cell is then provably empty). A non-negative result
    // still needs the leaf bit checked: an occupied sibling keeps the block
    // alive.
    int64_t leaf_index(uint64_t row, uint64_t col) const;
    bool cell_occupied(uint64_t row, uint64_t col) const;

    // Walks parent links (select over T) back to the root.
    std::pair<uint64_t, uint64_t> cell_of_leaf(uint64_t leaf) const;

    struct RegionHit {
        uint64_t leaf;
        uint64_t row, col;
    };
    // Occupied cells intersecting [r1, r2] x [c1, c2], ascending by leaf index.
    std::vector<RegionHit> region(uint64_t r1, uint64_t r2, uint64_t c1, uint64_t c2) const;

    void save(io::Writer& w) const;
    static K2Tree load(io::Reader& r);
    uint64_t bytes() const { return tree_.bytes() + leaves_.bytes() + 3 * 8; }

private:
    void region_walk(uint64_t block, uint32_t level, uint64_t row0, uint64_t col0, uint64_t sub,
                     uint64_t r1, uint64_t r2, uint64_t c1, uint64_t c2,
                     std::vector<RegionHit>& out) const;

    uint32_t k_ = 2;
    uint32_t height_ = 0;
    uint64_t side_ = 0;
    uint64_t rows_ = 0;
    uint64_t cols_ = 0;
    BitSequence tree_;
    BitSequence leaves_;
};

}  // namespace ctix
