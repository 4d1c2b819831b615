#pragma once

#include <cstdint>
#include <vector>

#include "ctix/bitseq.hpp"
#include "ctix/io.hpp"

namespace ctix {

// Permutation of 0..n-1 stored plainly, with sampled back-links on long
// cycles so the inverse never walks more than about one sampling interval.
//
// Marks are laid every sample_rate steps along each cycle longer than
// sample_rate, each mark linking back to the previous mark. The inverse walk
// starts at position v, always tests the cycle-closing step before anything
// else (so the closing step cannot be skipped), and takes at most one
// back-link per query; that caps the walk at sample_rate + 1 moves.
struct ShortcutPermutation {
    std::vector<uint32_t> values;
    BitSequence sampled;
    std::vector<uint32_t> rev_links;  // one target per set bit of sampled, in position order
    uint32_t sample_rate = 0;

    size_t size() const { return values.size(); }

    // values[i], bounds-checked.
    uint32_t apply(size_t i) const;

    // Position i with values[i] == v.
    uint32_t inverse(uint32_t v) const;

    struct InverseWalk {
        uint32_t position;
        uint32_t steps;  // moves along the cycle, shortcut jumps included
        bool took_shortcut;
    };
    InverseWalk inverse_walk(uint32_t v) const;

    void save(io::Writer& w) const;
    static ShortcutPermutation load(io::Reader& r);
    uint64_t bytes() const;
};

// values must be a bijection on 0..n-1. sample_rate 0 picks the default
// ceil(log2 n), clamped to at least 1.
ShortcutPermutation build_permutation(std::vector<uint32_t> values, uint32_t sample_rate = 0);

}  // namespace ctix
