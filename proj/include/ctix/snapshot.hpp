#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "ctix/bitseq.hpp"
#include "ctix/io.hpp"
#include "ctix/k2tree.hpp"
#include "ctix/permutation.hpp"
#include "ctix/spiral.hpp"

namespace ctix {

// Return of an object that vanished and came back between the same pair of
// snapshots: elapsed instants since its last known position plus the
// displacement across the gap. Movement streams point at these by index.
struct RelReappearance {
    uint32_t oid = 0;
    uint32_t elapsed = 0;  // >= 2: one instant of absence minimum
    Displacement delta;
};

// Return of an object last seen before the governing snapshot; the position
// is absolute because there is nothing in range to be relative to. At most
// one per object per segment: once back, later returns are relative.
struct AbsReappearance {
    uint32_t oid = 0;
    uint32_t instant = 0;
    uint32_t row = 0, col = 0;
};

struct ReappearanceTables {
    std::vector<RelReappearance> rel;  // in stream-encounter order
    std::vector<AbsReappearance> abs;  // sorted by oid

    const AbsReappearance* abs_of(uint32_t oid) const;

    void save(io::Writer& w) const;
    static ReappearanceTables load(io::Reader& r);
    uint64_t bytes() const { return rel.size() * 16 + abs.size() * 16 + 16; }
};

// Every placed object at one instant: occupancy as a K2Tree, object ids
// grouped by occupied leaf (perm), the quantity bitmap Q whose 0 bits close
// each group, and a shortcut permutation for id -> perm position. Objects
// absent at the instant are not placed; they come back through the
// reappearance tables of the following segment.
class Snapshot {
public:
    Snapshot() = default;

    struct Placement {
        uint32_t oid;
        uint32_t row, col;
    };

    // Duplicate oids rejected; several objects may share a cell.
    static Snapshot build(std::vector<Placement> placements, uint32_t rows, uint32_t cols,
                          uint32_t k);

    size_t placed() const { return perm_.size(); }
    const K2Tree& tree() const { return tree_; }
    const std::vector<uint32_t>& perm() const { return perm_; }
    const BitSequence& quantity() const { return q_; }

    // Reappearances of the segment this snapshot governs; filled by the
    // index builder once that segment has been collected.
    ReappearanceTables tables;

    std::vector<uint32_t> objects_in_cell(uint32_t row, uint32_t col) const;

    // Placement cell, or nothing when the object is not placed here.
    std::optional<std::pair<uint32_t, uint32_t>> cell_of_object(uint32_t oid) const;

    // All placements intersecting the rectangle (bounds clipped), grouped by
    // leaf in quadrant order.
    std::vector<Placement> objects_in_region(uint32_t r1, uint32_t r2, uint32_t c1,
                                             uint32_t c2) const;

    void save(io::Writer& w) const;
    static Snapshot load(io::Reader& r);
    uint64_t bytes() const;

private:
    void read_group(size_t leaf, std::vector<uint32_t>& out) const;

    K2Tree tree_;
    std::vector<uint32_t> perm_;
    BitSequence q_;
    ShortcutPermutation inv_;          // values[pos] = rank of perm_[pos] among placed ids
    std::vector<uint32_t> sorted_ids_; // placed ids ascending; rebuilt on load
};

}  // namespace ctix
