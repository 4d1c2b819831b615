#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctix/bitseq.hpp"
#include "ctix/io.hpp"

namespace ctix {

// Regular-grid, regular-time trajectories with gaps. Object ids are dense
// indexes 0..m-1 into the external-id dictionary; an absent (object, instant)
// pair simply has no cell. Presence is a bitmap in object-major order, so a
// position lookup is one rank into the packed cell arrays.
class Dataset {
public:
    uint32_t rows = 0, cols = 0;
    uint32_t instants = 0;
    double cell_size = 1.0;       // grid cell side in input units (metadata)
    double bucket_seconds = 1.0;  // seconds represented by one instant (metadata)
    std::vector<std::string> ids;

    using Cell = std::pair<uint32_t, uint32_t>;
    using Track = std::vector<std::optional<Cell>>;  // indexed by instant

    size_t objects() const { return ids.size(); }
    uint64_t present_count() const { return presence_.count(true); }

    bool present(uint32_t o, uint32_t t) const;
    Cell position(uint32_t o, uint32_t t) const;  // throws when absent

    static Dataset from_tracks(uint32_t rows, uint32_t cols, uint32_t instants,
                               std::vector<std::string> ids, const std::vector<Track>& tracks,
                               double cell_size, double bucket_seconds);

    void save(io::Writer& w) const;
    static Dataset load(io::Reader& r);

private:
    size_t slot(uint32_t o, uint32_t t) const { return size_t(o) * instants + t; }

    BitSequence presence_;
    std::vector<uint32_t> cell_rows_, cell_cols_;  // packed by presence rank
};

}  // namespace ctix
