#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctix/dataset.hpp"
#include "ctix/io.hpp"
#include "ctix/log.hpp"
#include "ctix/scdc.hpp"
#include "ctix/snapshot.hpp"

namespace ctix {

struct IndexParams {
    uint32_t snapshot_period = 30;  // instants between snapshots, >= 1
    uint32_t k = 2;                 // K2Tree arity
    uint32_t max_step = 0;          // cells/instant bound; 0 derives it from the data
    uint32_t accum_interval = 0;    // checkpoint spacing; 0 = accumulators off
    bool bidirectional = false;     // store tails, replay from the nearer end
};

struct ComponentSizes {
    uint64_t snapshots = 0;  // trees, id groups, quantity bitmaps, inverses
    uint64_t reappearance_tables = 0;
    uint64_t streams = 0;
    uint64_t stream_offsets = 0;
    uint64_t tails = 0;
    uint64_t checkpoints = 0;
    uint64_t model = 0;
    uint64_t dictionary = 0;
    uint64_t header = 0;  // magic, params, structural counts and offsets

    uint64_t total() const {
        return snapshots + reappearance_tables + streams + stream_offsets + tails + checkpoints +
               model + dictionary + header;
    }
};

struct StatsReport {
    ComponentSizes sizes;
    // 8 bytes per present (object, instant) pair: the plain encoding the
    // ratio is measured against.
    uint64_t baseline = 0;
    bool ratio_defined = false;  // false when the baseline is empty
    double ratio_percent = 0.0;
    uint64_t present_pairs = 0;
    uint32_t objects = 0;
    uint32_t rows = 0, cols = 0, instants = 0;
    uint32_t snapshot_count = 0;
};

// Compressed moving-object index: occupancy snapshots every P instants and
// dense-coded movement streams between them. Queries run on the compressed
// form; object ids are dense indexes into the external-id dictionary.
class TrajectoryIndex {
public:
    TrajectoryIndex() = default;

    static TrajectoryIndex build(const Dataset& ds, const IndexParams& params);

    struct SliceHit {
        uint32_t oid;
        uint32_t row, col;
    };
    struct IntervalHit {
        uint32_t oid;
        uint32_t row, col;  // where it first qualified
        uint32_t instant;
    };

    std::optional<std::pair<uint32_t, uint32_t>> object_position(uint32_t oid, uint32_t t) const;
    std::vector<std::optional<std::pair<uint32_t, uint32_t>>> object_trajectory(uint32_t oid,
                                                                                uint32_t t1,
                                                                                uint32_t t2) const;
    std::vector<SliceHit> time_slice(uint32_t r1, uint32_t r2, uint32_t c1, uint32_t c2,
                                     uint32_t t) const;
    std::vector<IntervalHit> time_interval(uint32_t r1, uint32_t r2, uint32_t c1, uint32_t c2,
                                           uint32_t t1, uint32_t t2) const;

    StatsReport stats() const;

    const IndexParams& params() const { return params_; }
    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    uint32_t instants() const { return instants_; }
    uint32_t objects() const { return uint32_t(ids_.size()); }
    double cell_size() const { return cell_size_; }
    double bucket_seconds() const { return bucket_seconds_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::optional<uint32_t> dense_id(const std::string& external) const;
    size_t snapshot_count() const { return snapshots_.size(); }

    void save(io::Writer& w) const;
    static TrajectoryIndex load(io::Reader& r);
    void save_file(const std::string& path) const;
    static TrajectoryIndex load_file(const std::string& path);

private:
    log::SegmentContext ctx(size_t i) const {
        return {segments_[i], snapshots_[i], model_, sparams_, space_};
    }
    size_t segment_of(uint32_t t) const { return t / params_.snapshot_period; }
    void check_rect(uint32_t r1, uint32_t r2, uint32_t c1, uint32_t c2) const;
    void rebuild_id_map();

    // Candidates able to reach [r1,r2]x[c1,c2] by instant t, judged from
    // segment i's snapshot placements and absolute reappearances.
    std::vector<uint32_t> reach_candidates(size_t i, uint32_t r1, uint32_t r2, uint32_t c1,
                                           uint32_t c2, uint32_t t) const;

    IndexParams params_;
    uint32_t rows_ = 0, cols_ = 0, instants_ = 0;
    double cell_size_ = 1.0, bucket_seconds_ = 1.0;
    uint64_t present_pairs_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, uint32_t> id_map_;
    log::SymbolSpace space_;
    scdc::FrequencyModel model_;
    scdc::Params sparams_;
    std::vector<Snapshot> snapshots_;
    std::vector<log::LogSegment> segments_;
};

}  // namespace ctix
