#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ctix/dataset.hpp"
#include "ctix/io.hpp"
#include "ctix/scdc.hpp"
#include "ctix/snapshot.hpp"
#include "ctix/spiral.hpp"

namespace ctix::log {

using Cell = std::pair<uint32_t, uint32_t>;

constexpr uint32_t kNoInstant = UINT32_MAX;

// One integer alphabet for the byte coder: spiral move codes first, control
// symbols right above them. max_move is fixed index-wide at build time from
// the largest observed single-instant displacement.
struct SymbolSpace {
    uint32_t max_move = 0;

    uint32_t disappear() const { return max_move + 1; }
    uint32_t abs_reappear() const { return max_move + 2; }
    uint32_t rel_reappear(uint32_t index) const { return max_move + 3 + index; }

    bool is_move(uint32_t s) const { return s <= max_move; }
    bool is_disappear(uint32_t s) const { return s == max_move + 1; }
    bool is_abs_reappear(uint32_t s) const { return s == max_move + 2; }
    bool is_rel_reappear(uint32_t s) const { return s >= max_move + 3; }
    uint32_t rel_index(uint32_t s) const { return s - (max_move + 3); }
};

// Last known in-segment position of an object (the snapshot instant counts),
// or nothing at all; the backward replay of a bidirectional segment starts
// here.
struct TailEntry {
    uint32_t last_present = kNoInstant;
    uint32_t row = 0, col = 0;
};

enum class Anchor : uint8_t { none = 0, snapshot = 1, abs = 2 };

// Replay state frozen every accum_interval instants: where decoding resumes
// (byte_off is relative to the object's own stream), the last instant with a
// known position, and the displacement summed since the anchor position
// (snapshot placement or absolute reappearance).
struct Checkpoint {
    uint32_t byte_off = 0;
    uint32_t last_present = kNoInstant;
    int64_t sum_dx = 0, sum_dy = 0;
    Anchor anchor = Anchor::none;
};

// Phase-one segment: plain symbols, ready for global frequency counting.
// Encoding happens once the whole build has chosen one model.
struct PlainSegment {
    uint32_t t0 = 0, t1 = 0;  // instants [t0, t1); t0 is the snapshot instant
    uint32_t accum_interval = 0;
    bool want_tails = false;
    std::vector<std::vector<uint32_t>> symbols;           // per object
    std::vector<std::vector<uint32_t>> checkpoint_marks;  // symbols consumed at each checkpoint
    std::vector<std::vector<Checkpoint>> checkpoints;     // byte_off filled during encoding
    std::vector<TailEntry> tails;                         // filled when want_tails
    ReappearanceTables tables;  // moved onto the governing snapshot by the builder
};

// Movement symbols for instants t0+1 .. t1-1 of every object: Move per
// present instant with a present predecessor, Disappear at the first missing
// instant, silence during gaps, RelReappear on returns anchored inside the
// segment, AbsReappear as the first symbol of objects absent at the
// snapshot. Checkpoints are placed at t0 + j*accum_interval when enabled.
PlainSegment collect_segment(const Dataset& ds, uint32_t t0, uint32_t t1,
                             const SymbolSpace& space, uint32_t accum_interval, bool want_tails);

// Encoded segment as held by the index.
struct LogSegment {
    uint32_t t0 = 0, t1 = 0;
    uint32_t accum_interval = 0;
    bool has_tails = false;
    std::vector<uint8_t> bytes;      // concatenated per-object streams
    std::vector<uint64_t> offsets;   // m+1 entries; object o owns [offsets[o], offsets[o+1])
    std::vector<TailEntry> tails;    // size m when has_tails
    std::vector<std::vector<Checkpoint>> checkpoints;  // [object][j]

    size_t checkpoint_count() const {
        return accum_interval == 0 ? 0 : (t1 - t0 - 1) / accum_interval;
    }

    uint64_t stream_bytes() const { return bytes.size(); }
    uint64_t offset_bytes() const { return offsets.size() * 8; }
    uint64_t tail_bytes() const { return tails.size() * 12; }
    uint64_t checkpoint_bytes() const;

    void save(io::Writer& w) const;
    static LogSegment load(io::Reader& r);
};

// Consumes the plain segment: every stream encoded with the shared model,
// checkpoint marks turned into byte offsets.
LogSegment encode_segment(PlainSegment&& plain, const scdc::FrequencyModel& m,
                          const scdc::Params& p);

// Everything replay needs to interpret one segment's streams.
struct SegmentContext {
    const LogSegment& seg;
    const Snapshot& snap;  // governing snapshot: placements + reappearance tables
    const scdc::FrequencyModel& model;
    const scdc::Params& params;
    SymbolSpace space;
};

// Forward replay of one object, advanced monotonically through the segment.
// Decodes one symbol per present instant and none while the object is gone:
// a reappearance symbol that lands beyond the requested instant is held
// pending until reached.
class ReplayCursor {
public:
    ReplayCursor(const SegmentContext& ctx, uint32_t oid);

    // Resume mid-stream from a checkpoint (j >= 1, counting from the first
    // checkpoint at t0 + accum_interval).
    ReplayCursor(const SegmentContext& ctx, uint32_t oid, const Checkpoint& cp, uint32_t cp_instant);

    // t in [t0, t1), nondecreasing across calls.
    void advance_to(uint32_t t);

    bool present() const { return t_known_ == cur_t_ && t_known_ != kNoInstant; }
    Cell position() const;

private:
    void read_symbol();

    const SegmentContext* ctx_;
    uint32_t oid_;
    scdc::StreamDecoder dec_;
    uint32_t cur_t_;
    uint32_t t_known_ = kNoInstant;
    int64_t row_ = 0, col_ = 0;
    bool gap_ = false;      // Disappear consumed, reappearance not yet
    bool pending_ = false;  // reappearance read but not yet reached
    uint32_t pend_t_ = 0;
    int64_t pend_row_ = 0, pend_col_ = 0;
};

// Position of oid at t by forward replay from the snapshot.
std::optional<Cell> position_forward(const SegmentContext& ctx, uint32_t oid, uint32_t t);

// Position of oid at t walking back from the segment tail (requires tails).
std::optional<Cell> position_backward(const SegmentContext& ctx, uint32_t oid, uint32_t t);

// Position of oid at t resuming from the last checkpoint at or before t
// (requires accumulators); decodes at most accum_interval symbols.
std::optional<Cell> position_accumulated(const SegmentContext& ctx, uint32_t oid, uint32_t t);

// Advances every candidate to t_q, discarding one as soon as its known
// position is provably out of reach of the rectangle (Chebyshev distance
// over max_step cells per remaining instant). Survivors inside the
// rectangle at t_q are returned with their cells, ordered by oid.
std::vector<Snapshot::Placement> follow_candidates(const SegmentContext& ctx,
                                                   std::vector<uint32_t> candidate_oids,
                                                   uint32_t r1, uint32_t r2, uint32_t c1,
                                                   uint32_t c2, uint32_t t_q, uint32_t max_step);

// Chebyshev distance from a cell to a rectangle (0 inside).
uint32_t cheb_to_rect(uint32_t row, uint32_t col, uint32_t r1, uint32_t r2, uint32_t c1,
                      uint32_t c2);

}  // namespace ctix::log
