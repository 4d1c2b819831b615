#include "ctix/log.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctix::log {

PlainSegment collect_segment(const Dataset& ds, uint32_t t0, uint32_t t1,
                             const SymbolSpace& space, uint32_t accum_interval, bool want_tails) {
    if (t0 >= t1 || t1 > ds.instants)
        throw std::invalid_argument("segment bounds outside the dataset timeline");
    const uint32_t m = ds.objects();
    const uint32_t ncp = accum_interval == 0 ? 0 : (t1 - t0 - 1) / accum_interval;

    PlainSegment out;
    out.t0 = t0;
    out.t1 = t1;
    out.accum_interval = accum_interval;
    out.want_tails = want_tails;
    out.symbols.resize(m);
    if (ncp > 0) {
        out.checkpoint_marks.resize(m);
        out.checkpoints.resize(m);
    }
    if (want_tails) out.tails.resize(m);

    for (uint32_t o = 0; o < m; ++o) {
        auto& sym = out.symbols[o];
        uint32_t t_known = kNoInstant;
        int64_t row = 0, col = 0;
        int64_t anchor_row = 0, anchor_col = 0;
        Anchor anchor = Anchor::none;
        if (ds.present(o, t0)) {
            auto [r, c] = ds.position(o, t0);
            t_known = t0;
            row = r;
            col = c;
            anchor_row = r;
            anchor_col = c;
            anchor = Anchor::snapshot;
        }
        uint32_t next_cp = 0;
        for (uint32_t t = t0 + 1; t < t1; ++t) {
            if (ds.present(o, t)) {
                auto [r, c] = ds.position(o, t);
                if (t_known == t - 1) {
                    uint32_t code = spiral_encode(int32_t(int64_t(r) - row), int32_t(int64_t(c) - col));
                    if (code > space.max_move)
                        throw std::logic_error("single-step move exceeds the symbol space");
                    sym.push_back(code);
                } else if (t_known == kNoInstant) {
                    // First sighting of an object absent at the snapshot: the
                    // stream starts here, anchored by a table entry.
                    out.tables.abs.push_back({o, t, r, c});
                    sym.push_back(space.abs_reappear());
                    anchor = Anchor::abs;
                    anchor_row = r;
                    anchor_col = c;
                } else {
                    uint32_t idx = uint32_t(out.tables.rel.size());
                    out.tables.rel.push_back(
                        {o, t - t_known, {int32_t(int64_t(r) - row), int32_t(int64_t(c) - col)}});
                    sym.push_back(space.rel_reappear(idx));
                }
                t_known = t;
                row = r;
                col = c;
            } else if (t_known == t - 1) {
                sym.push_back(space.disappear());
            }
            if (next_cp < ncp && t == t0 + (next_cp + 1) * accum_interval) {
                Checkpoint cp;
                cp.last_present = t_known;
                cp.anchor = anchor;
                if (t_known != kNoInstant) {
                    cp.sum_dx = row - anchor_row;
                    cp.sum_dy = col - anchor_col;
                }
                out.checkpoints[o].push_back(cp);
                out.checkpoint_marks[o].push_back(uint32_t(sym.size()));
                ++next_cp;
            }
        }
        if (want_tails && t_known != kNoInstant)
            out.tails[o] = {t_known, uint32_t(row), uint32_t(col)};
    }
    return out;
}

LogSegment encode_segment(PlainSegment&& plain, const scdc::FrequencyModel& m,
                          const scdc::Params& p) {
    scdc::validate(p);
    LogSegment out;
    out.t0 = plain.t0;
    out.t1 = plain.t1;
    out.accum_interval = plain.accum_interval;
    out.has_tails = plain.want_tails;
    out.tails = std::move(plain.tails);
    out.checkpoints = std::move(plain.checkpoints);

    const size_t nobj = plain.symbols.size();
    out.offsets.reserve(nobj + 1);
    out.offsets.push_back(0);
    for (size_t o = 0; o < nobj; ++o) {
        const auto& sym = plain.symbols[o];
        const uint64_t start = out.bytes.size();
        const std::vector<uint32_t>* marks =
            o < plain.checkpoint_marks.size() ? &plain.checkpoint_marks[o] : nullptr;
        size_t mi = 0;
        for (size_t i = 0; i <= sym.size(); ++i) {
            if (marks)
                while (mi < marks->size() && (*marks)[mi] == i) {
                    // A mark of i symbols consumed resumes right here.
                    out.checkpoints[o][mi].byte_off = uint32_t(out.bytes.size() - start);
                    ++mi;
                }
            if (i < sym.size()) scdc::encode_symbol(m, p, sym[i], out.bytes);
        }
        out.offsets.push_back(out.bytes.size());
    }
    return out;
}

uint64_t LogSegment::checkpoint_bytes() const {
    uint64_t entries = 0;
    for (const auto& v : checkpoints) entries += v.size();
    return entries * 25;
}

void LogSegment::save(io::Writer& w) const {
    w.u32(t0);
    w.u32(t1);
    w.u32(accum_interval);
    w.u8(has_tails ? 1 : 0);
    w.u64(offsets.empty() ? 0 : offsets.size() - 1);
    for (uint64_t off : offsets) w.u64(off);
    w.u64(bytes.size());
    w.raw(bytes.data(), bytes.size());
    if (has_tails)
        for (const TailEntry& te : tails) {
            w.u32(te.last_present);
            w.u32(te.row);
            w.u32(te.col);
        }
    if (checkpoint_count() > 0)
        for (const auto& v : checkpoints)
            for (const Checkpoint& cp : v) {
                w.u32(cp.byte_off);
                w.u32(cp.last_present);
                w.u64(uint64_t(cp.sum_dx));
                w.u64(uint64_t(cp.sum_dy));
                w.u8(uint8_t(cp.anchor));
            }
}

LogSegment LogSegment::load(io::Reader& r) {
    LogSegment s;
    s.t0 = r.u32();
    s.t1 = r.u32();
    s.accum_interval = r.u32();
    uint8_t flags = r.u8();
    if (flags > 1) throw CorruptFile("movement log: unknown flag byte");
    s.has_tails = flags == 1;
    if (s.t0 >= s.t1) throw CorruptFile("movement log: empty time range");

    uint64_t nobj = r.u64();
    if (nobj > r.remaining()) throw CorruptFile("movement log: object count beyond the payload");
    s.offsets.resize(size_t(nobj) + 1);
    for (auto& off : s.offsets) off = r.u64();
    uint64_t blob = r.u64();
    if (s.offsets.front() != 0 || s.offsets.back() != blob)
        throw CorruptFile("movement log: offset table does not cover the streams");
    for (size_t i = 0; i + 1 < s.offsets.size(); ++i)
        if (s.offsets[i] > s.offsets[i + 1])
            throw CorruptFile("movement log: offset table not monotone");
    if (blob > r.remaining()) throw CorruptFile("movement log: truncated streams");
    s.bytes.resize(size_t(blob));
    r.raw(s.bytes.data(), size_t(blob));

    auto check_instant = [&](uint32_t v) {
        return v == kNoInstant || (v >= s.t0 && v < s.t1);
    };
    if (s.has_tails) {
        s.tails.resize(size_t(nobj));
        for (TailEntry& te : s.tails) {
            te.last_present = r.u32();
            te.row = r.u32();
            te.col = r.u32();
            if (!check_instant(te.last_present))
                throw CorruptFile("movement log: tail instant outside the segment");
        }
    }
    size_t ncp = s.checkpoint_count();
    if (ncp > 0) {
        s.checkpoints.resize(size_t(nobj));
        for (size_t o = 0; o < size_t(nobj); ++o) {
            s.checkpoints[o].resize(ncp);
            uint64_t stream_len = s.offsets[o + 1] - s.offsets[o];
            for (Checkpoint& cp : s.checkpoints[o]) {
                cp.byte_off = r.u32();
                cp.last_present = r.u32();
                cp.sum_dx = int64_t(r.u64());
                cp.sum_dy = int64_t(r.u64());
                uint8_t a = r.u8();
                if (a > 2) throw CorruptFile("movement log: unknown checkpoint anchor");
                cp.anchor = Anchor(a);
                if (cp.byte_off > stream_len)
                    throw CorruptFile("movement log: checkpoint offset outside its stream");
                if (!check_instant(cp.last_present))
                    throw CorruptFile("movement log: checkpoint instant outside the segment");
                if (cp.last_present != kNoInstant && cp.anchor == Anchor::none)
                    throw CorruptFile("movement log: checkpoint carries a position but no anchor");
            }
        }
    }
    return s;
}

namespace {

std::pair<const uint8_t*, const uint8_t*> stream_extent(const SegmentContext& ctx, uint32_t oid) {
    const LogSegment& seg = ctx.seg;
    if (size_t(oid) + 1 >= seg.offsets.size())
        throw std::out_of_range("object id outside the log segment");
    const uint8_t* base = seg.bytes.data();
    return {base + seg.offsets[oid], base + seg.offsets[oid + 1]};
}

scdc::StreamDecoder make_decoder(const SegmentContext& ctx, uint32_t oid) {
    auto [b, e] = stream_extent(ctx, oid);
    return scdc::StreamDecoder(b, e, ctx.model, ctx.params);
}

}  // namespace

ReplayCursor::ReplayCursor(const SegmentContext& ctx, uint32_t oid)
    : ctx_(&ctx), oid_(oid), dec_(make_decoder(ctx, oid)), cur_t_(ctx.seg.t0) {
    if (auto cell = ctx.snap.cell_of_object(oid)) {
        t_known_ = ctx.seg.t0;
        row_ = cell->first;
        col_ = cell->second;
    }
}

ReplayCursor::ReplayCursor(const SegmentContext& ctx, uint32_t oid, const Checkpoint& cp,
                           uint32_t cp_instant)
    : ctx_(&ctx), oid_(oid), dec_(make_decoder(ctx, oid)), cur_t_(cp_instant) {
    auto [b, e] = stream_extent(ctx, oid);
    if (cp.byte_off > size_t(e - b)) throw CorruptFile("checkpoint offset outside the stream");
    dec_.skip_to(b + cp.byte_off);
    t_known_ = cp.last_present;
    if (t_known_ == kNoInstant) return;
    int64_t ar, ac;
    if (cp.anchor == Anchor::snapshot) {
        auto cell = ctx.snap.cell_of_object(oid);
        if (!cell) throw CorruptFile("checkpoint anchored to a missing placement");
        ar = cell->first;
        ac = cell->second;
    } else if (cp.anchor == Anchor::abs) {
        const AbsReappearance* ae = ctx.snap.tables.abs_of(oid);
        if (!ae) throw CorruptFile("checkpoint anchored to a missing reappearance");
        ar = ae->row;
        ac = ae->col;
    } else {
        throw CorruptFile("checkpoint carries a position but no anchor");
    }
    row_ = ar + cp.sum_dx;
    col_ = ac + cp.sum_dy;
    gap_ = t_known_ < cp_instant;
}

Cell ReplayCursor::position() const {
    if (!present()) throw std::logic_error("cursor object is absent here");
    return {uint32_t(row_), uint32_t(col_)};
}

void ReplayCursor::read_symbol() {
    uint32_t s = dec_.next();
    const SymbolSpace& sp = ctx_->space;
    if (sp.is_move(s)) {
        if (t_known_ == kNoInstant || gap_)
            throw CorruptFile("relative move without a prior position");
        Displacement d = spiral_decode(s);
        t_known_ += 1;
        row_ += d.dx;
        col_ += d.dy;
        cur_t_ = t_known_;
        return;
    }
    if (sp.is_disappear(s)) {
        if (t_known_ == kNoInstant || gap_) throw CorruptFile("disappearance of an absent object");
        gap_ = true;
        return;
    }
    if (sp.is_abs_reappear(s)) {
        if (t_known_ != kNoInstant)
            throw CorruptFile("absolute reappearance of an in-segment object");
        const AbsReappearance* ae = ctx_->snap.tables.abs_of(oid_);
        if (!ae) throw CorruptFile("absolute reappearance without a table entry");
        pend_t_ = ae->instant;
        pend_row_ = ae->row;
        pend_col_ = ae->col;
    } else {
        uint32_t i = sp.rel_index(s);
        if (!gap_) throw CorruptFile("relative reappearance outside a gap");
        if (i >= ctx_->snap.tables.rel.size())
            throw CorruptFile("reappearance index beyond the table");
        const RelReappearance& re = ctx_->snap.tables.rel[i];
        if (re.oid != oid_) throw CorruptFile("reappearance entry belongs to another object");
        pend_t_ = t_known_ + re.elapsed;
        pend_row_ = row_ + re.delta.dx;
        pend_col_ = col_ + re.delta.dy;
    }
    if (pend_t_ <= cur_t_ || pend_t_ >= ctx_->seg.t1)
        throw CorruptFile("reappearance instant outside the remaining segment");
    pending_ = true;
}

void ReplayCursor::advance_to(uint32_t t) {
    if (t < cur_t_) throw std::logic_error("replay cursor cannot rewind");
    if (t >= ctx_->seg.t1) throw std::out_of_range("instant beyond the segment");
    while (cur_t_ < t) {
        if (pending_) {
            if (pend_t_ > t) {
                cur_t_ = t;  // still inside the gap
                return;
            }
            t_known_ = pend_t_;
            row_ = pend_row_;
            col_ = pend_col_;
            cur_t_ = t_known_;
            pending_ = false;
            gap_ = false;
            continue;
        }
        if (!dec_.has_more()) {
            // Legitimate only if the object is gone for the rest of the
            // segment; a present object must have a symbol for every next
            // instant.
            if (t_known_ == cur_t_ && !gap_)
                throw CorruptFile("movement stream ended before the segment");
            cur_t_ = t;
            return;
        }
        read_symbol();
    }
}

std::optional<Cell> position_forward(const SegmentContext& ctx, uint32_t oid, uint32_t t) {
    ReplayCursor cur(ctx, oid);
    cur.advance_to(t);
    if (!cur.present()) return std::nullopt;
    return cur.position();
}

std::optional<Cell> position_backward(const SegmentContext& ctx, uint32_t oid, uint32_t t) {
    const LogSegment& seg = ctx.seg;
    if (!seg.has_tails) throw std::logic_error("segment has no tails");
    if (t < seg.t0 || t >= seg.t1) throw std::out_of_range("instant beyond the segment");
    if (oid >= seg.tails.size()) throw std::out_of_range("object id outside the log segment");
    const TailEntry& te = seg.tails[oid];
    if (te.last_present == kNoInstant || t > te.last_present) return std::nullopt;
    int64_t row = te.row, col = te.col;
    uint32_t cur = te.last_present;
    if (cur == t) return Cell{uint32_t(row), uint32_t(col)};

    auto [b, e] = stream_extent(ctx, oid);
    scdc::ReverseStreamDecoder dec(b, e, ctx.model, ctx.params);
    const SymbolSpace& sp = ctx.space;
    while (cur > t && dec.has_more()) {
        uint32_t s = dec.prev();
        if (sp.is_move(s)) {
            Displacement d = spiral_decode(s);
            row -= d.dx;
            col -= d.dy;
            --cur;
        } else if (sp.is_disappear(s)) {
            continue;  // carries no time or position of its own
        } else if (sp.is_rel_reappear(s)) {
            uint32_t i = sp.rel_index(s);
            if (i >= ctx.snap.tables.rel.size())
                throw CorruptFile("reappearance index beyond the table");
            const RelReappearance& re = ctx.snap.tables.rel[i];
            if (re.oid != oid) throw CorruptFile("reappearance entry belongs to another object");
            if (re.elapsed > cur - seg.t0) throw CorruptFile("reappearance gap escapes the segment");
            uint32_t before = cur - re.elapsed;
            if (t > before) return std::nullopt;  // t falls inside this gap
            row -= re.delta.dx;
            col -= re.delta.dy;
            cur = before;
        } else {
            return std::nullopt;  // absent at every instant before its first sighting
        }
    }
    if (cur != t) throw CorruptFile("movement stream too short for its tail");
    return Cell{uint32_t(row), uint32_t(col)};
}

std::optional<Cell> position_accumulated(const SegmentContext& ctx, uint32_t oid, uint32_t t) {
    const LogSegment& seg = ctx.seg;
    if (seg.accum_interval == 0) throw std::logic_error("segment has no accumulators");
    if (t < seg.t0 || t >= seg.t1) throw std::out_of_range("instant beyond the segment");
    uint32_t j = (t - seg.t0) / seg.accum_interval;
    if (j == 0) return position_forward(ctx, oid, t);
    if (oid >= seg.checkpoints.size() || seg.checkpoints[oid].size() < j)
        throw CorruptFile("missing checkpoint");
    ReplayCursor cur(ctx, oid, seg.checkpoints[oid][j - 1], seg.t0 + j * seg.accum_interval);
    cur.advance_to(t);
    if (!cur.present()) return std::nullopt;
    return cur.position();
}

uint32_t cheb_to_rect(uint32_t row, uint32_t col, uint32_t r1, uint32_t r2, uint32_t c1,
                      uint32_t c2) {
    uint32_t dr = row < r1 ? r1 - row : (row > r2 ? row - r2 : 0);
    uint32_t dc = col < c1 ? c1 - col : (col > c2 ? col - c2 : 0);
    return std::max(dr, dc);
}

std::vector<Snapshot::Placement> follow_candidates(const SegmentContext& ctx,
                                                   std::vector<uint32_t> candidate_oids,
                                                   uint32_t r1, uint32_t r2, uint32_t c1,
                                                   uint32_t c2, uint32_t t_q, uint32_t max_step) {
    if (r1 > r2 || c1 > c2) throw std::invalid_argument("empty query rectangle");
    if (t_q < ctx.seg.t0 || t_q >= ctx.seg.t1)
        throw std::out_of_range("instant beyond the segment");
    std::sort(candidate_oids.begin(), candidate_oids.end());
    candidate_oids.erase(std::unique(candidate_oids.begin(), candidate_oids.end()),
                         candidate_oids.end());

    std::vector<ReplayCursor> cursors;
    cursors.reserve(candidate_oids.size());
    for (uint32_t oid : candidate_oids) cursors.emplace_back(ctx, oid);
    std::vector<char> alive(candidate_oids.size(), 1);

    for (uint32_t t = ctx.seg.t0; t <= t_q; ++t) {
        uint64_t slack = uint64_t(max_step) * (t_q - t);
        for (size_t i = 0; i < candidate_oids.size(); ++i) {
            if (!alive[i]) continue;
            if (t > ctx.seg.t0) cursors[i].advance_to(t);
            if (!cursors[i].present()) continue;  // absence proves nothing
            auto [r, c] = cursors[i].position();
            if (cheb_to_rect(r, c, r1, r2, c1, c2) > slack) alive[i] = 0;
        }
    }

    std::vector<Snapshot::Placement> out;
    for (size_t i = 0; i < candidate_oids.size(); ++i) {
        if (!alive[i] || !cursors[i].present()) continue;
        auto [r, c] = cursors[i].position();
        if (cheb_to_rect(r, c, r1, r2, c1, c2) == 0) out.push_back({candidate_oids[i], r, c});
    }
    return out;
}

}  // namespace ctix::log
