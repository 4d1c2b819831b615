#include "ctix/engine.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace ctix {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'I', 'X'};
constexpr uint32_t kVersion = 1;

// Largest single-instant spiral code, and the cells-per-instant speed bound:
// the ceiling of Chebyshev distance over elapsed instants across every pair
// of consecutive known positions, gaps included.
struct MotionScan {
    uint32_t max_move = 0;
    uint32_t max_step = 0;
};

MotionScan scan_motion(const Dataset& ds) {
    MotionScan s;
    for (uint32_t o = 0; o < ds.objects(); ++o) {
        int64_t pt = -1;
        Dataset::Cell prev{};
        for (uint32_t t = 0; t < ds.instants; ++t) {
            if (!ds.present(o, t)) continue;
            auto cur = ds.position(o, t);
            if (pt >= 0) {
                int64_t dr = int64_t(cur.first) - int64_t(prev.first);
                int64_t dc = int64_t(cur.second) - int64_t(prev.second);
                uint32_t cheb = uint32_t(std::max(dr < 0 ? -dr : dr, dc < 0 ? -dc : dc));
                uint32_t el = uint32_t(int64_t(t) - pt);
                s.max_step = std::max(s.max_step, (cheb + el - 1) / el);
                if (el == 1)
                    s.max_move = std::max(s.max_move, spiral_encode(int32_t(dr), int32_t(dc)));
            }
            pt = t;
            prev = cur;
        }
    }
    return s;
}

}  // namespace

TrajectoryIndex TrajectoryIndex::build(const Dataset& ds, const IndexParams& params) {
    if (params.snapshot_period < 1) throw std::invalid_argument("snapshot period must be >= 1");
    TrajectoryIndex idx;
    idx.params_ = params;
    idx.rows_ = ds.rows;
    idx.cols_ = ds.cols;
    idx.instants_ = ds.instants;
    idx.cell_size_ = ds.cell_size;
    idx.bucket_seconds_ = ds.bucket_seconds;
    idx.present_pairs_ = ds.present_count();
    idx.ids_ = ds.ids;
    idx.rebuild_id_map();
    if (idx.id_map_.size() != idx.ids_.size())
        throw std::invalid_argument("duplicate external ids in the dataset");

    MotionScan motion = scan_motion(ds);
    idx.space_ = {motion.max_move};
    if (params.max_step == 0)
        idx.params_.max_step = motion.max_step;
    else if (motion.max_step > params.max_step)
        throw std::invalid_argument("dataset displacement exceeds the declared speed bound");

    const uint32_t P = params.snapshot_period;
    const size_t nseg = size_t((ds.instants - 1) / P) + 1;

    std::vector<log::PlainSegment> plains;
    plains.reserve(nseg);
    idx.snapshots_.reserve(nseg);
    for (size_t i = 0; i < nseg; ++i) {
        uint32_t t0 = uint32_t(i) * P;
        uint32_t t1 = uint32_t(std::min<uint64_t>(uint64_t(t0) + P, ds.instants));
        std::vector<Snapshot::Placement> pl;
        for (uint32_t o = 0; o < ds.objects(); ++o)
            if (ds.present(o, t0)) {
                auto [r, c] = ds.position(o, t0);
                pl.push_back({o, r, c});
            }
        idx.snapshots_.push_back(Snapshot::build(std::move(pl), ds.rows, ds.cols, params.k));
        plains.push_back(log::collect_segment(ds, t0, t1, idx.space_, params.accum_interval,
                                              params.bidirectional));
    }

    // One model over every segment's symbols, split chosen by the sweep.
    std::vector<uint64_t> freq;
    for (const auto& plain : plains)
        for (const auto& stream : plain.symbols)
            for (uint32_t s : stream) {
                if (s >= freq.size()) freq.resize(s + 1, 0);
                ++freq[s];
            }
    idx.model_ = scdc::FrequencyModel::from_frequencies(freq);
    idx.sparams_ = scdc::choose_optimal_s(idx.model_.freq_by_rank());

    idx.segments_.reserve(nseg);
    for (size_t i = 0; i < nseg; ++i) {
        idx.snapshots_[i].tables = std::move(plains[i].tables);
        idx.segments_.push_back(
            log::encode_segment(std::move(plains[i]), idx.model_, idx.sparams_));
    }
    return idx;
}

void TrajectoryIndex::rebuild_id_map() {
    id_map_.clear();
    id_map_.reserve(ids_.size());
    for (uint32_t i = 0; i < ids_.size(); ++i) id_map_.emplace(ids_[i], i);
}

std::optional<uint32_t> TrajectoryIndex::dense_id(const std::string& external) const {
    auto it = id_map_.find(external);
    if (it == id_map_.end()) return std::nullopt;
    return it->second;
}

void TrajectoryIndex::check_rect(uint32_t r1, uint32_t r2, uint32_t c1, uint32_t c2) const {
    if (r1 > r2 || c1 > c2 || r2 >= rows_ || c2 >= cols_)
        throw std::invalid_argument("query rectangle out of bounds");
}

std::optional<std::pair<uint32_t, uint32_t>> TrajectoryIndex::object_position(uint32_t oid,
                                                                              uint32_t t) const {
    if (oid >= ids_.size()) throw std::invalid_argument("unknown object id");
    if (t >= instants_) throw std::out_of_range("instant beyond the timeline");
    size_t i = segment_of(t);
    const uint32_t t0 = segments_[i].t0;
    if (t == t0) return snapshots_[i].cell_of_object(oid);
    auto c = ctx(i);
    if (params_.accum_interval > 0) return log::position_accumulated(c, oid, t);
    if (params_.bidirectional && segments_[i].t1 - 1 - t < t - t0)
        return log::position_backward(c, oid, t);
    return log::position_forward(c, oid, t);
}

std::vector<std::optional<std::pair<uint32_t, uint32_t>>> TrajectoryIndex::object_trajectory(
    uint32_t oid, uint32_t t1, uint32_t t2) const {
    if (oid >= ids_.size()) throw std::invalid_argument("unknown object id");
    if (t1 > t2) throw std::invalid_argument("interval runs backwards");
    if (t2 >= instants_) throw std::out_of_range("instant beyond the timeline");
    std::vector<std::optional<std::pair<uint32_t, uint32_t>>> out;
    out.reserve(size_t(t2 - t1) + 1);
    for (size_t i = segment_of(t1); i <= segment_of(t2); ++i) {
        uint32_t a = std::max(t1, segments_[i].t0);
        uint32_t b = std::min(t2, segments_[i].t1 - 1);
        auto c = ctx(i);
        log::ReplayCursor cur(c, oid);
        for (uint32_t t = a; t <= b; ++t) {
            cur.advance_to(t);
            if (cur.present())
                out.emplace_back(cur.position());
            else
                out.emplace_back(std::nullopt);
        }
    }
    return out;
}

std::vector<uint32_t> TrajectoryIndex::reach_candidates(size_t i, uint32_t r1, uint32_t r2,
                                                        uint32_t c1, uint32_t c2,
                                                        uint32_t t) const {
    const uint32_t t0 = segments_[i].t0;
    const uint64_t e = uint64_t(params_.max_step) * (t - t0);
    uint32_t er1 = e >= r1 ? 0 : r1 - uint32_t(e);
    uint32_t ec1 = e >= c1 ? 0 : c1 - uint32_t(e);
    uint32_t er2 = uint32_t(std::min<uint64_t>(rows_ - 1, uint64_t(r2) + e));
    uint32_t ec2 = uint32_t(std::min<uint64_t>(cols_ - 1, uint64_t(c2) + e));

    std::vector<uint32_t> cands;
    for (const auto& p : snapshots_[i].objects_in_region(er1, er2, ec1, ec2))
        cands.push_back(p.oid);
    // Objects that were absent at the snapshot enter through their absolute
    // return, judged from where and when that happened.
    for (const auto& ae : snapshots_[i].tables.abs) {
        if (ae.instant > t) continue;
        uint64_t slack = uint64_t(params_.max_step) * (t - ae.instant);
        if (log::cheb_to_rect(ae.row, ae.col, r1, r2, c1, c2) <= slack) cands.push_back(ae.oid);
    }
    return cands;
}

std::vector<TrajectoryIndex::SliceHit> TrajectoryIndex::time_slice(uint32_t r1, uint32_t r2,
                                                                   uint32_t c1, uint32_t c2,
                                                                   uint32_t t) const {
    check_rect(r1, r2, c1, c2);
    if (t >= instants_) throw std::out_of_range("instant beyond the timeline");
    size_t i = segment_of(t);
    const uint32_t t0 = segments_[i].t0;
    std::vector<SliceHit> out;

    if (t == t0) {
        for (const auto& p : snapshots_[i].objects_in_region(r1, r2, c1, c2))
            out.push_back({p.oid, p.row, p.col});
        std::sort(out.begin(), out.end(),
                  [](const SliceHit& a, const SliceHit& b) { return a.oid < b.oid; });
        return out;
    }

    auto c = ctx(i);
    if (params_.bidirectional && segments_[i].t1 - 1 - t < t - t0) {
        // Walk back from the tails: anything inside the rectangle at t can
        // only have drifted max_step per instant since.
        const auto& tails = segments_[i].tails;
        for (uint32_t oid = 0; oid < tails.size(); ++oid) {
            const auto& te = tails[oid];
            if (te.last_present == log::kNoInstant || te.last_present < t) continue;
            uint64_t slack = uint64_t(params_.max_step) * (te.last_present - t);
            if (log::cheb_to_rect(te.row, te.col, r1, r2, c1, c2) > slack) continue;
            auto pos = log::position_backward(c, oid, t);
            if (pos && log::cheb_to_rect(pos->first, pos->second, r1, r2, c1, c2) == 0)
                out.push_back({oid, pos->first, pos->second});
        }
        return out;  // tail scan already runs in oid order
    }

    for (const auto& p : log::follow_candidates(c, reach_candidates(i, r1, r2, c1, c2, t), r1, r2,
                                                c1, c2, t, params_.max_step))
        out.push_back({p.oid, p.row, p.col});
    return out;
}

std::vector<TrajectoryIndex::IntervalHit> TrajectoryIndex::time_interval(uint32_t r1, uint32_t r2,
                                                                         uint32_t c1, uint32_t c2,
                                                                         uint32_t t1,
                                                                         uint32_t t2) const {
    check_rect(r1, r2, c1, c2);
    if (t1 > t2) throw std::invalid_argument("interval runs backwards");
    if (t2 >= instants_) throw std::out_of_range("instant beyond the timeline");

    std::vector<IntervalHit> out;
    std::vector<char> reported(ids_.size(), 0);
    for (size_t i = segment_of(t1); i <= segment_of(t2); ++i) {
        const uint32_t t0 = segments_[i].t0;
        uint32_t a = std::max(t1, t0);
        uint32_t b = std::min(t2, segments_[i].t1 - 1);

        auto cands = reach_candidates(i, r1, r2, c1, c2, b);
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        cands.erase(std::remove_if(cands.begin(), cands.end(),
                                   [&](uint32_t o) { return reported[o] != 0; }),
                    cands.end());
        if (cands.empty()) continue;

        auto c = ctx(i);
        std::vector<log::ReplayCursor> cursors;
        cursors.reserve(cands.size());
        for (uint32_t oid : cands) cursors.emplace_back(c, oid);
        std::vector<char> alive(cands.size(), 1);

        for (uint32_t t = t0; t <= b; ++t) {
            uint64_t slack = uint64_t(params_.max_step) * (b - t);
            for (size_t j = 0; j < cands.size(); ++j) {
                if (!alive[j]) continue;
                if (t > t0) cursors[j].advance_to(t);
                if (!cursors[j].present()) continue;
                auto [pr, pc] = cursors[j].position();
                uint32_t d = log::cheb_to_rect(pr, pc, r1, r2, c1, c2);
                if (t >= a && d == 0) {
                    out.push_back({cands[j], pr, pc, t});
                    reported[cands[j]] = 1;
                    alive[j] = 0;
                } else if (d > slack) {
                    alive[j] = 0;  // cannot reach the rectangle in time
                }
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const IntervalHit& x, const IntervalHit& y) { return x.oid < y.oid; });
    return out;
}

StatsReport TrajectoryIndex::stats() const {
    StatsReport rep;
    rep.objects = objects();
    rep.rows = rows_;
    rep.cols = cols_;
    rep.instants = instants_;
    rep.snapshot_count = uint32_t(snapshots_.size());
    rep.present_pairs = present_pairs_;

    ComponentSizes& s = rep.sizes;
    for (const auto& snap : snapshots_) {
        io::CountingWriter sw;
        snap.save(sw);
        s.snapshots += sw.bytes_written() - snap.tables.bytes();
        s.reappearance_tables += snap.tables.bytes();
    }
    for (const auto& seg : segments_) {
        s.streams += seg.stream_bytes();
        s.stream_offsets += seg.offset_bytes();
        s.tails += seg.tail_bytes();
        s.checkpoints += seg.checkpoint_bytes();
    }
    s.model = 9 + 8 * uint64_t(model_.vocabulary());
    s.dictionary = 8;
    for (const auto& id : ids_) s.dictionary += 4 + id.size();

    io::CountingWriter cw;
    save(cw);
    uint64_t accounted = s.total() - s.header;
    s.header = cw.bytes_written() - accounted;

    rep.baseline = present_pairs_ * 8;
    rep.ratio_defined = rep.baseline > 0;
    if (rep.ratio_defined)
        rep.ratio_percent = 100.0 * double(cw.bytes_written()) / double(rep.baseline);
    return rep;
}

void TrajectoryIndex::save(io::Writer& w) const {
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.u32(params_.snapshot_period);
    w.u32(params_.k);
    w.u32(params_.max_step);
    w.u32(params_.accum_interval);
    w.u8(params_.bidirectional ? 1 : 0);
    w.u32(rows_);
    w.u32(cols_);
    w.u32(instants_);
    w.f64(cell_size_);
    w.f64(bucket_seconds_);
    w.u64(present_pairs_);
    w.u32(space_.max_move);
    w.u64(ids_.size());
    for (const auto& id : ids_) w.str(id);
    scdc::save_model(w, model_, sparams_);

    w.u64(snapshots_.size());
    std::vector<std::vector<uint8_t>> blobs;
    blobs.reserve(snapshots_.size() * 2);
    for (size_t i = 0; i < snapshots_.size(); ++i) {
        io::VectorWriter sw;
        snapshots_[i].save(sw);
        blobs.push_back(sw.take());
        io::VectorWriter gw;
        segments_[i].save(gw);
        blobs.push_back(gw.take());
    }
    uint64_t off = 0;
    for (const auto& b : blobs) {
        w.u64(off);
        off += b.size();
    }
    w.u64(off);
    for (const auto& b : blobs) w.raw(b.data(), b.size());
}

TrajectoryIndex TrajectoryIndex::load(io::Reader& r) {
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw CorruptFile("not an index file");
    if (r.u32() != kVersion) throw CorruptFile("unsupported index version");

    TrajectoryIndex idx;
    idx.params_.snapshot_period = r.u32();
    idx.params_.k = r.u32();
    idx.params_.max_step = r.u32();
    idx.params_.accum_interval = r.u32();
    uint8_t flags = r.u8();
    if (flags > 1) throw CorruptFile("unknown index flags");
    idx.params_.bidirectional = flags == 1;
    idx.rows_ = r.u32();
    idx.cols_ = r.u32();
    idx.instants_ = r.u32();
    idx.cell_size_ = r.f64();
    idx.bucket_seconds_ = r.f64();
    idx.present_pairs_ = r.u64();
    idx.space_ = {r.u32()};
    if (idx.params_.snapshot_period < 1) throw CorruptFile("snapshot period must be >= 1");
    if (idx.rows_ == 0 || idx.cols_ == 0 || idx.instants_ == 0)
        throw CorruptFile("empty grid or timeline");

    uint64_t m = r.u64();
    if (m > r.remaining()) throw CorruptFile("id dictionary count beyond the payload");
    idx.ids_.reserve(size_t(m));
    for (uint64_t i = 0; i < m; ++i) idx.ids_.push_back(r.str());
    idx.rebuild_id_map();
    if (idx.id_map_.size() != idx.ids_.size()) throw CorruptFile("duplicate external ids");

    auto model = scdc::load_model(r);
    idx.model_ = std::move(model.first);
    idx.sparams_ = model.second;

    uint64_t nsnap = r.u64();
    uint64_t expected = uint64_t(idx.instants_ - 1) / idx.params_.snapshot_period + 1;
    if (nsnap != expected) throw CorruptFile("snapshot count does not match the timeline");
    std::vector<uint64_t> offs(size_t(nsnap) * 2 + 1);
    for (auto& o : offs) o = r.u64();
    for (size_t i = 0; i + 1 < offs.size(); ++i)
        if (offs[i] > offs[i + 1]) throw CorruptFile("index offset table not monotone");
    const size_t blob_total = r.remaining();
    if (offs.front() != 0 || offs.back() != blob_total)
        throw CorruptFile("index offset table does not cover the payload");

    idx.snapshots_.reserve(size_t(nsnap));
    idx.segments_.reserve(size_t(nsnap));
    for (size_t i = 0; i < size_t(nsnap); ++i) {
        if (blob_total - r.remaining() != offs[2 * i])
            throw CorruptFile("snapshot at the wrong offset");
        idx.snapshots_.push_back(Snapshot::load(r));
        if (blob_total - r.remaining() != offs[2 * i + 1])
            throw CorruptFile("segment at the wrong offset");
        idx.segments_.push_back(log::LogSegment::load(r));

        const Snapshot& snap = idx.snapshots_.back();
        const log::LogSegment& seg = idx.segments_.back();
        uint32_t t0 = uint32_t(i) * idx.params_.snapshot_period;
        uint32_t t1 = uint32_t(
            std::min<uint64_t>(uint64_t(t0) + idx.params_.snapshot_period, idx.instants_));
        if (seg.t0 != t0 || seg.t1 != t1) throw CorruptFile("segment does not cover its window");
        if (seg.offsets.size() != idx.ids_.size() + 1)
            throw CorruptFile("segment object count mismatch");
        if (seg.has_tails != idx.params_.bidirectional)
            throw CorruptFile("segment tail flag mismatch");
        if (seg.accum_interval != idx.params_.accum_interval)
            throw CorruptFile("segment checkpoint spacing mismatch");
        for (uint32_t oid : snap.perm())
            if (oid >= idx.ids_.size()) throw CorruptFile("snapshot places an unknown object");
        for (const auto& e : snap.tables.rel)
            if (e.oid >= idx.ids_.size()) throw CorruptFile("reappearance of an unknown object");
        for (const auto& e : snap.tables.abs)
            if (e.oid >= idx.ids_.size()) throw CorruptFile("reappearance of an unknown object");
    }
    return idx;
}

void TrajectoryIndex::save_file(const std::string& path) const {
    io::FileWriter w(path);
    save(w);
    w.close();
}

TrajectoryIndex TrajectoryIndex::load_file(const std::string& path) {
    auto buf = io::read_file(path);
    io::Reader r(buf);
    TrajectoryIndex idx = load(r);
    if (r.remaining() != 0) throw CorruptFile("trailing bytes after the index");
    return idx;
}

}  // namespace ctix
