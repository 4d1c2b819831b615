#include "ctix/dataset.hpp"

#include <stdexcept>

namespace ctix {

namespace {
constexpr char kMagic[4] = {'C', 'T', 'D', 'S'};
constexpr uint32_t kVersion = 1;
}  // namespace

bool Dataset::present(uint32_t o, uint32_t t) const {
    if (o >= objects() || t >= instants) throw std::out_of_range("object or instant out of range");
    return presence_.access(slot(o, t));
}

Dataset::Cell Dataset::position(uint32_t o, uint32_t t) const {
    if (!present(o, t)) throw std::logic_error("position of an absent object requested");
    size_t idx = size_t(presence_.rank1(slot(o, t))) - 1;
    return {cell_rows_[idx], cell_cols_[idx]};
}

Dataset Dataset::from_tracks(uint32_t rows, uint32_t cols, uint32_t instants,
                             std::vector<std::string> ids, const std::vector<Track>& tracks,
                             double cell_size, double bucket_seconds) {
    if (rows == 0 || cols == 0 || instants == 0) throw std::invalid_argument("empty grid or timeline");
    if (ids.size() != tracks.size()) throw std::invalid_argument("one id per track required");

    Dataset d;
    d.rows = rows;
    d.cols = cols;
    d.instants = instants;
    d.cell_size = cell_size;
    d.bucket_seconds = bucket_seconds;
    d.ids = std::move(ids);

    BitBuilder presence;
    for (const Track& track : tracks) {
        if (track.size() != instants) throw std::invalid_argument("track length != instant count");
        for (const auto& cell : track) {
            presence.push(cell.has_value());
            if (!cell) continue;
            if (cell->first >= rows || cell->second >= cols)
                throw std::invalid_argument("track cell outside grid");
            d.cell_rows_.push_back(cell->first);
            d.cell_cols_.push_back(cell->second);
        }
    }
    d.presence_ = std::move(presence).build();
    return d;
}

void Dataset::save(io::Writer& w) const {
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.u32(rows);
    w.u32(cols);
    w.u32(instants);
    w.f64(cell_size);
    w.f64(bucket_seconds);
    w.u64(ids.size());
    for (const auto& id : ids) w.str(id);
    presence_.save(w);
    for (size_t i = 0; i < cell_rows_.size(); ++i) {
        w.u32(cell_rows_[i]);
        w.u32(cell_cols_[i]);
    }
}

Dataset Dataset::load(io::Reader& r) {
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw CorruptFile("not a dataset block");
    if (r.u32() != kVersion) throw CorruptFile("unsupported dataset version");

    Dataset d;
    d.rows = r.u32();
    d.cols = r.u32();
    d.instants = r.u32();
    d.cell_size = r.f64();
    d.bucket_seconds = r.f64();
    if (d.rows == 0 || d.cols == 0 || d.instants == 0) throw CorruptFile("empty grid or timeline");
    uint64_t m = r.u64();
    d.ids.reserve(size_t(m));
    for (uint64_t i = 0; i < m; ++i) d.ids.push_back(r.str());
    d.presence_ = BitSequence::load(r);
    if (d.presence_.size() != size_t(m) * d.instants)
        throw CorruptFile("presence bitmap does not cover objects x instants");
    uint64_t placed = d.presence_.count(true);
    d.cell_rows_.reserve(size_t(placed));
    d.cell_cols_.reserve(size_t(placed));
    for (uint64_t i = 0; i < placed; ++i) {
        uint32_t row = r.u32(), col = r.u32();
        if (row >= d.rows || col >= d.cols) throw CorruptFile("cell outside grid");
        d.cell_rows_.push_back(row);
        d.cell_cols_.push_back(col);
    }
    return d;
}

}  // namespace ctix
