#include "ctix/k2tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctix {

namespace {

// Smallest h >= 1 with k^h >= extent; throws once k^h stops fitting in u64
// alongside the base-k*k key arithmetic the build relies on.
uint32_t tree_height(uint32_t k, uint64_t extent) {
    uint64_t side = k;
    uint32_t h = 1;
    while (side < extent) {
        if (side > UINT64_MAX / (uint64_t(k) * k * k)) throw std::invalid_argument("grid too large for this k");
        side *= k;
        ++h;
    }
    return h;
}

uint64_t pow_u64(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

K2Tree K2Tree::build(uint32_t k, uint64_t rows, uint64_t cols,
                     std::vector<std::pair<uint64_t, uint64_t>> points) {
    if (k < 2 || k > 4) throw std::invalid_argument("subdivision arity must be 2, 3 or 4");
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid must be non-empty");

    K2Tree t;
    t.k_ = k;
    t.rows_ = rows;
    t.cols_ = cols;
    t.height_ = tree_height(k, std::max(rows, cols));
    t.side_ = pow_u64(k, t.height_);

    const uint64_t kk = uint64_t(k) * k;

    // One base-k*k digit per level, most significant first, so sorted keys
    // enumerate cells in depth-first quadrant order.
    std::vector<uint64_t> keys;
    keys.reserve(points.size());
    for (auto [r, c] : points) {
        if (r >= rows || c >= cols) throw std::out_of_range("point outside grid");
        uint64_t key = 0, sub = t.side_ / k;
        for (uint32_t lv = 0; lv < t.height_; ++lv) {
            uint64_t q = (r / sub) % k * k + (c / sub) % k;
            key = key * kk + q;
            sub /= k;
        }
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    BitBuilder tb, lb;
    std::vector<std::pair<size_t, size_t>> ranges{{0, keys.size()}};
    for (uint32_t lv = 0; lv < t.height_; ++lv) {
        BitBuilder& out = (lv + 1 == t.height_) ? lb : tb;
        uint64_t digit_pow = pow_u64(kk, t.height_ - 1 - lv);
        std::vector<std::pair<size_t, size_t>> next;
        for (auto [lo, hi] : ranges) {
            size_t at = lo;
            for (uint64_t q = 0; q < kk; ++q) {
                size_t start = at;
                while (at < hi && keys[at] / digit_pow % kk == q) ++at;
                out.push(at > start);
                if (at > start && lv + 1 < t.height_) next.emplace_back(start, at);
            }
        }
        ranges = std::move(next);
        if (ranges.empty() && lv + 1 < t.height_) break;  // empty matrix: lone root block
    }
    t.tree_ = std::move(tb).build();
    t.leaves_ = std::move(lb).build();
    return t;
}

int64_t K2Tree::leaf_index(uint64_t row, uint64_t col) const {
    if (row >= rows_ || col >= cols_) throw std::out_of_range("cell outside grid");
    const uint64_t kk = uint64_t(k_) * k_;
    uint64_t block = 0, sub = side_ / k_;
    for (uint32_t lv = 0;; ++lv) {
        uint64_t p = block + (row / sub) % k_ * k_ + (col / sub) % k_;
        if (lv + 1 == height_) return int64_t(p - tree_.size());
        if (p >= tree_.size() || !tree_.access(p)) return -1;
        block = tree_.rank1(p) * kk;
        sub /= k_;
    }
}

bool K2Tree::cell_occupied(uint64_t row, uint64_t col) const {
    int64_t leaf = leaf_index(row, col);
    return leaf >= 0 && uint64_t(leaf) < leaves_.size() && leaves_.access(uint64_t(leaf));
}

std::pair<uint64_t, uint64_t> K2Tree::cell_of_leaf(uint64_t leaf) const {
    if (leaf >= leaves_.size()) throw std::out_of_range("leaf index beyond leaf bits");
    const uint64_t kk = uint64_t(k_) * k_;
    uint64_t pos = tree_.size() + leaf;
    uint64_t row = 0, col = 0, sub = 1;
    while (true) {
        uint64_t q = pos % kk;
        row += q / k_ * sub;
        col += q % k_ * sub;
        uint64_t block = pos / kk;
        if (block == 0) break;
        int64_t parent = tree_.select1(block);
        if (parent < 0) throw CorruptFile("leaf block has no parent bit");
        pos = uint64_t(parent);
        sub *= k_;
    }
    return {row, col};
}

void K2Tree::region_walk(uint64_t block, uint32_t level, uint64_t row0, uint64_t col0,
                         uint64_t sub, uint64_t r1, uint64_t r2, uint64_t c1, uint64_t c2,
                         std::vector<RegionHit>& out) const {
    const uint64_t kk = uint64_t(k_) * k_;
    for (uint64_t q = 0; q < kk; ++q) {
        uint64_t cr = row0 + q / k_ * sub;
        uint64_t cc = col0 + q % k_ * sub;
        if (cr > r2 || cr + sub - 1 < r1 || cc > c2 || cc + sub - 1 < c1) continue;
        uint64_t p = block + q;
        if (level + 1 == height_) {
            uint64_t leaf = p - tree_.size();
            if (leaves_.access(leaf)) out.push_back({leaf, cr, cc});
        } else if (tree_.access(p)) {
            region_walk(tree_.rank1(p) * kk, level + 1, cr, cc, sub / k_, r1, r2, c1, c2, out);
        }
    }
}

std::vector<K2Tree::RegionHit> K2Tree::region(uint64_t r1, uint64_t r2, uint64_t c1,
                                              uint64_t c2) const {
    if (r1 > r2 || c1 > c2) throw std::invalid_argument("empty region bounds");
    std::vector<RegionHit> out;
    if (tree_.size() == 0 && leaves_.size() == 0) return out;
    r2 = std::min(r2, rows_ - 1);
    c2 = std::min(c2, cols_ - 1);
    if (r1 > r2 || c1 > c2) return out;
    region_walk(0, 0, 0, 0, side_ / k_, r1, r2, c1, c2, out);
    return out;
}

void K2Tree::save(io::Writer& w) const {
    w.u8(uint8_t(k_));
    w.u8(uint8_t(height_));
    w.u64(rows_);
    w.u64(cols_);
    tree_.save(w);
    leaves_.save(w);
}

K2Tree K2Tree::load(io::Reader& r) {
    K2Tree t;
    t.k_ = r.u8();
    t.height_ = r.u8();
    t.rows_ = r.u64();
    t.cols_ = r.u64();
    if (t.k_ < 2 || t.k_ > 4 || t.height_ == 0) throw CorruptFile("bad quadtree header");
    t.side_ = pow_u64(t.k_, t.height_);
    if (t.side_ < std::max(t.rows_, t.cols_)) throw CorruptFile("quadtree shallower than its grid");
    t.tree_ = BitSequence::load(r);
    t.leaves_ = BitSequence::load(r);
    const uint64_t kk = uint64_t(t.k_) * t.k_;
    if (t.tree_.size() % kk != 0 || t.leaves_.size() % kk != 0 ||
        t.tree_.size() + t.leaves_.size() != kk * (1 + t.tree_.count(true)))
        throw CorruptFile("quadtree bit counts inconsistent");
    return t;
}

}  // namespace ctix
