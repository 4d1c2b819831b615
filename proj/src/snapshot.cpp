#include "ctix/snapshot.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ctix {

const AbsReappearance* ReappearanceTables::abs_of(uint32_t oid) const {
    auto it = std::lower_bound(abs.begin(), abs.end(), oid,
                               [](const AbsReappearance& a, uint32_t v) { return a.oid < v; });
    return (it != abs.end() && it->oid == oid) ? &*it : nullptr;
}

void ReappearanceTables::save(io::Writer& w) const {
    w.u64(rel.size());
    for (const auto& e : rel) {
        w.u32(e.oid);
        w.u32(e.elapsed);
        w.i32(e.delta.dx);
        w.i32(e.delta.dy);
    }
    w.u64(abs.size());
    for (const auto& e : abs) {
        w.u32(e.oid);
        w.u32(e.instant);
        w.u32(e.row);
        w.u32(e.col);
    }
}

ReappearanceTables ReappearanceTables::load(io::Reader& r) {
    ReappearanceTables t;
    uint64_t nrel = r.u64();
    t.rel.reserve(size_t(nrel));
    for (uint64_t i = 0; i < nrel; ++i) {
        RelReappearance e;
        e.oid = r.u32();
        e.elapsed = r.u32();
        e.delta.dx = r.i32();
        e.delta.dy = r.i32();
        if (e.elapsed < 2) throw CorruptFile("relative reappearance without a gap");
        t.rel.push_back(e);
    }
    uint64_t nabs = r.u64();
    t.abs.reserve(size_t(nabs));
    uint64_t prev_oid = 0;
    for (uint64_t i = 0; i < nabs; ++i) {
        AbsReappearance e;
        e.oid = r.u32();
        e.instant = r.u32();
        e.row = r.u32();
        e.col = r.u32();
        if (i > 0 && e.oid <= prev_oid) throw CorruptFile("absolute reappearances not sorted by object");
        prev_oid = e.oid;
        t.abs.push_back(e);
    }
    return t;
}

Snapshot Snapshot::build(std::vector<Placement> placements, uint32_t rows, uint32_t cols,
                         uint32_t k) {
    Snapshot s;

    // Group objects by cell; the map key order is irrelevant because groups
    // are laid out by leaf index afterwards.
    std::map<std::pair<uint32_t, uint32_t>, std::vector<uint32_t>> by_cell;
    for (const auto& p : placements) by_cell[{p.row, p.col}].push_back(p.oid);

    std::vector<std::pair<uint64_t, uint64_t>> cells;
    cells.reserve(by_cell.size());
    for (const auto& [cell, group] : by_cell) cells.emplace_back(cell.first, cell.second);
    s.tree_ = K2Tree::build(k, rows, cols, cells);

    // Leaf order in L is quadrant order, which is what the Q grouping needs.
    std::vector<std::pair<int64_t, const std::vector<uint32_t>*>> groups;
    groups.reserve(by_cell.size());
    for (auto& [cell, group] : by_cell) {
        std::sort(group.begin(), group.end());
        int64_t leaf = s.tree_.leaf_index(cell.first, cell.second);
        if (leaf < 0) throw std::logic_error("occupied cell lost by the tree");
        groups.emplace_back(leaf, &group);
    }
    std::sort(groups.begin(), groups.end());

    BitBuilder q;
    for (const auto& [leaf, group] : groups) {
        for (size_t i = 0; i < group->size(); ++i) {
            s.perm_.push_back((*group)[i]);
            q.push(i + 1 < group->size());
        }
    }
    s.q_ = std::move(q).build();

    s.sorted_ids_ = s.perm_;
    std::sort(s.sorted_ids_.begin(), s.sorted_ids_.end());
    if (std::adjacent_find(s.sorted_ids_.begin(), s.sorted_ids_.end()) != s.sorted_ids_.end())
        throw std::invalid_argument("duplicate object id in snapshot placements");

    std::vector<uint32_t> ranks(s.perm_.size());
    for (size_t i = 0; i < s.perm_.size(); ++i)
        ranks[i] = uint32_t(std::lower_bound(s.sorted_ids_.begin(), s.sorted_ids_.end(),
                                             s.perm_[i]) -
                            s.sorted_ids_.begin());
    s.inv_ = build_permutation(std::move(ranks));
    return s;
}

void Snapshot::read_group(size_t leaf, std::vector<uint32_t>& out) const {
    // x-th occupied leaf (1-based); its group starts one past the (x-1)-th
    // zero of Q, and the group's own zero bit closes it.
    uint64_t x = tree_.leaf_bits().rank1(leaf);
    size_t p = size_t(q_.select0(x - 1) + 1);
    while (true) {
        out.push_back(perm_[p]);
        if (!q_.access(p)) break;
        ++p;
    }
}

std::vector<uint32_t> Snapshot::objects_in_cell(uint32_t row, uint32_t col) const {
    std::vector<uint32_t> out;
    if (perm_.empty()) return out;
    int64_t leaf = tree_.leaf_index(row, col);
    if (leaf < 0 || !tree_.leaf_bits().access(uint64_t(leaf))) return out;
    read_group(size_t(leaf), out);
    return out;
}

std::optional<std::pair<uint32_t, uint32_t>> Snapshot::cell_of_object(uint32_t oid) const {
    auto it = std::lower_bound(sorted_ids_.begin(), sorted_ids_.end(), oid);
    if (it == sorted_ids_.end() || *it != oid) return std::nullopt;
    uint32_t rank = uint32_t(it - sorted_ids_.begin());
    uint32_t k = inv_.inverse(rank);
    uint64_t y = k == 0 ? 0 : q_.rank0(k - 1);
    int64_t leaf = tree_.leaf_bits().select1(y + 1);
    if (leaf < 0) throw CorruptFile("quantity bitmap out of step with leaves");
    auto cell = tree_.cell_of_leaf(uint64_t(leaf));
    return std::make_pair(uint32_t(cell.first), uint32_t(cell.second));
}

std::vector<Snapshot::Placement> Snapshot::objects_in_region(uint32_t r1, uint32_t r2, uint32_t c1,
                                                             uint32_t c2) const {
    std::vector<Placement> out;
    if (perm_.empty()) return out;
    std::vector<uint32_t> group;
    for (const auto& hit : tree_.region(r1, r2, c1, c2)) {
        group.clear();
        read_group(size_t(hit.leaf), group);
        for (uint32_t oid : group) out.push_back({oid, uint32_t(hit.row), uint32_t(hit.col)});
    }
    return out;
}

void Snapshot::save(io::Writer& w) const {
    tree_.save(w);
    w.u64(perm_.size());
    for (uint32_t id : perm_) w.u32(id);
    q_.save(w);
    inv_.save(w);
    tables.save(w);
}

Snapshot Snapshot::load(io::Reader& r) {
    Snapshot s;
    s.tree_ = K2Tree::load(r);
    uint64_t n = r.u64();
    s.perm_.reserve(size_t(n));
    for (uint64_t i = 0; i < n; ++i) s.perm_.push_back(r.u32());
    s.q_ = BitSequence::load(r);
    s.inv_ = ShortcutPermutation::load(r);
    s.tables = ReappearanceTables::load(r);

    if (s.q_.size() != s.perm_.size() || s.inv_.size() != s.perm_.size())
        throw CorruptFile("snapshot arrays disagree in length");
    if (s.q_.count(false) != s.tree_.leaf_bits().count(true))
        throw CorruptFile("quantity bitmap does not terminate one group per occupied leaf");
    s.sorted_ids_ = s.perm_;
    std::sort(s.sorted_ids_.begin(), s.sorted_ids_.end());
    if (std::adjacent_find(s.sorted_ids_.begin(), s.sorted_ids_.end()) != s.sorted_ids_.end())
        throw CorruptFile("duplicate object id in snapshot");
    for (size_t i = 0; i < s.perm_.size(); ++i) {
        uint32_t rank = uint32_t(std::lower_bound(s.sorted_ids_.begin(), s.sorted_ids_.end(),
                                                  s.perm_[i]) -
                                 s.sorted_ids_.begin());
        if (s.inv_.values[i] != rank) throw CorruptFile("snapshot permutation out of step with ids");
    }
    return s;
}

uint64_t Snapshot::bytes() const {
    return tree_.bytes() + perm_.size() * 4 + q_.bytes() + inv_.bytes() + tables.bytes();
}

}  // namespace ctix
