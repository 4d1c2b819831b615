#include "ctix/permutation.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctix {

uint32_t ShortcutPermutation::apply(size_t i) const {
    if (i >= values.size()) throw std::out_of_range("permutation position out of range");
    return values[i];
}

ShortcutPermutation::InverseWalk ShortcutPermutation::inverse_walk(uint32_t v) const {
    if (v >= values.size()) throw std::out_of_range("permutation value out of range");
    uint32_t cur = v;
    uint32_t steps = 0;
    bool jumped = false;
    // The walk visits at most sample_rate + 1 positions on a well-formed
    // structure; the cap only trips on corrupt input.
    for (size_t guard = 0; guard <= values.size(); ++guard) {
        if (values[cur] == v) return {cur, steps, jumped};
        if (!jumped && sampled.size() != 0 && sampled.access(cur)) {
            cur = rev_links[sampled.rank1(cur) - 1];
            jumped = true;
        } else {
            cur = values[cur];
        }
        ++steps;
    }
    throw std::runtime_error("inverse walk did not close; permutation corrupt");
}

uint32_t ShortcutPermutation::inverse(uint32_t v) const { return inverse_walk(v).position; }

ShortcutPermutation build_permutation(std::vector<uint32_t> values, uint32_t sample_rate) {
    const size_t n = values.size();
    {
        std::vector<bool> seen(n, false);
        for (uint32_t v : values) {
            if (v >= n || seen[v]) throw std::invalid_argument("values is not a bijection on 0..n-1");
            seen[v] = true;
        }
    }
    if (sample_rate == 0) {
        sample_rate = 1;
        while ((size_t(1) << sample_rate) < n) ++sample_rate;
    }

    // Walk each cycle from its smallest position; mark every sample_rate-th
    // node, each mark pointing at the previous one (cyclically). Consecutive
    // marks are then never more than sample_rate steps apart.
    std::vector<std::pair<uint32_t, uint32_t>> links;  // (marked position, target)
    std::vector<bool> visited(n, false);
    std::vector<uint32_t> cycle;
    for (uint32_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        cycle.clear();
        uint32_t cur = start;
        do {
            visited[cur] = true;
            cycle.push_back(cur);
            cur = values[cur];
        } while (cur != start);
        if (cycle.size() <= sample_rate) continue;
        uint32_t prev = uint32_t(((cycle.size() - 1) / sample_rate) * sample_rate);
        for (uint32_t j = 0; j < cycle.size(); j += sample_rate) {
            links.emplace_back(cycle[j], cycle[prev]);
            prev = j;
        }
    }
    std::sort(links.begin(), links.end());

    BitBuilder marks;
    ShortcutPermutation p;
    p.rev_links.reserve(links.size());
    size_t next = 0;
    for (uint32_t i = 0; i < n; ++i) {
        bool m = next < links.size() && links[next].first == i;
        marks.push(m);
        if (m) p.rev_links.push_back(links[next++].second);
    }
    p.values = std::move(values);
    p.sampled = std::move(marks).build();
    p.sample_rate = sample_rate;
    return p;
}

void ShortcutPermutation::save(io::Writer& w) const {
    w.u64(values.size());
    for (uint32_t v : values) w.u32(v);
    sampled.save(w);
    w.u64(rev_links.size());
    for (uint32_t v : rev_links) w.u32(v);
    w.u32(sample_rate);
}

ShortcutPermutation ShortcutPermutation::load(io::Reader& r) {
    ShortcutPermutation p;
    uint64_t n = r.u64();
    p.values.resize(size_t(n));
    for (auto& v : p.values) v = r.u32();
    p.sampled = BitSequence::load(r);
    uint64_t m = r.u64();
    p.rev_links.resize(size_t(m));
    for (auto& v : p.rev_links) v = r.u32();
    p.sample_rate = r.u32();
    if (p.sampled.size() != n || p.sampled.count(true) != m)
        throw CorruptFile("permutation shortcut directory inconsistent");
    for (uint32_t v : p.values)
        if (v >= n) throw CorruptFile("permutation value out of range");
    for (uint32_t v : p.rev_links)
        if (v >= n) throw CorruptFile("permutation link out of range");
    return p;
}

uint64_t ShortcutPermutation::bytes() const {
    return values.size() * 4 + sampled.bytes() + rev_links.size() * 4 + 4;
}

}  // namespace ctix
