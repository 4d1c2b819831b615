// Acceptance gate for the compressed trajectory index. Runs eight end-to-end
// checks — query equivalence against brute force, size/decode trends across
// snapshot periods, feature bounds, and per-layer worked examples — and
// prints one PASS/FAIL line per criterion. Exits 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctix/bitseq.hpp"
#include "ctix/dataset.hpp"
#include "ctix/engine.hpp"
#include "ctix/ingest.hpp"
#include "ctix/io.hpp"
#include "ctix/permutation.hpp"
#include "ctix/scdc.hpp"
#include "ctix/snapshot.hpp"
#include "ctix/spiral.hpp"

namespace {

using ctix::Dataset;
using ctix::TrajectoryIndex;
using Cell = std::pair<uint32_t, uint32_t>;

// ---------------------------------------------------------------- oracles --

std::optional<Cell> oracle_position(const Dataset& ds, uint32_t o, uint32_t t) {
    if (!ds.present(o, t)) return std::nullopt;
    return ds.position(o, t);
}

struct Rect {
    uint32_t r1, r2, c1, c2;
    bool contains(Cell c) const {
        return c.first >= r1 && c.first <= r2 && c.second >= c1 && c.second <= c2;
    }
};

std::vector<TrajectoryIndex::SliceHit> oracle_slice(const Dataset& ds, Rect q, uint32_t t) {
    std::vector<TrajectoryIndex::SliceHit> out;
    for (uint32_t o = 0; o < ds.objects(); ++o) {
        if (!ds.present(o, t)) continue;
        Cell c = ds.position(o, t);
        if (q.contains(c)) out.push_back({o, c.first, c.second});
    }
    return out;
}

std::vector<TrajectoryIndex::IntervalHit> oracle_interval(const Dataset& ds, Rect q, uint32_t t1,
                                                          uint32_t t2) {
    std::vector<TrajectoryIndex::IntervalHit> out;
    for (uint32_t o = 0; o < ds.objects(); ++o) {
        for (uint32_t t = t1; t <= t2; ++t) {
            if (!ds.present(o, t)) continue;
            Cell c = ds.position(o, t);
            if (q.contains(c)) {
                out.push_back({o, c.first, c.second, t});
                break;
            }
        }
    }
    return out;
}

bool same_slice(const std::vector<TrajectoryIndex::SliceHit>& a,
                const std::vector<TrajectoryIndex::SliceHit>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].oid != b[i].oid || a[i].row != b[i].row || a[i].col != b[i].col) return false;
    return true;
}

bool same_interval(const std::vector<TrajectoryIndex::IntervalHit>& a,
                   const std::vector<TrajectoryIndex::IntervalHit>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].oid != b[i].oid || a[i].row != b[i].row || a[i].col != b[i].col ||
            a[i].instant != b[i].instant)
            return false;
    return true;
}

// ----------------------------------------------------- shared workload set --

struct DatasetSpec {
    ctix::ingest::SyntheticParams sp;
    uint32_t period;
};

// Twenty datasets spanning the supported ranges: up to 200 objects, up to
// 2,000 instants, grids up to 256x256, presence gaps off/moderate/heavy, and
// snapshot periods 10/50/120. Deterministic so every run sees the same set.
std::vector<DatasetSpec> equivalence_schedule() {
    std::mt19937_64 rng(20260817);
    const double rates[3] = {0.0, 0.10, 0.25};
    const uint32_t periods[3] = {10, 50, 120};
    std::vector<DatasetSpec> out;
    for (int i = 0; i < 20; ++i) {
        ctix::ingest::SyntheticParams sp;
        sp.objects = 20 + uint32_t(rng() % 181);     // 20..200
        sp.instants = 100 + uint32_t(rng() % 1901);  // 100..2000
        uint32_t grid = 64 + uint32_t(rng() % 193);  // 64..256
        sp.rows = grid;
        sp.cols = grid;
        sp.max_step = 3;
        sp.disappearance_rate = rates[i % 3];
        sp.reappearance_rate = 0.30;
        sp.seed = 1000 + uint64_t(i);
        out.push_back({sp, periods[i % 3]});
    }
    return out;
}

struct Workload {
    std::vector<std::pair<uint32_t, uint32_t>> position_queries;  // (oid, t)
    std::vector<std::pair<Rect, uint32_t>> slice_queries;         // (rect, t)
    struct Interval {
        Rect rect;
        uint32_t t1, t2;
    };
    std::vector<Interval> interval_queries;
};

Rect random_rect(std::mt19937_64& rng, uint32_t rows, uint32_t cols) {
    uint32_t r1 = uint32_t(rng() % rows);
    uint32_t r2 = r1 + uint32_t(rng() % (rows - r1));
    uint32_t c1 = uint32_t(rng() % cols);
    uint32_t c2 = c1 + uint32_t(rng() % (cols - c1));
    return {r1, r2, c1, c2};
}

Workload make_workload(const Dataset& ds, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Workload w;
    for (int q = 0; q < 1000; ++q)
        w.position_queries.emplace_back(uint32_t(rng() % ds.objects()),
                                        uint32_t(rng() % ds.instants));
    for (int q = 0; q < 200; ++q)
        w.slice_queries.emplace_back(random_rect(rng, ds.rows, ds.cols),
                                     uint32_t(rng() % ds.instants));
    for (int q = 0; q < 50; ++q) {
        Rect r = random_rect(rng, ds.rows, ds.cols);
        uint32_t t1 = uint32_t(rng() % ds.instants);
        uint32_t t2 = t1 + uint32_t(rng() % (ds.instants - t1));
        w.interval_queries.push_back({r, t1, t2});
    }
    return w;
}

// ------------------------------------------------------------- criterion 1 --
// Query equivalence: every query kind matches a brute-force replay of the
// uncompressed dataset on all twenty datasets, within a two-minute budget.

bool criterion1() {
    auto start = std::chrono::steady_clock::now();
    uint64_t mismatches = 0, queries = 0;
    auto schedule = equivalence_schedule();
    for (size_t i = 0; i < schedule.size(); ++i) {
        Dataset ds = ctix::ingest::generate_synthetic(schedule[i].sp);
        ctix::IndexParams params;
        params.snapshot_period = schedule[i].period;
        TrajectoryIndex idx = TrajectoryIndex::build(ds, params);
        Workload w = make_workload(ds, 7000 + uint64_t(i));

        for (auto [oid, t] : w.position_queries) {
            ++queries;
            if (idx.object_position(oid, t) != oracle_position(ds, oid, t)) ++mismatches;
        }
        for (auto& [rect, t] : w.slice_queries) {
            ++queries;
            auto got = idx.time_slice(rect.r1, rect.r2, rect.c1, rect.c2, t);
            if (!same_slice(got, oracle_slice(ds, rect, t))) ++mismatches;
        }
        for (auto& q : w.interval_queries) {
            ++queries;
            auto got = idx.time_interval(q.rect.r1, q.rect.r2, q.rect.c1, q.rect.c2, q.t1, q.t2);
            if (!same_interval(got, oracle_interval(ds, q.rect, q.t1, q.t2))) ++mismatches;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = mismatches == 0 && secs < 120.0;
    std::printf(
        "criterion 1: %s — query equivalence vs brute force on 20 datasets "
        "(%" PRIu64 " queries, %" PRIu64 " mismatches, %.1fs)\n",
        ok ? "PASS" : "FAIL", queries, mismatches, secs);
    return ok;
}

// ------------------------------------------------------------- criterion 2 --
// Size/decode trade-off: on the default synthetic workload, index size
// strictly falls and average decoded symbols per position query strictly
// rises across periods 15 -> 30 -> 60 -> 120; at 120 the index is at most
// 60% of the 8-bytes-per-present-pair baseline.

bool criterion2() {
    ctix::ingest::SyntheticParams sp;  // library defaults
    Dataset ds = ctix::ingest::generate_synthetic(sp);
    std::mt19937_64 rng(42);
    std::vector<std::pair<uint32_t, uint32_t>> queries;
    for (int q = 0; q < 1000; ++q)
        queries.emplace_back(uint32_t(rng() % ds.objects()), uint32_t(rng() % ds.instants));

    const uint32_t periods[4] = {15, 30, 60, 120};
    uint64_t sizes[4] = {0, 0, 0, 0};
    double avg_decoded[4] = {0, 0, 0, 0};
    uint64_t baseline = 0;
    bool ok = true;
    for (int pi = 0; pi < 4; ++pi) {
        ctix::IndexParams params;
        params.snapshot_period = periods[pi];
        TrajectoryIndex idx = TrajectoryIndex::build(ds, params);
        auto st = idx.stats();
        sizes[pi] = st.sizes.total();
        baseline = st.baseline;
        ctix::scdc::reset_decoded_symbols();
        for (auto [oid, t] : queries) idx.object_position(oid, t);
        avg_decoded[pi] = double(ctix::scdc::decoded_symbols()) / double(queries.size());
    }
    for (int pi = 1; pi < 4; ++pi) {
        if (!(sizes[pi] < sizes[pi - 1])) ok = false;
        if (!(avg_decoded[pi] > avg_decoded[pi - 1])) ok = false;
    }
    double pct = baseline ? 100.0 * double(sizes[3]) / double(baseline) : 100.0;
    if (!(pct <= 60.0)) ok = false;
    std::printf(
        "criterion 2: %s — size falls %" PRIu64 "/%" PRIu64 "/%" PRIu64 "/%" PRIu64
        " B and avg decode rises %.1f/%.1f/%.1f/%.1f across periods 15/30/60/120; "
        "period-120 index is %.1f%% of the %" PRIu64 " B baseline (need <= 60%%)\n",
        ok ? "PASS" : "FAIL", sizes[0], sizes[1], sizes[2], sizes[3], avg_decoded[0],
        avg_decoded[1], avg_decoded[2], avg_decoded[3], pct, baseline);
    return ok;
}

// ------------------------------------------------------------- criterion 3 --
// Decode cost tracks the offset into a segment: queries at snapshot instants
// decode nothing, and queries a quarter, half, and three quarters of the way
// into a segment decode strictly increasing symbol counts.

bool criterion3() {
    ctix::ingest::SyntheticParams sp;
    sp.objects = 100;
    sp.instants = 600;
    sp.disappearance_rate = 0.0;  // always present: decode count == offset
    sp.reappearance_rate = 0.0;
    sp.seed = 7;
    Dataset ds = ctix::ingest::generate_synthetic(sp);
    ctix::IndexParams params;
    params.snapshot_period = 60;
    TrajectoryIndex idx = TrajectoryIndex::build(ds, params);

    bool ok = true;
    uint64_t snapshot_decoded = 0;
    for (uint32_t t0 = 0; t0 < ds.instants; t0 += params.snapshot_period)
        for (uint32_t o = 0; o < ds.objects(); ++o) {
            ctix::scdc::reset_decoded_symbols();
            idx.object_position(o, t0);
            snapshot_decoded += ctix::scdc::decoded_symbols();
        }
    if (snapshot_decoded != 0) ok = false;

    const uint32_t offsets[3] = {15, 30, 45};  // quarter, half, three quarters
    uint64_t totals[3] = {0, 0, 0};
    for (int oi = 0; oi < 3; ++oi) {
        for (uint32_t t0 = 0; t0 + params.snapshot_period <= ds.instants;
             t0 += params.snapshot_period)
            for (uint32_t o = 0; o < ds.objects(); ++o) {
                ctix::scdc::reset_decoded_symbols();
                idx.object_position(o, t0 + offsets[oi]);
                uint64_t d = ctix::scdc::decoded_symbols();
                if (d != offsets[oi]) ok = false;  // gap-free replay is exact
                totals[oi] += d;
            }
        if (oi > 0 && !(totals[oi] > totals[oi - 1])) ok = false;
    }
    std::printf(
        "criterion 3: %s — snapshot-instant queries decode %" PRIu64
        " symbols; totals rise %" PRIu64 "/%" PRIu64 "/%" PRIu64
        " at quarter/half/three-quarter segment offsets\n",
        ok ? "PASS" : "FAIL", snapshot_decoded, totals[0], totals[1], totals[2]);
    return ok;
}

// ------------------------------------------------------------- criterion 4 --
// Optional features change cost, not answers: bidirectional replay caps the
// per-query decode at ceil(P/2)+1, accumulators at the checkpoint interval,
// and both return exactly the plain index's answers on every query.

bool criterion4() {
    const uint32_t accum = 10;
    uint64_t mismatches = 0, bound_breaks = 0, queries = 0;
    uint64_t worst_bidir = 0, worst_accum = 0;
    auto schedule = equivalence_schedule();
    for (size_t i = 0; i < schedule.size(); ++i) {
        Dataset ds = ctix::ingest::generate_synthetic(schedule[i].sp);
        uint32_t period = schedule[i].period;
        uint64_t bidir_cap = (period + 1) / 2 + 1;

        ctix::IndexParams plain_p, bidir_p, accum_p;
        plain_p.snapshot_period = bidir_p.snapshot_period = accum_p.snapshot_period = period;
        bidir_p.bidirectional = true;
        accum_p.accum_interval = accum;
        TrajectoryIndex plain = TrajectoryIndex::build(ds, plain_p);
        TrajectoryIndex bidir = TrajectoryIndex::build(ds, bidir_p);
        TrajectoryIndex accumulated = TrajectoryIndex::build(ds, accum_p);

        Workload w = make_workload(ds, 7000 + uint64_t(i));
        for (auto [oid, t] : w.position_queries) {
            ++queries;
            auto want = plain.object_position(oid, t);

            ctix::scdc::reset_decoded_symbols();
            auto via_bidir = bidir.object_position(oid, t);
            uint64_t db = ctix::scdc::decoded_symbols();
            worst_bidir = std::max(worst_bidir, db);
            if (db > bidir_cap) ++bound_breaks;
            if (via_bidir != want) ++mismatches;

            ctix::scdc::reset_decoded_symbols();
            auto via_accum = accumulated.object_position(oid, t);
            uint64_t da = ctix::scdc::decoded_symbols();
            worst_accum = std::max(worst_accum, da);
            if (da > accum) ++bound_breaks;
            if (via_accum != want) ++mismatches;
        }
        for (auto& [rect, t] : w.slice_queries) {
            ++queries;
            auto want = plain.time_slice(rect.r1, rect.r2, rect.c1, rect.c2, t);
            if (!same_slice(bidir.time_slice(rect.r1, rect.r2, rect.c1, rect.c2, t), want))
                ++mismatches;
            if (!same_slice(accumulated.time_slice(rect.r1, rect.r2, rect.c1, rect.c2, t), want))
                ++mismatches;
        }
        for (auto& q : w.interval_queries) {
            ++queries;
            auto want = plain.time_interval(q.rect.r1, q.rect.r2, q.rect.c1, q.rect.c2, q.t1, q.t2);
            if (!same_interval(
                    bidir.time_interval(q.rect.r1, q.rect.r2, q.rect.c1, q.rect.c2, q.t1, q.t2),
                    want))
                ++mismatches;
            if (!same_interval(accumulated.time_interval(q.rect.r1, q.rect.r2, q.rect.c1, q.rect.c2,
                                                         q.t1, q.t2),
                               want))
                ++mismatches;
        }
    }
    bool ok = mismatches == 0 && bound_breaks == 0;
    std::printf(
        "criterion 4: %s — bidirectional and accumulator indexes answer %" PRIu64
        " queries identically to the plain index; worst decode %" PRIu64
        " (bidirectional, cap ceil(P/2)+1) and %" PRIu64 " (accumulators, cap %u), %" PRIu64
        " bound violations\n",
        ok ? "PASS" : "FAIL", queries, worst_bidir, worst_accum, accum, bound_breaks);
    return ok;
}

// ------------------------------------------------------------- criterion 5 --
// Spiral codec: a bijection on the full |dx|,|dy| <= 100 square, with the
// fixed anchors and the two diagonal square laws.

bool criterion5() {
    const int32_t R = 100;
    const uint32_t side = 2 * R + 1;
    std::vector<uint8_t> seen(side * side, 0);
    uint64_t bad = 0;
    for (int32_t dx = -R; dx <= R; ++dx)
        for (int32_t dy = -R; dy <= R; ++dy) {
            uint32_t code = ctix::spiral_encode(dx, dy);
            if (code >= seen.size() || seen[code]) {
                ++bad;
                continue;
            }
            seen[code] = 1;
            ctix::Displacement d = ctix::spiral_decode(code);
            if (d.dx != dx || d.dy != dy) ++bad;
        }
    for (uint8_t s : seen)
        if (!s) ++bad;

    if (ctix::spiral_encode(0, 0) != 0) ++bad;
    if (ctix::spiral_encode(2, 2) != 24) ++bad;
    if (ctix::spiral_encode(-2, 0) != 18) ++bad;
    for (int32_t k = 0; k <= 50; ++k) {
        if (ctix::spiral_encode(-k, -k) != uint32_t(2 * k) * uint32_t(2 * k)) ++bad;
        if (ctix::spiral_encode(k + 1, k) != uint32_t(2 * k + 1) * uint32_t(2 * k + 1)) ++bad;
    }
    bool ok = bad == 0;
    std::printf(
        "criterion 5: %s — spiral codes biject onto [0, %zu) over the 201x201 "
        "displacement square; anchors and diagonal square laws hold (%" PRIu64 " violations)\n",
        ok ? "PASS" : "FAIL", seen.size(), bad);
    return ok;
}

// ------------------------------------------------------------- criterion 6 --
// Byte-oriented dense coding: 10^4-symbol Zipf streams roundtrip under 20
// random stopper/continuer splits, decoding restarted at every codeword
// boundary reproduces the suffix, and the chosen split matches an exhaustive
// sweep against an independently computed size objective.

uint32_t independent_codeword_length(uint64_t rank, uint64_t s, uint64_t c) {
    uint64_t base = 0, count = s;
    uint32_t len = 1;
    while (rank >= base + count) {
        base += count;
        count *= c;
        ++len;
    }
    return len;
}

bool criterion6() {
    uint64_t bad = 0;
    uint64_t boundary_checks = 0;
    const size_t n = 10000;
    for (int trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(500 + uint64_t(trial));

        // Zipf(1.1) over 300 ranks, scattered onto non-contiguous symbol ids.
        std::vector<double> weights(300);
        for (size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / std::pow(double(r + 1), 1.1);
        std::discrete_distribution<uint32_t> zipf(weights.begin(), weights.end());
        std::vector<uint32_t> symbols(n);
        std::vector<uint64_t> freq_by_symbol(400, 0);
        for (size_t i = 0; i < n; ++i) {
            symbols[i] = (zipf(rng) * 17) % 400;
            ++freq_by_symbol[symbols[i]];
        }
        auto model = ctix::scdc::FrequencyModel::from_frequencies(freq_by_symbol);

        uint16_t s = uint16_t(1 + rng() % 255);
        ctix::scdc::Params p{s, uint16_t(256 - s)};

        // Encode symbol by symbol, recording every codeword boundary.
        std::vector<uint8_t> bytes;
        std::vector<size_t> boundary{0};
        for (uint32_t sym : symbols) {
            ctix::scdc::encode_symbol(model, p, sym, bytes);
            boundary.push_back(bytes.size());
        }
        if (ctix::scdc::encode_stream(model, p, symbols) != bytes) ++bad;

        // Size agrees with the closed-form objective.
        uint64_t formula_bytes = 0;
        for (size_t r = 0; r < model.vocabulary(); ++r)
            formula_bytes += model.freq_by_rank()[r] * independent_codeword_length(r, p.s, p.c);
        if (formula_bytes != bytes.size()) ++bad;

        // Full roundtrip.
        auto decoded = ctix::scdc::decode_stream_from(bytes.data(), bytes.size(), 0, n, model, p);
        if (decoded != symbols) ++bad;

        // Restarting at every boundary yields exactly the remaining suffix.
        const uint8_t* end = bytes.data() + bytes.size();
        for (size_t j = 0; j <= n; ++j) {
            ctix::scdc::StreamDecoder d(bytes.data() + boundary[j], end, model, p);
            for (size_t t = j; t < n; ++t) {
                ++boundary_checks;
                if (!d.has_more() || d.next() != symbols[t]) {
                    ++bad;
                    break;
                }
            }
            if (d.has_more() && j == n) ++bad;
        }

        // The library's split choice matches an exhaustive independent sweep.
        uint64_t best_bytes = UINT64_MAX;
        uint16_t best_s = 0;
        for (uint32_t cand = 1; cand <= 255; ++cand) {
            uint64_t total = 0;
            for (size_t r = 0; r < model.vocabulary(); ++r)
                total += model.freq_by_rank()[r] * independent_codeword_length(r, cand, 256 - cand);
            if (total < best_bytes) {
                best_bytes = total;
                best_s = uint16_t(cand);
            }
        }
        auto chosen = ctix::scdc::choose_optimal_s(model.freq_by_rank());
        if (chosen.s != best_s || chosen.c != 256 - best_s) ++bad;
        if (ctix::scdc::encoded_bytes(chosen, model.freq_by_rank()) != best_bytes) ++bad;
    }
    bool ok = bad == 0;
    std::printf(
        "criterion 6: %s — 20 Zipf streams of %zu symbols roundtrip under random "
        "splits, every codeword boundary restarts cleanly (%" PRIu64
        " suffix symbols re-decoded), and the chosen split matches the exhaustive "
        "sweep (%" PRIu64 " violations)\n",
        ok ? "PASS" : "FAIL", n, boundary_checks, bad);
    return ok;
}

// ------------------------------------------------------------- criterion 7 --
// Succinct layer: rank/select match linear-scan oracles on bitmaps up to
// 10^5 bits; the shortcut-permutation inverse matches a naive inverse on
// 1,000 random permutations; and the twelve-element worked example places its
// marks and back-links exactly (inverse of value 2 is position 3, reached via
// the 2 -> 0 back-link).

bool criterion7() {
    uint64_t bad = 0;

    const size_t sizes[] = {1, 63, 64, 65, 1000, 100000};
    const double densities[] = {0.0, 0.03, 0.5, 0.97, 1.0};
    std::mt19937_64 rng(20252025);
    for (size_t nbits : sizes)
        for (double density : densities) {
            std::vector<uint8_t> bits(nbits);
            ctix::BitBuilder bb;
            for (size_t i = 0; i < nbits; ++i) {
                bits[i] = (rng() % 1000000) < uint64_t(density * 1000000) ? 1 : 0;
                bb.push(bits[i]);
            }
            ctix::BitSequence bs = std::move(bb).build();

            uint64_t ones = 0;
            std::vector<uint64_t> one_pos, zero_pos;
            for (size_t p = 0; p < nbits; ++p) {
                if (bits[p]) {
                    ++ones;
                    one_pos.push_back(p);
                } else {
                    zero_pos.push_back(p);
                }
                if (bs.access(p) != bool(bits[p])) ++bad;
                if (bs.rank(true, p) != ones) ++bad;
                if (bs.rank(false, p) != (p + 1) - ones) ++bad;
            }
            for (size_t i = 0; i < one_pos.size(); ++i)
                if (bs.select(true, int64_t(i + 1)) != one_pos[i]) ++bad;
            for (size_t i = 0; i < zero_pos.size(); ++i)
                if (bs.select(false, int64_t(i + 1)) != zero_pos[i]) ++bad;
            bool threw = false;
            try {
                bs.select(true, int64_t(one_pos.size() + 1));
            } catch (const std::out_of_range&) {
                threw = true;
            }
            if (!threw) ++bad;
        }

    uint64_t inverse_checks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        size_t m = 1 + rng() % 120;
        std::vector<uint32_t> values(m);
        for (size_t i = 0; i < m; ++i) values[i] = uint32_t(i);
        std::shuffle(values.begin(), values.end(), rng);
        std::vector<uint32_t> naive(m);
        for (size_t i = 0; i < m; ++i) naive[values[i]] = uint32_t(i);

        uint32_t rate = (trial % 4 == 0) ? 0 : uint32_t(1 + rng() % 8);
        auto perm = ctix::build_permutation(values, rate);
        for (uint32_t v = 0; v < m; ++v) {
            ++inverse_checks;
            if (perm.inverse(v) != naive[v]) ++bad;
            auto w = perm.inverse_walk(v);
            if (w.position != naive[v] || w.steps > perm.sample_rate + 1) ++bad;
        }
    }

    // Worked example: values (3 1 6 2 4 8 7 0 5 9 11 10), sampled every 2
    // steps. The long cycle marks positions 0, 2, 7; looking up value 2 walks
    // 2 -> 0 -> 3 through the back-link and lands on position 3.
    {
        std::vector<uint32_t> values{3, 1, 6, 2, 4, 8, 7, 0, 5, 9, 11, 10};
        auto perm = ctix::build_permutation(values, 2);
        std::vector<size_t> marks;
        for (size_t i = 0; i < perm.size(); ++i)
            if (perm.sampled.access(i)) marks.push_back(i);
        if (marks != std::vector<size_t>{0, 2, 7}) ++bad;
        if (perm.rev_links != std::vector<uint32_t>{7, 0, 2}) ++bad;
        if (perm.inverse(2) != 3) ++bad;
        auto w = perm.inverse_walk(2);
        if (w.position != 3 || !w.took_shortcut) ++bad;
    }

    bool ok = bad == 0;
    std::printf(
        "criterion 7: %s — rank/select match linear oracles on bitmaps to 100000 "
        "bits, %" PRIu64
        " permutation inverses over 1000 random permutations match the naive "
        "inverse, and the 12-element worked example lays marks {0,2,7} with the "
        "2->0 back-link (%" PRIu64 " violations)\n",
        ok ? "PASS" : "FAIL", inverse_checks, bad);
    return ok;
}

// ------------------------------------------------------------- criterion 8 --
// Snapshot layer: the five-object worked example produces the expected id
// permutation and group-boundary bitmap, and cell <-> object lookups survive
// save/load roundtrips on 100 random snapshots.

bool criterion8() {
    uint64_t bad = 0;

    {
        std::vector<ctix::Snapshot::Placement> pl = {
            {25, 3, 3}, {30, 0, 0}, {29, 3, 3}, {10, 0, 0}, {28, 3, 3}};
        ctix::Snapshot snap = ctix::Snapshot::build(pl, 4, 4, 2);
        if (snap.perm() != std::vector<uint32_t>{10, 30, 25, 28, 29}) ++bad;
        std::string qbits;
        for (size_t i = 0; i < snap.quantity().size(); ++i)
            qbits += snap.quantity().access(i) ? '1' : '0';
        if (qbits != "10110") ++bad;
    }

    std::mt19937_64 rng(808080);
    for (int trial = 0; trial < 100; ++trial) {
        uint32_t rows = 1 + uint32_t(rng() % 64);
        uint32_t cols = 1 + uint32_t(rng() % 64);
        uint32_t k = 2 + uint32_t(trial % 2);
        size_t m = rng() % 80;

        // Distinct ids (possibly sparse), arbitrary shared cells.
        std::vector<uint32_t> ids;
        for (uint32_t v = 0; ids.size() < m; ++v)
            if (rng() % 3 == 0) ids.push_back(v);
        std::shuffle(ids.begin(), ids.end(), rng);

        std::vector<ctix::Snapshot::Placement> pl;
        for (uint32_t id : ids)
            pl.push_back({id, uint32_t(rng() % rows), uint32_t(rng() % cols)});

        ctix::Snapshot snap = ctix::Snapshot::build(pl, rows, cols, k);
        ctix::io::VectorWriter vw;
        snap.save(vw);
        ctix::io::Reader br(vw.buffer());
        ctix::Snapshot back = ctix::Snapshot::load(br);

        for (const ctix::Snapshot* s : {&snap, &back}) {
            if (s->placed() != pl.size()) ++bad;
            for (const auto& p : pl) {
                auto cell = s->cell_of_object(p.oid);
                if (!cell || cell->first != p.row || cell->second != p.col) ++bad;
            }
            // An id never placed must come back empty.
            uint32_t absent = ids.empty() ? 5 : ids.back() + 1 + uint32_t(rng() % 5);
            bool is_placed = false;
            for (uint32_t id : ids) is_placed = is_placed || id == absent;
            if (!is_placed && s->cell_of_object(absent).has_value()) ++bad;

            // Every occupied cell returns exactly its occupants.
            std::vector<std::vector<uint32_t>> by_cell(size_t(rows) * cols);
            for (const auto& p : pl) by_cell[size_t(p.row) * cols + p.col].push_back(p.oid);
            for (uint32_t r = 0; r < rows; ++r)
                for (uint32_t c = 0; c < cols; ++c) {
                    auto got = s->objects_in_cell(r, c);
                    auto want = by_cell[size_t(r) * cols + c];
                    std::sort(got.begin(), got.end());
                    std::sort(want.begin(), want.end());
                    if (got != want) ++bad;
                }
        }

        // Serialization is stable: saving the loaded copy is byte-identical.
        ctix::io::VectorWriter vw2;
        back.save(vw2);
        if (vw2.buffer() != vw.buffer()) ++bad;
    }

    bool ok = bad == 0;
    std::printf(
        "criterion 8: %s — worked example groups ids as 10,30,25,28,29 with "
        "boundary bits 10110; cell<->object lookups and serialization roundtrip "
        "on 100 random snapshots (%" PRIu64 " violations)\n",
        ok ? "PASS" : "FAIL", bad);
    return ok;
}

}  // namespace

int main() {
    bool all = true;
    all &= criterion1();
    all &= criterion2();
    all &= criterion3();
    all &= criterion4();
    all &= criterion5();
    all &= criterion6();
    all &= criterion7();
    all &= criterion8();
    std::printf("acceptance: %s\n", all ? "ALL CRITERIA PASS" : "FAILURES PRESENT");
    return all ? 0 : 1;
}
