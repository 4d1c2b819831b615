#include <CLI11.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ctix/engine.hpp"
#include "ctix/ingest.hpp"

namespace {

using ctix::Dataset;
using ctix::IndexParams;
using ctix::TrajectoryIndex;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCorrupt = 3;
constexpr int kExitInternal = 4;

// Thrown for usage-level problems discovered after flag parsing (missing
// files, unknown ids, malformed arguments).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
}

Dataset load_input_dataset(const std::string& path, double cell_size, double bucket_seconds,
                           double max_speed) {
    require_file(path);
    std::ifstream probe(path, std::ios::binary);
    char magic[4] = {};
    probe.read(magic, 4);
    if (probe.gcount() == 4 && std::string(magic, 4) == "CTDS") {
        auto buf = ctix::io::read_file(path);
        ctix::io::Reader r(buf);
        return Dataset::load(r);
    }
    auto parsed = ctix::ingest::read_reports_csv_file(path);
    if (!parsed.issues.empty()) {
        std::cerr << parsed.issues.size() << " input line(s) skipped:\n";
        for (size_t i = 0; i < parsed.issues.size() && i < 5; ++i)
            std::cerr << "  line " << parsed.issues[i].line << ": " << parsed.issues[i].message
                      << "\n";
        if (parsed.issues.size() > 5) std::cerr << "  ...\n";
    }
    if (parsed.reports.empty()) throw UsageError("no usable reports in " + path);
    ctix::ingest::NormalizeParams np;
    np.cell_size = cell_size;
    np.bucket_seconds = bucket_seconds;
    np.max_speed = max_speed;
    return ctix::ingest::normalize(std::move(parsed.reports), np);
}

void print_stats(std::ostream& out, const ctix::StatsReport& rep, bool csv) {
    const auto& s = rep.sizes;
    if (csv) {
        out << "key,value\n";
        out << "objects," << rep.objects << "\n";
        out << "instants," << rep.instants << "\n";
        out << "rows," << rep.rows << "\n";
        out << "cols," << rep.cols << "\n";
        out << "snapshots," << rep.snapshot_count << "\n";
        out << "present_pairs," << rep.present_pairs << "\n";
        out << "snapshot_bytes," << s.snapshots << "\n";
        out << "reappearance_bytes," << s.reappearance_tables << "\n";
        out << "stream_bytes," << s.streams << "\n";
        out << "stream_offset_bytes," << s.stream_offsets << "\n";
        out << "tail_bytes," << s.tails << "\n";
        out << "checkpoint_bytes," << s.checkpoints << "\n";
        out << "model_bytes," << s.model << "\n";
        out << "dictionary_bytes," << s.dictionary << "\n";
        out << "header_bytes," << s.header << "\n";
        out << "total_bytes," << s.total() << "\n";
        out << "baseline_bytes," << rep.baseline << "\n";
        if (rep.ratio_defined) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", rep.ratio_percent);
            out << "ratio_percent," << buf << "\n";
        } else {
            out << "ratio_percent,n/a\n";
        }
        return;
    }
    out << "objects          " << rep.objects << "\n";
    out << "instants         " << rep.instants << "\n";
    out << "grid             " << rep.rows << " x " << rep.cols << "\n";
    out << "snapshots        " << rep.snapshot_count << "\n";
    out << "present pairs    " << rep.present_pairs << "\n";
    out << "component bytes:\n";
    out << "  snapshots      " << s.snapshots << "\n";
    out << "  reappearance   " << s.reappearance_tables << "\n";
    out << "  streams        " << s.streams << "\n";
    out << "  stream offsets " << s.stream_offsets << "\n";
    out << "  tails          " << s.tails << "\n";
    out << "  checkpoints    " << s.checkpoints << "\n";
    out << "  model          " << s.model << "\n";
    out << "  dictionary     " << s.dictionary << "\n";
    out << "  header         " << s.header << "\n";
    out << "total            " << s.total() << " bytes\n";
    out << "baseline         " << rep.baseline << " bytes\n";
    if (rep.ratio_defined) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", rep.ratio_percent);
        out << "ratio            " << buf << "%\n";
    } else {
        out << "ratio            n/a\n";
    }
}

struct Rect {
    uint32_t r1 = 0, r2 = 0, c1 = 0, c2 = 0;
};

Rect parse_rect(const std::string& text) {
    Rect q;
    char extra;
    if (std::sscanf(text.c_str(), "%u,%u,%u,%u%c", &q.r1, &q.r2, &q.c1, &q.c2, &extra) != 4)
        throw UsageError("--rect wants r1,r2,c1,c2");
    return q;
}

int cmd_query(const std::string& index_path, const std::string& kind, const std::string& id,
              uint32_t t, uint32_t t1, uint32_t t2, const std::string& rect_text) {
    require_file(index_path);
    TrajectoryIndex idx = TrajectoryIndex::load_file(index_path);

    if (kind == "obj" || kind == "traj") {
        auto oid = idx.dense_id(id);
        if (!oid) throw UsageError("unknown object id: " + id);
        if (kind == "obj") {
            auto pos = idx.object_position(*oid, t);
            if (pos) std::cout << id << ',' << pos->first << ',' << pos->second << "\n";
            return kExitOk;
        }
        auto traj = idx.object_trajectory(*oid, t1, t2);
        for (uint32_t i = 0; i < traj.size(); ++i)
            if (traj[i])
                std::cout << id << ',' << traj[i]->first << ',' << traj[i]->second << ','
                          << (t1 + i) << "\n";
        return kExitOk;
    }
    Rect q = parse_rect(rect_text);
    if (kind == "slice") {
        for (const auto& hit : idx.time_slice(q.r1, q.r2, q.c1, q.c2, t))
            std::cout << idx.ids()[hit.oid] << ',' << hit.row << ',' << hit.col << "\n";
        return kExitOk;
    }
    if (kind == "interval") {
        for (const auto& hit : idx.time_interval(q.r1, q.r2, q.c1, q.c2, t1, t2))
            std::cout << idx.ids()[hit.oid] << ',' << hit.row << ',' << hit.col << ','
                      << hit.instant << "\n";
        return kExitOk;
    }
    throw UsageError("unknown query kind: " + kind);
}

int cmd_bench(const std::vector<uint32_t>& periods, uint32_t objects, uint32_t instants,
              uint32_t grid, double gap_rate, uint64_t seed, uint32_t obj_queries,
              uint32_t slice_queries, bool no_timing, const std::string& out_path) {
    ctix::ingest::SyntheticParams sp;
    sp.objects = objects;
    sp.instants = instants;
    sp.rows = sp.cols = grid;
    sp.disappearance_rate = gap_rate;
    sp.seed = seed;
    Dataset ds = ctix::ingest::generate_synthetic(sp);

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    struct ObjQ {
        uint32_t oid, t;
    };
    struct SliceQ {
        Rect q;
        uint32_t t;
    };
    std::vector<ObjQ> oq;
    for (uint32_t i = 0; i < obj_queries; ++i)
        oq.push_back({uint32_t(rng() % objects), uint32_t(rng() % instants)});
    std::vector<SliceQ> sq;
    for (uint32_t i = 0; i < slice_queries; ++i) {
        SliceQ s;
        uint32_t span = std::max<uint32_t>(1, grid / 8);
        s.q.r1 = uint32_t(rng() % grid);
        s.q.r2 = std::min(grid - 1, s.q.r1 + uint32_t(rng() % span));
        s.q.c1 = uint32_t(rng() % grid);
        s.q.c2 = std::min(grid - 1, s.q.c1 + uint32_t(rng() % span));
        s.t = uint32_t(rng() % instants);
        sq.push_back(s);
    }

    std::ostringstream csv;
    csv << "P,size_bytes,ratio,avg_obj_us,avg_slice_us,avg_decoded_symbols\n";
    for (uint32_t period : periods) {
        IndexParams params;
        params.snapshot_period = period;
        TrajectoryIndex idx = TrajectoryIndex::build(ds, params);
        auto rep = idx.stats();

        using clock = std::chrono::steady_clock;
        ctix::scdc::reset_decoded_symbols();
        auto start = clock::now();
        for (const auto& q : oq) idx.object_position(q.oid, q.t);
        auto mid = clock::now();
        uint64_t decoded = ctix::scdc::decoded_symbols();
        for (const auto& s : sq) idx.time_slice(s.q.r1, s.q.r2, s.q.c1, s.q.c2, s.t);
        auto stop = clock::now();

        double obj_us =
            no_timing ? 0.0
                      : std::chrono::duration<double, std::micro>(mid - start).count() /
                            double(oq.empty() ? 1 : oq.size());
        double slice_us =
            no_timing ? 0.0
                      : std::chrono::duration<double, std::micro>(stop - mid).count() /
                            double(sq.empty() ? 1 : sq.size());
        char line[160];
        std::snprintf(line, sizeof line, "%u,%" PRIu64 ",%.4f,%.2f,%.2f,%.2f\n", period,
                      rep.sizes.total(), rep.ratio_defined ? rep.ratio_percent : 0.0, obj_us,
                      slice_us, double(decoded) / double(oq.empty() ? 1 : oq.size()));
        csv << line;
    }

    if (out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw UsageError("cannot write " + out_path);
        out << csv.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressed in-memory index for moving-object trajectories"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "build an index from reports CSV or dataset binary");
    std::string build_in, build_out;
    IndexParams params;
    double cell_size = 1.0, bucket_seconds = 1.0;
    double max_speed = std::numeric_limits<double>::infinity();
    build->add_option("-i,--input", build_in, "reports CSV (id,timestamp,x,y) or CTDS binary")
        ->required();
    build->add_option("-o,--output", build_out, "index file to write")->required();
    build->add_option("-P,--period", params.snapshot_period, "instants between snapshots");
    build->add_option("--k", params.k, "quadrant subdivision arity");
    build->add_option("--max-step", params.max_step, "cells per instant bound (0 = derive)");
    build->add_option("--accum", params.accum_interval, "checkpoint interval (0 = off)");
    build->add_flag("--bidirectional", params.bidirectional, "store tails for backward replay");
    build->add_option("--cell-size", cell_size, "grid cell side for CSV input");
    build->add_option("--bucket-seconds", bucket_seconds, "instant length for CSV input");
    build->add_option("--max-speed", max_speed, "report speed limit for CSV input");

    // query
    auto* query = app.add_subcommand("query", "run a query against an index file");
    std::string q_index, q_kind, q_id, q_rect;
    uint32_t q_t = 0, q_t1 = 0, q_t2 = 0;
    query->add_option("-i,--input", q_index, "index file")->required();
    query->add_option("--kind", q_kind, "obj | traj | slice | interval")->required();
    query->add_option("--id", q_id, "external object id (obj, traj)");
    query->add_option("--t", q_t, "instant (obj, slice)");
    query->add_option("--t1", q_t1, "interval start (traj, interval)");
    query->add_option("--t2", q_t2, "interval end (traj, interval)");
    query->add_option("--rect", q_rect, "query rectangle r1,r2,c1,c2 (slice, interval)");

    // stats
    auto* stats = app.add_subcommand("stats", "print size breakdown of an index file");
    std::string s_index;
    bool s_csv = false;
    stats->add_option("-i,--input", s_index, "index file")->required();
    stats->add_flag("--csv", s_csv, "machine-readable key,value lines");

    // bench
    auto* bench = app.add_subcommand("bench", "build indexes over a period sweep and time them");
    std::vector<uint32_t> b_periods{15, 30, 60, 120};
    uint32_t b_objects = 200, b_instants = 600, b_grid = 256;
    uint32_t b_obj_queries = 100, b_slice_queries = 50;
    double b_gap = 0.1;
    uint64_t b_seed = 1;
    bool b_no_timing = false;
    std::string b_out = "-";
    bench->add_option("--periods", b_periods, "snapshot periods to sweep")->delimiter(',');
    bench->add_option("--objects", b_objects, "synthetic objects");
    bench->add_option("--instants", b_instants, "synthetic instants");
    bench->add_option("--grid", b_grid, "synthetic grid side");
    bench->add_option("--gap-rate", b_gap, "synthetic disappearance rate");
    bench->add_option("--seed", b_seed, "workload seed");
    bench->add_option("--obj-queries", b_obj_queries, "object-position queries per period");
    bench->add_option("--slice-queries", b_slice_queries, "time-slice queries per period");
    bench->add_flag("--no-timing", b_no_timing, "zero the wall-clock columns (reproducible CSV)");
    bench->add_option("-o,--output", b_out, "CSV path, or - for stdout");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic reports CSV");
    ctix::ingest::SyntheticParams g;
    std::string g_out, g_binary;
    gen->add_option("-o,--output", g_out, "reports CSV to write")->required();
    gen->add_option("--objects", g.objects, "number of objects");
    gen->add_option("--instants", g.instants, "number of instants");
    gen->add_option("--rows", g.rows, "grid rows");
    gen->add_option("--cols", g.cols, "grid columns");
    gen->add_option("--step", g.max_step, "per-instant move bound");
    gen->add_option("--gap-rate", g.disappearance_rate, "per-instant disappearance chance");
    gen->add_option("--reappear-rate", g.reappearance_rate, "per-instant reappearance chance");
    gen->add_option("--seed", g.seed, "generator seed");
    gen->add_option("--cell-size", g.cell_size, "cell side in coordinate units");
    gen->add_option("--bucket-seconds", g.bucket_seconds, "instant length in seconds");
    gen->add_option("--binary", g_binary, "also write the dataset binary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) {
            Dataset ds = load_input_dataset(build_in, cell_size, bucket_seconds, max_speed);
            TrajectoryIndex idx = TrajectoryIndex::build(ds, params);
            idx.save_file(build_out);
            print_stats(std::cout, idx.stats(), false);
            return kExitOk;
        }
        if (query->parsed()) return cmd_query(q_index, q_kind, q_id, q_t, q_t1, q_t2, q_rect);
        if (stats->parsed()) {
            require_file(s_index);
            TrajectoryIndex idx = TrajectoryIndex::load_file(s_index);
            print_stats(std::cout, idx.stats(), s_csv);
            return kExitOk;
        }
        if (bench->parsed())
            return cmd_bench(b_periods, b_objects, b_instants, b_grid, b_gap, b_seed,
                             b_obj_queries, b_slice_queries, b_no_timing, b_out);
        if (gen->parsed()) {
            Dataset ds = ctix::ingest::generate_synthetic(g);
            std::ofstream out(g_out, std::ios::binary);
            if (!out) throw UsageError("cannot write " + g_out);
            ctix::ingest::write_reports_csv(out, ctix::ingest::dataset_to_reports(ds));
            if (!g_binary.empty()) {
                ctix::io::FileWriter w(g_binary);
                ds.save(w);
                w.close();
            }
            std::cerr << "generated " << ds.objects() << " objects over " << ds.instants
                      << " instants (" << ds.present_count() << " present pairs)\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ctix::CorruptFile& e) {
        std::cerr << "corrupt input: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
