#include "ctix/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace ctix::ingest {

namespace {

constexpr double kTimeEps = 1e-9;  // absorbs float noise around bucket edges

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& field, double& out) {
    std::string t = trim(field);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// A report position on the unbounded cell lattice, before shifting.
struct LatticeCell {
    int64_t row, col;
    bool operator==(const LatticeCell& o) const { return row == o.row && col == o.col; }
};

LatticeCell discretize(const RawReport& r, double cell_size) {
    return {int64_t(std::floor(r.y / cell_size)), int64_t(std::floor(r.x / cell_size))};
}

}  // namespace

CsvReports read_reports_csv(std::istream& in) {
    CsvReports out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (line_no == 1 && t == "id,timestamp,x,y") continue;

        std::vector<std::string> fields;
        size_t start = 0;
        for (size_t pos = 0; pos <= t.size(); ++pos)
            if (pos == t.size() || t[pos] == ',') {
                fields.push_back(t.substr(start, pos - start));
                start = pos + 1;
            }
        if (fields.size() != 4) {
            out.issues.push_back({line_no, "expected 4 comma-separated fields, got " +
                                               std::to_string(fields.size())});
            continue;
        }
        RawReport r;
        r.id = trim(fields[0]);
        if (r.id.empty()) {
            out.issues.push_back({line_no, "empty object id"});
            continue;
        }
        if (!parse_number(fields[1], r.timestamp) || !parse_number(fields[2], r.x) ||
            !parse_number(fields[3], r.y)) {
            out.issues.push_back({line_no, "unparseable number"});
            continue;
        }
        if (r.timestamp < 0) {
            out.issues.push_back({line_no, "negative timestamp"});
            continue;
        }
        out.reports.push_back(std::move(r));
    }
    return out;
}

CsvReports read_reports_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_reports_csv(in);
}

void write_reports_csv(std::ostream& out, const std::vector<RawReport>& reports) {
    out << "id,timestamp,x,y\n";
    for (const auto& r : reports)
        out << r.id << ',' << format_number(r.timestamp) << ',' << format_number(r.x) << ','
            << format_number(r.y) << '\n';
}

void write_cells_csv(std::ostream& out, const Dataset& ds) {
    out << "id,instant,row,col\n";
    for (uint32_t o = 0; o < ds.objects(); ++o)
        for (uint32_t t = 0; t < ds.instants; ++t)
            if (ds.present(o, t)) {
                auto [r, c] = ds.position(o, t);
                out << ds.ids[o] << ',' << t << ',' << r << ',' << c << '\n';
            }
}

Dataset normalize(std::vector<RawReport> reports, const NormalizeParams& p) {
    if (!(p.cell_size > 0) || !(p.bucket_seconds > 0) || !(p.max_speed > 0))
        throw std::invalid_argument("cell size, bucket length and speed limit must be positive");

    // Group per object, dictionary in first-appearance order.
    std::vector<std::string> ids;
    std::unordered_map<std::string, uint32_t> dense;
    std::vector<std::vector<RawReport>> per;
    for (auto& r : reports) {
        auto [it, fresh] = dense.emplace(r.id, uint32_t(ids.size()));
        if (fresh) {
            ids.push_back(r.id);
            per.emplace_back();
        }
        per[it->second].push_back(std::move(r));
    }
    reports.clear();

    // Speed filter and interpolation, per object. The first report anchors
    // the track; later ones are judged against the last accepted report.
    // Dropped reports come back at their own timestamp, linearly interpolated
    // between the surviving neighbours; with a neighbour missing they vanish.
    double max_ts = 0.0;
    bool any = false;
    for (auto& v : per) {
        std::stable_sort(v.begin(), v.end(), [](const RawReport& a, const RawReport& b) {
            return a.timestamp < b.timestamp;
        });
        std::vector<RawReport> kept, outliers;
        for (auto& r : v) {
            if (kept.empty()) {
                kept.push_back(std::move(r));
                continue;
            }
            const RawReport& a = kept.back();
            double dt = r.timestamp - a.timestamp;
            if (dt <= 0) continue;  // duplicate timestamp: the earlier report stands
            if (std::hypot(r.x - a.x, r.y - a.y) / dt > p.max_speed) {
                outliers.push_back(std::move(r));
                continue;
            }
            kept.push_back(std::move(r));
        }
        std::vector<RawReport> filled;
        filled.reserve(outliers.size());
        for (auto& d : outliers) {
            auto next = std::lower_bound(
                kept.begin(), kept.end(), d.timestamp,
                [](const RawReport& k, double ts) { return k.timestamp < ts; });
            if (next == kept.begin() || next == kept.end()) continue;
            const RawReport& b = *next;
            const RawReport& a = *(next - 1);
            double f = (d.timestamp - a.timestamp) / (b.timestamp - a.timestamp);
            d.x = a.x + f * (b.x - a.x);
            d.y = a.y + f * (b.y - a.y);
            filled.push_back(std::move(d));
        }
        std::vector<RawReport> merged;
        merged.reserve(kept.size() + filled.size());
        std::merge(kept.begin(), kept.end(), filled.begin(), filled.end(),
                   std::back_inserter(merged), [](const RawReport& a, const RawReport& b) {
                       return a.timestamp < b.timestamp;
                   });
        v = std::move(merged);
        for (const auto& r : v) {
            max_ts = std::max(max_ts, r.timestamp);
            any = true;
        }
    }

    if (!any)
        return Dataset::from_tracks(1, 1, 1, {}, {}, p.cell_size, p.bucket_seconds);

    const double b = p.bucket_seconds;
    if (max_ts / b > 1e8)
        throw std::invalid_argument("timestamps span more than 1e8 buckets");
    const uint32_t T = uint32_t(std::ceil(max_ts / b - kTimeEps)) + 1;

    // Assign each instant the nearest surviving report within half a bucket
    // of its center, then fill same-cell silent stretches.
    std::vector<std::vector<std::optional<LatticeCell>>> tracks(per.size());
    int64_t min_row = INT64_MAX, min_col = INT64_MAX;
    int64_t max_row = INT64_MIN, max_col = INT64_MIN;
    for (size_t o = 0; o < per.size(); ++o) {
        const auto& v = per[o];
        auto& tr = tracks[o];
        tr.assign(T, std::nullopt);
        for (uint32_t i = 0; i < T; ++i) {
            double center = double(i) * b;
            auto it = std::lower_bound(
                v.begin(), v.end(), center,
                [](const RawReport& k, double ts) { return k.timestamp < ts; });
            const RawReport* best = nullptr;
            double best_dt = b / 2 + kTimeEps;
            if (it != v.begin()) {
                double dt = center - (it - 1)->timestamp;
                if (dt <= best_dt) {
                    best = &*(it - 1);
                    best_dt = dt;
                }
            }
            if (it != v.end()) {
                double dt = it->timestamp - center;
                // the earlier report stands on an exact tie
                if (best ? dt < best_dt : dt <= best_dt) {
                    best = &*it;
                    best_dt = dt;
                }
            }
            if (best) tr[i] = discretize(*best, p.cell_size);
        }
        // Same-cell silent stretches read as "stood still the whole time".
        uint32_t last = UINT32_MAX;
        for (uint32_t i = 0; i < T; ++i) {
            if (!tr[i]) continue;
            if (last != UINT32_MAX && i > last + 1 && *tr[last] == *tr[i])
                for (uint32_t g = last + 1; g < i; ++g) tr[g] = *tr[last];
            last = i;
        }
        for (const auto& cell : tr)
            if (cell) {
                min_row = std::min(min_row, cell->row);
                max_row = std::max(max_row, cell->row);
                min_col = std::min(min_col, cell->col);
                max_col = std::max(max_col, cell->col);
            }
    }

    std::vector<Dataset::Track> shifted(tracks.size());
    for (size_t o = 0; o < tracks.size(); ++o) {
        shifted[o].assign(T, std::nullopt);
        for (uint32_t i = 0; i < T; ++i)
            if (tracks[o][i])
                shifted[o][i] = Dataset::Cell{uint32_t(tracks[o][i]->row - min_row),
                                              uint32_t(tracks[o][i]->col - min_col)};
    }
    return Dataset::from_tracks(uint32_t(max_row - min_row + 1), uint32_t(max_col - min_col + 1),
                                T, std::move(ids), shifted, p.cell_size, p.bucket_seconds);
}

std::vector<RawReport> dataset_to_reports(const Dataset& ds) {
    std::vector<RawReport> out;
    out.reserve(ds.present_count());
    for (uint32_t o = 0; o < ds.objects(); ++o)
        for (uint32_t t = 0; t < ds.instants; ++t)
            if (ds.present(o, t)) {
                auto [r, c] = ds.position(o, t);
                out.push_back({ds.ids[o], double(t) * ds.bucket_seconds,
                               (double(c) + 0.5) * ds.cell_size,
                               (double(r) + 0.5) * ds.cell_size});
            }
    return out;
}

Dataset generate_synthetic(const SyntheticParams& p) {
    if (p.objects < 1 || p.instants < 1 || p.rows < 1 || p.cols < 1 || p.max_step < 1)
        throw std::invalid_argument("synthetic parameters must be positive");
    if (p.disappearance_rate < 0 || p.disappearance_rate > 1 || p.reappearance_rate < 0 ||
        p.reappearance_rate > 1)
        throw std::invalid_argument("rates must lie in [0, 1]");

    std::mt19937_64 rng(p.seed);
    auto chance = [&](double q) { return double(rng() >> 11) * 0x1.0p-53 < q; };
    auto pick = [&](uint32_t n) { return uint32_t(rng() % n); };

    std::vector<Dataset::Track> tracks;
    std::vector<std::string> ids;
    tracks.reserve(p.objects);
    for (uint32_t o = 0; o < p.objects; ++o) {
        ids.push_back("obj-" + std::to_string(o));
        Dataset::Track tr(p.instants);
        int64_t r = pick(p.rows), c = pick(p.cols);
        int64_t vr = int64_t(pick(3)) - 1, vc = int64_t(pick(3)) - 1;
        bool visible = true;
        for (uint32_t t = 0; t < p.instants; ++t) {
            if (t > 0) {
                // Sticky velocity: mostly keep course; redraws stay small
                // far more often than not, so the step histogram leans hard
                // toward the 3x3 neighbourhood.
                if (!chance(0.7)) {
                    if (chance(0.85)) {
                        vr = int64_t(pick(3)) - 1;
                        vc = int64_t(pick(3)) - 1;
                    } else {
                        vr = int64_t(pick(2 * p.max_step + 1)) - p.max_step;
                        vc = int64_t(pick(2 * p.max_step + 1)) - p.max_step;
                    }
                }
                r += vr;
                c += vc;
                if (r < 0 || r >= p.rows) {
                    vr = -vr;
                    r = std::clamp<int64_t>(r, 0, int64_t(p.rows) - 1);
                }
                if (c < 0 || c >= p.cols) {
                    vc = -vc;
                    c = std::clamp<int64_t>(c, 0, int64_t(p.cols) - 1);
                }
                visible = visible ? !chance(p.disappearance_rate) : chance(p.reappearance_rate);
            }
            if (visible) tr[t] = Dataset::Cell{uint32_t(r), uint32_t(c)};
        }
        tracks.push_back(std::move(tr));
    }
    return Dataset::from_tracks(p.rows, p.cols, p.instants, std::move(ids), tracks, p.cell_size,
                                p.bucket_seconds);
}

}  // namespace ctix::ingest
