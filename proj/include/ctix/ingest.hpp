#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "ctix/dataset.hpp"

namespace ctix::ingest {

// One raw position report: projected planar coordinates (no geodetic
// handling here) at a nonnegative time in seconds.
struct RawReport {
    std::string id;
    double timestamp = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct ParseIssue {
    size_t line = 0;  // 1-based line number in the input
    std::string message;
};

struct CsvReports {
    std::vector<RawReport> reports;
    std::vector<ParseIssue> issues;
};

// Reads `id,timestamp,x,y` rows (header line optional). Unparseable lines
// are skipped and reported per line; everything else is kept.
CsvReports read_reports_csv(std::istream& in);
CsvReports read_reports_csv_file(const std::string& path);  // throws std::runtime_error

void write_reports_csv(std::ostream& out, const std::vector<RawReport>& reports);
// Cell-level dump `id,instant,row,col`, one row per present pair.
void write_cells_csv(std::ostream& out, const Dataset& ds);

struct NormalizeParams {
    double cell_size = 1.0;       // side of a grid cell, coordinate units
    double bucket_seconds = 1.0;  // length of one time instant
    double max_speed = std::numeric_limits<double>::infinity();  // units/second
};

// Raw reports -> regular grid, regular timeline:
//   1. per object, drop reports implying speed above max_speed against the
//      last accepted one, then put them back at positions linearly
//      interpolated between their surviving neighbours;
//   2. every instant takes the nearest report within half a bucket (ties go
//      to the earlier report), otherwise the object is absent;
//   3. positions become cells of cell_size x cell_size, shifted so the
//      smallest occupied row and column are zero;
//   4. silent stretches whose bounding reports fall in the same cell are
//      filled with that cell; stretches that moved stay absent.
// The timeline spans ceil(max surviving timestamp / bucket) + 1 instants,
// and external ids keep their first-appearance order.
Dataset normalize(std::vector<RawReport> reports, const NormalizeParams& p);

// The exact inverse view of a normalized dataset: one report per present
// pair, at the bucket center in time and the cell center in space. Feeding
// the result back through normalize reproduces the dataset.
std::vector<RawReport> dataset_to_reports(const Dataset& ds);

struct SyntheticParams {
    uint32_t objects = 50;
    // Long enough that even a 120-instant snapshot period leaves several
    // segments; size and decode-cost trends across periods need that regime.
    uint32_t instants = 1000;
    uint32_t rows = 128;
    uint32_t cols = 128;
    uint32_t max_step = 3;  // per-instant Chebyshev bound for the walks
    double disappearance_rate = 0.10;  // per-instant chance a visible object vanishes
    double reappearance_rate = 0.30;   // per-instant chance a hidden object returns
    uint64_t seed = 1;
    double cell_size = 25.0;
    double bucket_seconds = 60.0;
};

// Correlated random walks with sticky velocities, heavy-tailed toward small
// steps (most per-instant moves stay within the 3x3 neighbourhood), and
// disappearance spans during which the hidden walk keeps moving. Everyone is
// visible at the first instant, so a zero disappearance rate means full
// presence. Deterministic in the seed.
Dataset generate_synthetic(const SyntheticParams& p);

}  // namespace ctix::ingest
