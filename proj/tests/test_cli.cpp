#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("CTIX_CLI")) return env;
    return "./ctix";  // manual runs from the build directory
}

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    Run r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

// Fixture: two objects on a 10-unit grid with 60-second buckets. A walks one
// cell per instant; B reports the same spot at t0 and t2, so t1 fills in.
const char* kFixtureCsv =
    "id,timestamp,x,y\n"
    "A,0,5,5\n"
    "A,60,15,5\n"
    "A,120,15,15\n"
    "B,0,35,45\n"
    "B,120,35,45\n";

}  // namespace

TEST_CASE("cli: build from csv answers hand-checked queries") {
    fs::path dir = fresh_dir("ctix-cli-fixture");
    spit(dir / "in.csv", kFixtureCsv);
    std::string idx = (dir / "idx.ctix").string();

    Run built = run_cli("build -i " + (dir / "in.csv").string() + " -o " + idx +
                        " --period 2 --cell-size 10 --bucket-seconds 60");
    CHECK(built.code == 0);
    CHECK(built.out.find("total") != std::string::npos);
    CHECK(fs::exists(idx));

    SUBCASE("object query at a snapshot instant returns the known cell") {
        Run r = run_cli("query -i " + idx + " --kind obj --id A --t 0");
        CHECK(r.code == 0);
        CHECK(r.out == "A,0,0\n");
    }

    SUBCASE("a filled silent instant answers like any other") {
        Run r = run_cli("query -i " + idx + " --kind obj --id B --t 1");
        CHECK(r.code == 0);
        CHECK(r.out == "B,4,3\n");
    }

    SUBCASE("trajectories list one line per present instant") {
        Run r = run_cli("query -i " + idx + " --kind traj --id A --t1 0 --t2 2");
        CHECK(r.code == 0);
        CHECK(r.out == "A,0,0,0\nA,0,1,1\nA,1,1,2\n");
    }

    SUBCASE("an empty slice is exit 0 with no lines") {
        Run r = run_cli("query -i " + idx + " --kind slice --rect 2,3,0,1 --t 0");
        CHECK(r.code == 0);
        CHECK(r.out.empty());
    }

    SUBCASE("interval equals the union of per-instant slices") {
        std::map<std::string, std::string> first_hit;  // id -> "id,row,col,t"
        for (uint32_t t = 0; t <= 2; ++t) {
            Run s = run_cli("query -i " + idx + " --kind slice --rect 0,4,0,3 --t " +
                            std::to_string(t));
            REQUIRE(s.code == 0);
            for (const auto& line : lines_of(s.out)) {
                std::string id = line.substr(0, line.find(','));
                if (!first_hit.count(id)) first_hit[id] = line + "," + std::to_string(t);
            }
        }
        Run iv = run_cli("query -i " + idx + " --kind interval --rect 0,4,0,3 --t1 0 --t2 2");
        REQUIRE(iv.code == 0);
        auto got = lines_of(iv.out);
        REQUIRE(got.size() == first_hit.size());
        size_t i = 0;
        for (const auto& [id, line] : first_hit) CHECK(got[i++] == line);
    }

    SUBCASE("a snapshot-per-instant build round-trips through query") {
        std::string idx1 = (dir / "p1.ctix").string();
        Run b1 = run_cli("build -i " + (dir / "in.csv").string() + " -o " + idx1 +
                         " --period 1 --cell-size 10 --bucket-seconds 60");
        CHECK(b1.code == 0);
        Run r = run_cli("query -i " + idx1 + " --kind obj --id A --t 2");
        CHECK(r.code == 0);
        CHECK(r.out == "A,1,1\n");
    }
}

TEST_CASE("cli: generated data is deterministic and feeds build") {
    fs::path dir = fresh_dir("ctix-cli-gen");
    std::string common = " --objects 15 --instants 30 --rows 32 --cols 32 --seed 11";
    Run g1 = run_cli("gen -o " + (dir / "a.csv").string() + common);
    Run g2 = run_cli("gen -o " + (dir / "b.csv").string() + common);
    CHECK(g1.code == 0);
    CHECK(g2.code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    Run g3 = run_cli("gen -o " + (dir / "c.csv").string() + common +
                     " --binary " + (dir / "c.ds").string());
    CHECK(g3.code == 0);
    REQUIRE(fs::exists(dir / "c.ds"));

    // Both input forms build working indexes.
    Run bc = run_cli("build -i " + (dir / "c.csv").string() + " -o " + (dir / "csv.ctix").string() +
                     " --period 6 --cell-size 25 --bucket-seconds 60");
    CHECK(bc.code == 0);
    Run bd = run_cli("build -i " + (dir / "c.ds").string() + " -o " + (dir / "ds.ctix").string() +
                     " --period 6");
    CHECK(bd.code == 0);
    Run q = run_cli("query -i " + (dir / "ds.ctix").string() + " --kind obj --id obj-0 --t 0");
    CHECK(q.code == 0);
    CHECK(q.out.rfind("obj-0,", 0) == 0);

    Run st = run_cli("stats -i " + (dir / "ds.ctix").string() + " --csv");
    CHECK(st.code == 0);
    CHECK(st.out.find("total_bytes,") != std::string::npos);
    CHECK(st.out.find("ratio_percent,") != std::string::npos);
}

TEST_CASE("cli: exit codes separate usage, corruption and success") {
    fs::path dir = fresh_dir("ctix-cli-codes");
    spit(dir / "in.csv", kFixtureCsv);
    std::string idx = (dir / "idx.ctix").string();
    REQUIRE(run_cli("build -i " + (dir / "in.csv").string() + " -o " + idx +
                    " --period 2 --cell-size 10 --bucket-seconds 60")
                .code == 0);

    SUBCASE("missing input file: exit 2, no partial output") {
        Run r = run_cli("build -i " + (dir / "absent.csv").string() + " -o " +
                        (dir / "never.ctix").string());
        CHECK(r.code == 2);
        CHECK_FALSE(fs::exists(dir / "never.ctix"));
        CHECK(run_cli("stats -i " + (dir / "nothing.ctix").string()).code == 2);
    }

    SUBCASE("bad arguments: exit 2") {
        CHECK(run_cli("query -i " + idx + " --kind obj --id NOBODY --t 0").code == 2);
        CHECK(run_cli("query -i " + idx + " --kind obj --id A --t 99").code == 2);
        CHECK(run_cli("query -i " + idx + " --kind sideways --rect 0,1,0,1 --t 0").code == 2);
        CHECK(run_cli("query -i " + idx + " --kind slice --rect nonsense --t 0").code == 2);
        CHECK(run_cli("query -i " + idx + " --kind slice --rect 4,2,0,1 --t 0").code == 2);
        CHECK(run_cli("--definitely-not-a-flag").code == 2);
        CHECK(run_cli("build -i only-input.csv").code == 2);  // missing required -o
    }

    SUBCASE("help is success") {
        CHECK(run_cli("--help").code == 0);
        CHECK(run_cli("query --help").code == 0);
    }

    SUBCASE("corrupt index: exit 3") {
        std::string good = slurp(idx);
        spit(dir / "cut.ctix", good.substr(0, good.size() / 2));
        CHECK(run_cli("query -i " + (dir / "cut.ctix").string() + " --kind obj --id A --t 0")
                  .code == 3);
        std::string flipped = good;
        flipped[0] ^= 0x40;
        spit(dir / "flip.ctix", flipped);
        CHECK(run_cli("stats -i " + (dir / "flip.ctix").string()).code == 3);
    }
}

TEST_CASE("cli: bench sweeps periods deterministically") {
    std::string args =
        "bench --periods 4,8 --objects 20 --instants 40 --grid 32 --seed 3 "
        "--obj-queries 25 --slice-queries 10 --no-timing";
    Run a = run_cli(args);
    Run b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    auto rows = lines_of(a.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "P,size_bytes,ratio,avg_obj_us,avg_slice_us,avg_decoded_symbols");
    // size strictly decreases across the sweep; timings are zeroed
    auto field = [](const std::string& line, int idx) {
        std::istringstream in(line);
        std::string f;
        for (int i = 0; i <= idx; ++i) std::getline(in, f, ',');
        return f;
    };
    CHECK(std::stoull(field(rows[1], 1)) > std::stoull(field(rows[2], 1)));
    CHECK(field(rows[1], 3) == "0.00");
    CHECK(std::stod(field(rows[2], 5)) > std::stod(field(rows[1], 5)));

    // with timing on, the command still succeeds and emits 2 data rows
    Run timed = run_cli(
        "bench --periods 4,8 --objects 10 --instants 20 --grid 32 --seed 3 "
        "--obj-queries 5 --slice-queries 2");
    CHECK(timed.code == 0);
    CHECK(lines_of(timed.out).size() == 3);
}
