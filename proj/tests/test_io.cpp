#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unistd.h>

#include "ckdv/diagnostics.hpp"
#include "ckdv/error.hpp"
#include "ckdv/io.hpp"
#include "test_util.hpp"

using namespace ckdv;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("ckdv_io_" + std::to_string(::getpid()) + "_" + name)).string();
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double x : {0.0, -0.0, 1.0, 0.1, -1e-300, 1.7976931348623157e308, 4.9e-324, 2.2250738585072014e-308,
                     3.141592653589793}) {
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv round-trip is bit exact") {
    const std::string p = tmp_path("rt.csv");
    CsvTable t{{"a", "b", "c"}, {{0.1, -1e-310, std::nan("")}, {1e300, -0.0, INFINITY}}, {}};
    write_csv(p, t);
    const CsvTable r = read_csv(p);
    CHECK(r.header == t.header);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0][0] == 0.1);
    CHECK(r.rows[0][1] == -1e-310);
    CHECK(std::isnan(r.rows[0][2]));
    CHECK(r.rows[1][0] == 1e300);
    CHECK(std::signbit(r.rows[1][1]));
    CHECK(r.rows[1][2] == INFINITY);
    fs::remove(p);
}

TEST_CASE("csv edge cases") {
    const std::string p = tmp_path("edge.csv");
    write_csv(p, CsvTable{{"x", "y"}, {}, {}});
    CHECK(slurp(p) == "x,y\n");
    CHECK(read_csv(p).rows.empty());
    CHECK_THROWS_AS(write_csv(p, CsvTable{{"x", "y"}, {{1.0}}, {}}), Error);

    CsvTable lab{{"name", "v"}, {{1.0}, {2.0}}, {"L3.2a", "L3.10"}};
    write_csv(p, lab);
    CHECK(slurp(p) == "name,v\nL3.2a,1\nL3.10,2\n");
    const CsvTable r = read_csv(p, true);
    CHECK(r.labels == lab.labels);
    CHECK(r.rows == lab.rows);
    lab.labels[0] = "a,b";
    CHECK_THROWS_AS(write_csv(p, lab), Error);
    fs::remove(p);
}

TEST_CASE("one diagnostics row has nine fields") {
    const GridSpec g = make_grid(64, 20.0);
    const State s = make_state(testing::sample(g, [](double x) { return std::exp(-x * x); }),
                               testing::sample(g, [](double x) { return 0.5 * std::exp(-x * x); }), g);
    const CsvTable t = diagnostics_table({make_record(s, HirotaSatsuma{-0.5, 1.0}, 1.0)});
    CHECK(t.header.size() == 9);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].size() == 9);
}

TEST_CASE("snapshot round-trip and layout") {
    const std::string p = tmp_path("snap.bin");
    const GridSpec g = make_grid(16, 10.0);
    Snapshot s;
    s.period = 10.0;
    s.t = 0.25;
    s.u = testing::random_real(16, 1);
    s.v = testing::random_real(16, 2);
    write_snapshot(p, s);
    const std::string bytes = slurp(p);
    CHECK(bytes.size() == 4 + 4 + 4 + 8 + 8 + 2 * 16 * 8);
    CHECK(bytes.substr(0, 4) == "CKDV");
    const Snapshot r = read_snapshot(p);
    CHECK(r.period == s.period);
    CHECK(r.t == s.t);
    CHECK(r.u == s.u);
    CHECK(r.v == s.v);
    CHECK(r.to_state().u.grid.n == g.n);

    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(p, std::ios::binary) << bad;
    CHECK_THROWS_AS(read_snapshot(p), Error);
    bad = bytes;
    bad[4] = 9;
    std::ofstream(p, std::ios::binary) << bad;
    CHECK_THROWS_AS(read_snapshot(p), Error);
    std::ofstream(p, std::ios::binary) << bytes.substr(0, bytes.size() - 1);
    CHECK_THROWS_AS(read_snapshot(p), Error);
    fs::remove(p);
}
