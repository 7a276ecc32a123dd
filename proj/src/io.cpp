#include "ckdv/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ckdv/error.hpp"

namespace ckdv {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    buf.append(bytes, sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t& pos) {
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for " + path);
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error("bad number in CSV: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
    out += '\n';
    const bool labelled = !table.labels.empty();
    if (labelled && table.labels.size() != table.rows.size())
        throw InvalidArgument("CSV needs one label per row");
    const std::size_t width = table.header.size() - (labelled ? 1 : 0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != width) throw InvalidArgument("CSV row width does not match header");
        if (labelled) {
            if (table.labels[r].find_first_of(",\"\r\n") != std::string::npos)
                throw InvalidArgument("CSV label needs quoting: " + table.labels[r]);
            out += table.labels[r];
        }
        for (std::size_t i = 0; i < row.size(); ++i) out += (i || labelled ? "," : "") + format_double(row[i]);
        out += '\n';
    }
    dump(path, out);
}

CsvTable read_csv(const std::string& path, bool labelled) {
    std::istringstream in(slurp(path));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV " + path);
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) throw Error("ragged CSV row in " + path);
        std::vector<double> row;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (labelled && i == 0) t.labels.push_back(cells[0]);
            else row.push_back(parse_double(cells[i]));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable diagnostics_table(const std::vector<DiagnosticRecord>& recs) {
    CsvTable t{diagnostics_header(), {}, {}};
    for (const auto& r : recs) t.rows.push_back({r.t, r.V, r.F, r.phi1, r.phi2, r.phi3, r.phi4, r.sobolev_u, r.sobolev_v});
    return t;
}

Snapshot Snapshot::from_state(const State& s) {
    if (!(s.v.grid == s.u.grid)) throw InvalidArgument("snapshot components live on different grids");
    return Snapshot{s.u.grid.period, s.t, inverse(s.u), inverse(s.v)};
}

State Snapshot::to_state() const { return make_state(u, v, make_grid(static_cast<int>(u.size()), period), t); }

void write_snapshot(const std::string& path, const Snapshot& s) {
    if (s.u.size() != s.v.size()) throw InvalidArgument("snapshot components differ in length");
    const auto n = static_cast<std::uint32_t>(s.u.size());
    std::string buf("CKDV");
    put<std::uint32_t>(buf, kSnapshotVersion);
    put<std::uint32_t>(buf, n);
    put<double>(buf, s.period);
    put<double>(buf, s.t);
    for (std::uint32_t j = 0; j < n; ++j) put<double>(buf, s.u[j]);
    for (std::uint32_t j = 0; j < n; ++j) put<double>(buf, s.v[j]);
    dump(path, buf);
}

Snapshot read_snapshot(const std::string& path) {
    const std::string buf = slurp(path);
    constexpr std::size_t header = 4 + 4 + 4 + 8 + 8;
    if (buf.size() < header || buf.compare(0, 4, "CKDV") != 0) throw Error(path + ": not a snapshot file");
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(buf, pos);
    if (version != kSnapshotVersion) throw Error(path + ": unsupported snapshot version " + std::to_string(version));
    const auto n = get<std::uint32_t>(buf, pos);
    Snapshot s;
    s.period = get<double>(buf, pos);
    s.t = get<double>(buf, pos);
    if (buf.size() != header + 16ull * n) throw Error(path + ": snapshot length does not match header");
    s.u.resize(n);
    s.v.resize(n);
    for (std::uint32_t j = 0; j < n; ++j) s.u[j] = get<double>(buf, pos);
    for (std::uint32_t j = 0; j < n; ++j) s.v[j] = get<double>(buf, pos);
    return s;
}

}  // namespace ckdv
