#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ckdv/diagnostics.hpp"
#include "ckdv/systems.hpp"

namespace ckdv {

/// Shortest round-trip text for a double (17 significant digits); NaN and
/// infinities print as nan, inf, -inf.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    /// Optional text first column: when non-empty there is one label per row
    /// and header[0] names the label column.
    std::vector<std::string> labels;
};

/// Comma-separated, header first, "\n" line ends. Every row must fill the
/// header (counting the label column). Labels may not contain commas,
/// quotes or line breaks.
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path, bool labelled = false);

inline const std::vector<std::string>& diagnostics_header() {
    static const std::vector<std::string> h{"t", "V", "F", "phi1", "phi2", "phi3", "phi4", "Hs_u", "Hs_v"};
    return h;
}
CsvTable diagnostics_table(const std::vector<DiagnosticRecord>& recs);

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Physical samples of both components on the grid x_j = -L/2 + j L/n.
struct Snapshot {
    double period = 0.0;
    double t = 0.0;
    RVec u, v;

    static Snapshot from_state(const State& s);
    State to_state() const;
};

/// Binary layout: "CKDV", u32 version, u32 n, f64 period, f64 t, then n
/// f64 samples of u and n of v, all little-endian.
void write_snapshot(const std::string& path, const Snapshot& s);
/// Checks magic, version and exact length; throws Error otherwise.
Snapshot read_snapshot(const std::string& path);

}  // namespace ckdv
