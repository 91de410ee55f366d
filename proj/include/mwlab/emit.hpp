#pragma once
// File emission: the diagnostics CSV (fixed 11-column contract), binary state
// snapshots, a gnuplot-ready data/script pair, and the atomic write primitive
// all outputs go through. Every writer is deterministic -- identical inputs
// produce byte-identical files -- so reruns of a scenario can be compared
// with a plain byte diff.

#include <filesystem>
#include <string>
#include <string_view>

#include "mwlab/functionals.hpp"
#include "mwlab/solver.hpp"

namespace mwlab {

// Header + one row per recorded time, comma separated, shortest round-trip
// number formatting. Exactly the eleven contract columns:
//   t,mass,energy,kinetic,potential,morawetz_p1,morawetz_r3,morawetz_ang,
//   mass_identity_residual,energy_identity_residual,outer_boundary_mass
// An empty series yields the header line alone. ConfigError if the contract
// columns disagree in length.
std::string csv_text(const DiagnosticsSeries& series);

// Whitespace-separated table of the same columns for gnuplot, tagged with the
// scenario hash, plus a driver script that plots mass/energy from `dat_name`.
std::string dat_text(const DiagnosticsSeries& series, const std::string& hash);
std::string plt_text(const std::string& dat_name, const std::string& hash);

// Write to `path + ".tmp"` then rename over `path` (atomic on POSIX within a
// directory): readers never observe a partial file. IoError with the path on
// any failure.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

// Binary snapshot of a field state. Layout (little-endian, enforced at
// compile time): 32-byte header = magic "MWLAB1\0\0" (8) + u32 J + u32 K +
// f64 t + 8 reserved zero bytes, then one (re, im) f64 pair per node in state
// order. K = 0 marks a radial state of J+1 nodes, K > 0 a warped state of
// (J+1)*K nodes; ConfigError when the state size disagrees.
std::string snapshot_bytes(const FieldState& state, int J, int K);
void write_snapshot(const std::filesystem::path& path, const FieldState& state,
                    int J, int K);

struct Snapshot {
    int J = 0;
    int K = 0;
    FieldState state;
};
// IoError on missing file, bad magic, truncation, or payload size mismatch.
Snapshot read_snapshot(const std::filesystem::path& path);

} // namespace mwlab
