#include "mwlab/emit.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot files are defined little-endian");

namespace mwlab {

namespace {

constexpr char kMagic[8] = {'M', 'W', 'L', 'A', 'B', '1', '\0', '\0'};
constexpr std::size_t kHeaderSize = 32;

const char* const kColumns[11] = {
    "t",
    "mass",
    "energy",
    "kinetic",
    "potential",
    "morawetz_p1",
    "morawetz_r3",
    "morawetz_ang",
    "mass_identity_residual",
    "energy_identity_residual",
    "outer_boundary_mass",
};

struct ColumnView {
    const std::vector<double>* cols[11];
    std::size_t rows;
};

ColumnView contract_columns(const DiagnosticsSeries& s) {
    ColumnView v{{&s.t, &s.mass, &s.energy, &s.kinetic, &s.potential,
                  &s.morawetz_p1, &s.morawetz_r3, &s.morawetz_ang,
                  &s.mass_identity_residual, &s.energy_identity_residual,
                  &s.outer_boundary_mass},
                 s.t.size()};
    for (const auto* col : v.cols)
        if (col->size() != v.rows)
            throw ConfigError(
                "diagnostics series columns disagree in length; the series "
                "was not produced by a single run");
    return v;
}

void append_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void append_f64(std::string& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

[[noreturn]] void bad_snapshot(const std::filesystem::path& path,
                               const std::string& why) {
    throw IoError("snapshot " + path.string() + ": " + why);
}

} // namespace

std::string csv_text(const DiagnosticsSeries& series) {
    const ColumnView v = contract_columns(series);
    std::string out;
    out.reserve(64 + v.rows * 128);
    for (int c = 0; c < 11; ++c) {
        if (c) out += ',';
        out += kColumns[c];
    }
    out += '\n';
    for (std::size_t row = 0; row < v.rows; ++row) {
        for (int c = 0; c < 11; ++c) {
            if (c) out += ',';
            out += format_double((*v.cols[c])[row]);
        }
        out += '\n';
    }
    return out;
}

std::string dat_text(const DiagnosticsSeries& series, const std::string& hash) {
    const ColumnView v = contract_columns(series);
    std::string out = "# scenario " + hash + "\n# columns:";
    for (const char* name : kColumns) {
        out += ' ';
        out += name;
    }
    out += '\n';
    for (std::size_t row = 0; row < v.rows; ++row) {
        for (int c = 0; c < 11; ++c) {
            if (c) out += ' ';
            out += format_double((*v.cols[c])[row]);
        }
        out += '\n';
    }
    return out;
}

std::string plt_text(const std::string& dat_name, const std::string& hash) {
    std::string out;
    out += "# scenario " + hash + "\n";
    out += "# gnuplot driver for the diagnostics series\n";
    out += "set key outside\n";
    out += "set xlabel 't'\n";
    out += "set logscale y\n";
    out += "plot '" + dat_name + "' using 1:2 with lines title 'mass', \\\n";
    out += "     '" + dat_name + "' using 1:3 with lines title 'energy', \\\n";
    out += "     '" + dat_name + "' using 1:6 with lines title 'morawetz_p1'\n";
    return out;
}

void atomic_write(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw IoError("cannot move " + tmp.string() + " into place: " +
                      ec.message());
    }
}

std::string snapshot_bytes(const FieldState& state, int J, int K) {
    if (J < 0 || K < 0)
        throw ConfigError("snapshot: J and K must be non-negative");
    const std::size_t nodes = static_cast<std::size_t>(J + 1) *
                              static_cast<std::size_t>(K > 0 ? K : 1);
    if (static_cast<std::size_t>(state.u.size()) != nodes)
        throw ConfigError("snapshot: state has " +
                          std::to_string(state.u.size()) + " nodes, grid (J=" +
                          std::to_string(J) + ", K=" + std::to_string(K) +
                          ") expects " + std::to_string(nodes));
    std::string out;
    out.reserve(kHeaderSize + nodes * 16);
    out.append(kMagic, 8);
    append_u32(out, static_cast<std::uint32_t>(J));
    append_u32(out, static_cast<std::uint32_t>(K));
    append_f64(out, state.t);
    out.append(8, '\0');
    for (std::size_t i = 0; i < nodes; ++i) {
        append_f64(out, state.u[static_cast<Eigen::Index>(i)].real());
        append_f64(out, state.u[static_cast<Eigen::Index>(i)].imag());
    }
    return out;
}

void write_snapshot(const std::filesystem::path& path, const FieldState& state,
                    int J, int K) {
    atomic_write(path, snapshot_bytes(state, J, K));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_snapshot(path, "cannot open file");
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (bytes.size() < kHeaderSize) bad_snapshot(path, "truncated header");
    if (std::memcmp(bytes.data(), kMagic, 8) != 0)
        bad_snapshot(path, "bad magic (not a snapshot file)");
    std::uint32_t j = 0, k = 0;
    std::memcpy(&j, bytes.data() + 8, 4);
    std::memcpy(&k, bytes.data() + 12, 4);
    Snapshot snap;
    snap.J = static_cast<int>(j);
    snap.K = static_cast<int>(k);
    std::memcpy(&snap.state.t, bytes.data() + 16, 8);
    const std::size_t nodes =
        static_cast<std::size_t>(j + 1) * static_cast<std::size_t>(k > 0 ? k : 1);
    if (bytes.size() != kHeaderSize + nodes * 16)
        bad_snapshot(path, "payload holds " +
                               std::to_string((bytes.size() - kHeaderSize) / 16) +
                               " nodes, header promises " +
                               std::to_string(nodes));
    snap.state.u = VecC(static_cast<Eigen::Index>(nodes));
    const char* cursor = bytes.data() + kHeaderSize;
    for (std::size_t i = 0; i < nodes; ++i) {
        double re = 0.0, im = 0.0;
        std::memcpy(&re, cursor, 8);
        std::memcpy(&im, cursor + 8, 8);
        cursor += 16;
        snap.state.u[static_cast<Eigen::Index>(i)] = std::complex<double>(re, im);
    }
    return snap;
}

} // namespace mwlab
