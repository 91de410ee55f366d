#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "mwlab/emit.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/scenario.hpp"
#include "mwlab/toml.hpp"

using namespace mwlab;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case; removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("mwlab-cli-io-" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Returns the ValidationError message for a scenario text, or "" if it parses.
std::string validation_message(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

std::string parse_message(const std::string& text) {
    try {
        toml::parse(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

const char* kCsvHeader =
    "t,mass,energy,kinetic,potential,morawetz_p1,morawetz_r3,morawetz_ang,"
    "mass_identity_residual,energy_identity_residual,outer_boundary_mass\n";

DiagnosticsSeries one_row_series() {
    DiagnosticsSeries s;
    s.t.push_back(0.0);
    s.mass.push_back(1.0);
    s.energy.push_back(0.5);
    s.kinetic.push_back(0.25);
    s.potential.push_back(0.125);
    s.morawetz_p1.push_back(0.0);
    s.morawetz_r3.push_back(0.0);
    s.morawetz_ang.push_back(0.0);
    s.mass_identity_residual.push_back(1e-10);
    s.energy_identity_residual.push_back(0.0);
    s.outer_boundary_mass.push_back(0.001);
    return s;
}

} // namespace

TEST_CASE("toml: scalars, sections, comments, and source lines") {
    const toml::Document doc = toml::parse("# leading comment\n"
                                           "a = 1\n"
                                           "b = \"text\"  # trailing\n"
                                           "flag = true\n"
                                           "neg = -2.5e-1\n"
                                           "\r\n"
                                           "[s]\r\n"
                                           "c = false\n"
                                           "big = 12345\n"
                                           "plus = +7\n");
    CHECK(doc.root.size() == 4);
    CHECK(doc.root.at("a").kind == toml::Value::Kind::integer);
    CHECK(doc.root.at("a").i == 1);
    CHECK(doc.root.at("a").line == 2);
    CHECK(doc.root.at("b").kind == toml::Value::Kind::string);
    CHECK(doc.root.at("b").str == "text");
    CHECK(doc.root.at("flag").kind == toml::Value::Kind::boolean);
    CHECK(doc.root.at("flag").b);
    CHECK(doc.root.at("neg").kind == toml::Value::Kind::floating);
    CHECK(doc.root.at("neg").f == doctest::Approx(-0.25).epsilon(1e-15));
    REQUIRE(doc.sections.count("s") == 1);
    const toml::Table& s = doc.sections.at("s");
    CHECK_FALSE(s.at("c").b);
    CHECK(s.at("big").i == 12345);
    CHECK(s.at("plus").i == 7);
    CHECK(s.at("c").line == 8);
}

TEST_CASE("toml: string escapes") {
    const toml::Document doc =
        toml::parse("name = \"a\\\"b\\\\c\\nd\\te\"\n");
    CHECK(doc.root.at("name").str == "a\"b\\c\nd\te");
    CHECK_THROWS_AS(toml::parse("x = \"bad \\q escape\"\n"), ParseError);
}

TEST_CASE("toml: malformed input names the line") {
    CHECK(contains(parse_message("x 1\n"), "line 1"));
    CHECK(contains(parse_message("a = 1\na = 2\n"), "line 2"));
    CHECK(contains(parse_message("a = 1\na = 2\n"), "duplicate key"));
    CHECK(contains(parse_message("[s]\n[s]\n"), "duplicate section"));
    CHECK(contains(parse_message("a = \"unterminated\n"), "line 1"));
    CHECK(contains(parse_message("a = 1.2.3\n"), "line 1"));
    CHECK(contains(parse_message("a = 1 junk\n"), "line 1"));
    CHECK(contains(parse_message("[a b]\n"), "line 1"));
    CHECK(contains(parse_message("= 1\n"), "line 1"));
    CHECK(contains(parse_message("a = tru\n"), "line 1"));
    CHECK(contains(parse_message("a = True\n"), "line 1"));
    CHECK(contains(parse_message("a =\n"), "line 1"));
    // origin tag is prepended when supplied
    try {
        toml::parse("oops\n", "run.toml");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(contains(e.what(), "run.toml"));
        CHECK(contains(e.what(), "line 1"));
    }
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("scenario: minimal file fills the documented defaults") {
    const Scenario sc = parse_scenario("schema = 1\n"
                                       "[grid]\n"
                                       "r_in = 1.0\n"
                                       "r_out = 8.0\n"
                                       "j = 80\n");
    CHECK(sc.schema == 1);
    CHECK(sc.name == "scenario");
    CHECK(sc.seed == 0);
    CHECK(sc.metric.family == MetricSpec::Family::flat);
    CHECK(sc.metric.n == 3);
    CHECK(sc.metric.delta == 1.0);
    CHECK(sc.metric.alpha == 0.0);
    CHECK(sc.grid.r_in == 1.0);
    CHECK(sc.grid.r_out == 8.0);
    CHECK(sc.grid.j == 80);
    CHECK(sc.grid.k == 0);
    CHECK(sc.time.dt == 1e-3);
    CHECK(sc.time.t_final == 1.0);
    CHECK(sc.time.p == 3.0);
    CHECK(sc.time.nonlinear);
    CHECK(sc.time.tolerance == 1e-12);
    CHECK(sc.time.max_iterations == 50);
    CHECK(sc.time.diag_stride == 1);
    CHECK(sc.time.snapshot_stride == 0);
    CHECK_FALSE(sc.damping.active());
    CHECK(sc.initial.kind == InitialData::Kind::gaussian);
    CHECK(sc.initial.amplitude == 1.0);
    CHECK(sc.initial.center == 3.0);
    CHECK(sc.initial.width == 0.5);
    CHECK(sc.initial.k == 0.0);
    CHECK(sc.initial.boundary_margin == -1.0);
    CHECK(sc.outputs.csv);
    CHECK_FALSE(sc.outputs.snapshots);
    CHECK_FALSE(sc.outputs.plt);
}

TEST_CASE("scenario: fail-closed parsing rejects unknown keys") {
    const std::string dx = validation_message("[grid]\ndx = 0.1\n");
    CHECK(contains(dx, "[grid].dx"));
    CHECK(contains(dx, "unknown key"));
    CHECK(contains(validation_message("[gird]\nj = 10\n"), "[gird]"));
    CHECK(contains(validation_message("[gird]\nj = 10\n"), "unknown section"));
    CHECK(contains(validation_message("foo = 1\n"), "foo"));
    CHECK(contains(validation_message("foo = 1\n"), "unknown key"));
}

TEST_CASE("scenario: type mismatches name the key and the expected type") {
    CHECK(contains(validation_message("[grid]\nj = 1.5\n"), "[grid].j"));
    CHECK(contains(validation_message("[grid]\nj = 1.5\n"), "integer"));
    CHECK(contains(validation_message("[time]\nnonlinear = 1\n"),
                   "[time].nonlinear"));
    CHECK(contains(validation_message("[time]\nnonlinear = 1\n"), "boolean"));
    CHECK(contains(validation_message("[metric]\nfamily = 2\n"),
                   "[metric].family"));
    CHECK(contains(validation_message("[metric]\nfamily = 2\n"), "string"));
    CHECK(contains(validation_message("[grid]\nr_in = true\n"), "number"));
    CHECK(contains(validation_message("name = true\n"), "name"));
}

TEST_CASE("scenario: semantic validation names key and constraint") {
    // subcritical exponent: the n = 3 energy-critical threshold is 5
    const std::string p6 = validation_message("[time]\np = 6.0\n");
    CHECK(contains(p6, "[time].p"));
    CHECK(contains(p6, "p must be < (n+2)/(n-2) = 5"));
    CHECK(contains(validation_message("[time]\np = 0.5\n"), "exceed 1"));
    // n = 4 threshold is 3
    const std::string p4 = validation_message("[metric]\nn = 4\n"
                                              "[time]\np = 3.0\n");
    CHECK(contains(p4, "p must be < (n+2)/(n-2) = 3"));
    // n = 2 has no upper threshold
    CHECK(validation_message("[metric]\nn = 2\n[time]\np = 9.0\n").empty());

    CHECK(contains(validation_message("schema = 2\n"), "schema"));
    CHECK(contains(validation_message("seed = -4\n"), "seed"));
    CHECK(contains(validation_message("[grid]\nr_in = 2.0\nr_out = 2.0\n"),
                   "[grid].r_out"));
    CHECK(contains(validation_message("[grid]\nr_in = -1.0\n"), "[grid].r_in"));
    CHECK(contains(validation_message("[grid]\nj = 1\n"), "[grid].j"));
    CHECK(contains(validation_message("[grid]\nk = -3\n"), "[grid].k"));
    CHECK(contains(validation_message("[time]\ndt = 0.0\n"), "[time].dt"));
    CHECK(contains(validation_message("[time]\nt_final = -1.0\n"),
                   "[time].t_final"));
    CHECK(contains(validation_message("[time]\ndiag_stride = 0\n"),
                   "[time].diag_stride"));
    CHECK(contains(validation_message("[initial]\nwidth = 0.0\n"),
                   "[initial].width"));
    CHECK(contains(validation_message("[initial]\ncenter = 40.0\n"),
                   "[initial].center"));
    CHECK(contains(validation_message("[initial]\nkind = \"blob\"\n"),
                   "[initial].kind"));
    CHECK(contains(validation_message("[initial]\nkind = \"ring\"\n"),
                   "angular axis"));
    CHECK(contains(validation_message("[metric]\nfamily = \"spherical\"\n"),
                   "spherical"));
    CHECK(contains(
        validation_message("[metric]\nfamily = \"trapped_sphere\"\nr2 = 0.0\n"),
        "[metric].r2"));
    CHECK(contains(
        validation_message("[metric]\nfamily = \"example21\"\nm = 2.0\nd1 = 1.5\n"
                           "[grid]\nr_in = 1.0\n"),
        "[grid].r_in"));
    CHECK(contains(validation_message("[metric]\ngamma = \"modulated\"\n"),
                   "angular axis"));
    CHECK(contains(
        validation_message("[grid]\nk = 16\n[metric]\ngamma = \"modulated\"\n"
                           "gamma_eps = 1.0\n"),
        "[metric].gamma_eps"));

    // the damping ordering invariant: r_out > R0 > r_in
    const std::string r0 = validation_message("[damping]\na0 = 1.0\nR0 = 20.0\n"
                                              "eps0 = 2.0\nramp = 1.0\n");
    CHECK(contains(r0, "[damping].R0"));
    // profile-internal geometry errors are wrapped with the section path
    CHECK(contains(validation_message("[damping]\na0 = 1.0\nR0 = 6.0\n"
                                      "eps0 = 5.5\nramp = 1.0\n"),
                   "[damping]"));
}

TEST_CASE("scenario: canonical serialization round-trips and is a fixed point") {
    const Scenario a = parse_scenario("schema = 1\n"
                                      "name = \"collar-demo\"\n"
                                      "seed = 42\n"
                                      "[metric]\n"
                                      "family = \"example21\"\n"
                                      "n = 3\n"
                                      "m = 2.0\n"
                                      "d1 = 1.0\n"
                                      "alpha = 0.5\n"
                                      "delta = 0.8\n"
                                      "[damping]\n"
                                      "a0 = 1.0\n"
                                      "R0 = 10.0\n"
                                      "eps0 = 3.0\n"
                                      "ramp = 1.5\n"
                                      "d1 = 1.0\n"
                                      "eps1 = 1.0\n"
                                      "collar_ramp = 0.5\n"
                                      "[grid]\n"
                                      "r_in = 1.0\n"
                                      "r_out = 14.0\n"
                                      "j = 260\n"
                                      "[time]\n"
                                      "dt = 0.002\n"
                                      "t_final = 0.5\n"
                                      "p = 3.0\n"
                                      "nonlinear = true\n"
                                      "snapshot_stride = 50\n"
                                      "[initial]\n"
                                      "kind = \"gaussian\"\n"
                                      "amplitude = 2.0\n"
                                      "center = 5.0\n"
                                      "width = 0.75\n"
                                      "k = 1.0\n"
                                      "[outputs]\n"
                                      "csv = true\n"
                                      "snapshots = true\n"
                                      "plt = true\n");
    const std::string text = to_toml(a);
    const Scenario b = parse_scenario(text);
    CHECK(a == b);
    CHECK(to_toml(b) == text);
    CHECK(content_hash(a) == content_hash(b));

    // warped variant with a modulated angular profile and a ring mode
    const Scenario w = parse_scenario("name = \"warped\"\n"
                                      "[grid]\n"
                                      "r_in = 1.0\nr_out = 8.0\nj = 96\nk = 32\n"
                                      "[metric]\n"
                                      "gamma = \"modulated\"\n"
                                      "gamma_s = 1.0\ngamma_q = 1.0\n"
                                      "gamma_eps = 0.2\ngamma_m = 3\n"
                                      "[initial]\n"
                                      "kind = \"ring\"\nm_theta = 3\n");
    const Scenario w2 = parse_scenario(to_toml(w));
    CHECK(w == w2);
    CHECK(w2.initial.kind == InitialData::Kind::ring);
    CHECK(w2.metric.gamma == MetricSpec::Gamma::modulated);
}

TEST_CASE("scenario: content hash ignores formatting, tracks content") {
    const Scenario a = parse_scenario("seed = 7\n[time]\ndt = 0.002\n");
    const Scenario b = parse_scenario("# same physics, different layout\n"
                                      "\n"
                                      "seed = 7\n"
                                      "[time]\n"
                                      "\n"
                                      "dt = 2e-3   # = 0.002\n");
    const Scenario c = parse_scenario("seed = 8\n[time]\ndt = 0.002\n");
    CHECK(content_hash(a) == content_hash(b));
    CHECK(content_hash(a) != content_hash(c));
    REQUIRE(content_hash(a).size() == 16);
    for (char ch : content_hash(a))
        CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));
}

TEST_CASE("scenario: builders derive the power-law reduction per family") {
    const Scenario flat = parse_scenario("[grid]\nr_in = 1.0\nr_out = 8.0\nj = 80\n");
    const RadialGrid g = build_radial_grid(flat);
    CHECK(g.n == 3);
    CHECK(g.c0 == 1.0);
    CHECK(g.d == 0.0);
    CHECK(g.J == 80);
    CHECK(g.r_in == 1.0);
    CHECK(g.r_out == 8.0);
    CHECK(build_metric(flat)->family() == "flat");
    CHECK(build_operator(flat)->size() == 81);

    const Scenario e21 = parse_scenario("[metric]\nfamily = \"example21\"\n"
                                        "m = 2.0\nd1 = 1.0\nalpha = 0.25\n"
                                        "[grid]\nr_in = 1.0\nr_out = 8.0\nj = 40\n");
    const RadialMetricParams params = radial_params(e21);
    CHECK(params.c0 == 1.0);
    CHECK(params.d == 4.0); // m (n - 1)
    CHECK(params.alpha == 0.25);
    CHECK(build_metric(e21)->family() == "example21");

    const Scenario pt = parse_scenario("[metric]\nfamily = \"power_tangent\"\n"
                                       "m = 1.5\n"
                                       "[grid]\nr_in = 1.0\nr_out = 8.0\nj = 40\n");
    CHECK(radial_params(pt).d == 3.0);

    const Scenario tr = parse_scenario("[metric]\nfamily = \"trapped_sphere\"\n"
                                       "r2 = 2.0\n"
                                       "[grid]\nr_in = 1.0\nr_out = 4.0\nj = 40\n");
    CHECK(build_metric(tr)->family() == "trapped_sphere");
    CHECK_THROWS_AS((void)build_radial_grid(tr), ConfigError);
    CHECK_THROWS_AS((void)build_operator(tr), ConfigError);

    const Scenario warped = parse_scenario("[grid]\nr_in = 1.0\nr_out = 8.0\n"
                                           "j = 24\nk = 16\n");
    CHECK(build_operator(warped)->size() == 25 * 16);
    CHECK_THROWS_AS((void)build_warped_grid(flat), ConfigError);

    const Scenario damped = parse_scenario("[damping]\na0 = 1.0\nR0 = 6.0\n"
                                           "eps0 = 2.0\nramp = 1.0\n"
                                           "[grid]\nr_in = 1.0\nr_out = 16.0\n"
                                           "j = 100\n[time]\ndt = 0.004\n"
                                           "t_final = 0.1\nnonlinear = false\n"
                                           "max_iterations = 9\n");
    const SolverConfig cfg = solver_config(damped);
    CHECK(cfg.dt == 0.004);
    CHECK(cfg.t_final == 0.1);
    CHECK_FALSE(cfg.nonlinear);
    CHECK(cfg.fp_max_iterations == 9);
    CHECK(cfg.fp_tolerance == 1e-12);
    const Region shell = default_geodesic_region(damped);
    CHECK(shell.kind == Region::Kind::shell);
    CHECK(shell.r_lo == 1.0);
    CHECK(shell.r_hi == 6.0);
    const Region free_shell = default_geodesic_region(flat);
    CHECK(free_shell.r_hi == 8.0);
}

TEST_CASE("csv: exact header, exact shortest-round-trip rows") {
    DiagnosticsSeries empty;
    CHECK(csv_text(empty) == kCsvHeader);

    const DiagnosticsSeries s = one_row_series();
    CHECK(csv_text(s) ==
          std::string(kCsvHeader) + "0,1,0.5,0.25,0.125,0,0,0,1e-10,0,0.001\n");

    DiagnosticsSeries ragged = one_row_series();
    ragged.energy.clear();
    CHECK_THROWS_AS((void)csv_text(ragged), ConfigError);
}

TEST_CASE("plt pair: data table and script reference each other") {
    const DiagnosticsSeries s = one_row_series();
    const std::string hash = "deadbeef01234567";
    const std::string dat = dat_text(s, hash);
    CHECK(contains(dat, "# scenario deadbeef01234567\n"));
    CHECK(contains(dat, "# columns: t mass energy kinetic potential"));
    CHECK(contains(dat, "\n0 1 0.5 0.25 0.125 0 0 0 1e-10 0 0.001\n"));
    const std::string plt = plt_text("series.dat", hash);
    CHECK(contains(plt, "series.dat"));
    CHECK(contains(plt, hash));
    CHECK(contains(plt, "plot"));
}

TEST_CASE("snapshot: exact byte layout and round-trip") {
    FieldState st;
    st.t = 0.25;
    st.u = VecC(4);
    st.u << std::complex<double>(1.0, 2.0), std::complex<double>(3.0, 4.0),
        std::complex<double>(5.0, 6.0), std::complex<double>(7.0, 8.0);

    const std::string bytes = snapshot_bytes(st, 3, 0);
    REQUIRE(bytes.size() == 32 + 4 * 16);
    CHECK(bytes.compare(0, 8, std::string("MWLAB1\0\0", 8)) == 0);
    std::uint32_t j = 0, k = 0;
    std::memcpy(&j, bytes.data() + 8, 4);
    std::memcpy(&k, bytes.data() + 12, 4);
    CHECK(j == 3);
    CHECK(k == 0);
    double t = 0.0;
    std::memcpy(&t, bytes.data() + 16, 8);
    CHECK(t == 0.25);
    for (int i = 24; i < 32; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
    double first_re = 0.0, first_im = 0.0, last_im = 0.0;
    std::memcpy(&first_re, bytes.data() + 32, 8);
    std::memcpy(&first_im, bytes.data() + 40, 8);
    std::memcpy(&last_im, bytes.data() + 32 + 7 * 8, 8);
    CHECK(first_re == 1.0);
    CHECK(first_im == 2.0);
    CHECK(last_im == 8.0);

    TempDir tmp("snapshot");
    const fs::path file = tmp.path / "state.bin";
    write_snapshot(file, st, 3, 0);
    const Snapshot back = read_snapshot(file);
    CHECK(back.J == 3);
    CHECK(back.K == 0);
    CHECK(back.state.t == 0.25);
    REQUIRE(back.state.u.size() == 4);
    CHECK(back.state.u[3] == std::complex<double>(7.0, 8.0));

    // a warped state is (J+1)*K nodes
    FieldState wst;
    wst.t = 1.0;
    wst.u = VecC::Zero(3 * 4);
    CHECK(snapshot_bytes(wst, 2, 4).size() == 32 + 12 * 16);
    CHECK_THROWS_AS((void)snapshot_bytes(wst, 5, 4), ConfigError);

    // corruption: bad magic, truncation, payload size mismatch
    std::string bad = bytes;
    bad[0] = 'X';
    atomic_write(file, bad);
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);
    atomic_write(file, bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);
    atomic_write(file, bytes + std::string(16, '\0'));
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);
    CHECK_THROWS_AS((void)read_snapshot(tmp.path / "absent.bin"), IoError);
}

TEST_CASE("atomic_write: overwrites in place and leaves no temp files") {
    TempDir tmp("atomic");
    const fs::path file = tmp.path / "x.txt";
    atomic_write(file, "hello");
    CHECK(slurp(file) == "hello");
    atomic_write(file, "world");
    CHECK(slurp(file) == "world");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
    try {
        atomic_write(tmp.path / "missing" / "y.txt", "z");
        CHECK(false);
    } catch (const IoError& e) {
        CHECK(contains(e.what(), "y.txt"));
    }
}

TEST_CASE("load_scenario: reads files, fails closed on absent paths") {
    TempDir tmp("load");
    const Scenario sc = parse_scenario("name = \"diskful\"\nseed = 3\n"
                                       "[grid]\nr_in = 1.0\nr_out = 9.0\nj = 64\n");
    const fs::path file = tmp.path / "run.toml";
    atomic_write(file, to_toml(sc));
    const Scenario back = load_scenario(file.string());
    CHECK(back == sc);
    CHECK(content_hash(back) == content_hash(sc));
    try {
        (void)load_scenario((tmp.path / "nope.toml").string());
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(contains(e.what(), "nope.toml"));
    }
}
