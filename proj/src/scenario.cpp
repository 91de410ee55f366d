#include "mwlab/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"
#include "mwlab/toml.hpp"

namespace mwlab {

namespace {

using toml::Table;
using toml::Value;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

double as_number(const Value& v, const std::string& path) {
    if (v.kind == Value::Kind::floating) return v.f;
    if (v.kind == Value::Kind::integer) return static_cast<double>(v.i);
    invalid(path, "expects a number");
}

std::int64_t as_integer(const Value& v, const std::string& path) {
    if (v.kind == Value::Kind::integer) return v.i;
    invalid(path, "expects an integer");
}

bool as_boolean(const Value& v, const std::string& path) {
    if (v.kind == Value::Kind::boolean) return v.b;
    invalid(path, "expects a boolean");
}

std::string as_string(const Value& v, const std::string& path) {
    if (v.kind == Value::Kind::string) return v.str;
    invalid(path, "expects a string");
}

int as_int(const Value& v, const std::string& path) {
    std::int64_t i = as_integer(v, path);
    if (i < INT32_MIN || i > INT32_MAX) invalid(path, "integer out of range");
    return static_cast<int>(i);
}

// --- enum <-> string --------------------------------------------------------

const char* family_name(MetricSpec::Family f) {
    switch (f) {
        case MetricSpec::Family::flat: return "flat";
        case MetricSpec::Family::example21: return "example21";
        case MetricSpec::Family::power_tangent: return "power_tangent";
        case MetricSpec::Family::trapped_sphere: return "trapped_sphere";
    }
    throw Error("unreachable metric family");
}

MetricSpec::Family parse_family(const std::string& s, const std::string& path) {
    if (s == "flat") return MetricSpec::Family::flat;
    if (s == "example21") return MetricSpec::Family::example21;
    if (s == "power_tangent") return MetricSpec::Family::power_tangent;
    if (s == "trapped_sphere") return MetricSpec::Family::trapped_sphere;
    invalid(path, "unknown family \"" + s +
                      "\" (expected flat, example21, power_tangent, or "
                      "trapped_sphere)");
}

const char* gamma_name(MetricSpec::Gamma g) {
    return g == MetricSpec::Gamma::radial ? "radial" : "modulated";
}

MetricSpec::Gamma parse_gamma(const std::string& s, const std::string& path) {
    if (s == "radial") return MetricSpec::Gamma::radial;
    if (s == "modulated") return MetricSpec::Gamma::modulated;
    invalid(path, "unknown profile \"" + s + "\" (expected radial or modulated)");
}

const char* kind_name(InitialData::Kind k) {
    switch (k) {
        case InitialData::Kind::zero: return "zero";
        case InitialData::Kind::gaussian: return "gaussian";
        case InitialData::Kind::ring: return "ring";
    }
    throw Error("unreachable initial kind");
}

InitialData::Kind parse_kind(const std::string& s, const std::string& path) {
    if (s == "zero") return InitialData::Kind::zero;
    if (s == "gaussian") return InitialData::Kind::gaussian;
    if (s == "ring") return InitialData::Kind::ring;
    invalid(path, "unknown kind \"" + s + "\" (expected zero, gaussian, or ring)");
}

// --- section mappers (fail closed: every present key must be consumed) ------

void map_root(const Table& t, Scenario& sc) {
    for (const auto& [key, v] : t) {
        if (key == "schema") {
            sc.schema = as_int(v, "schema");
        } else if (key == "name") {
            sc.name = as_string(v, "name");
        } else if (key == "seed") {
            std::int64_t s = as_integer(v, "seed");
            if (s < 0) invalid("seed", "must be a non-negative integer");
            sc.seed = static_cast<std::uint64_t>(s);
        } else {
            invalid(key, "unknown key");
        }
    }
}

void map_metric(const Table& t, MetricSpec& m) {
    for (const auto& [key, v] : t) {
        const std::string path = "[metric]." + key;
        if (key == "family")
            m.family = parse_family(as_string(v, path), path);
        else if (key == "n")
            m.n = as_int(v, path);
        else if (key == "m")
            m.m = as_number(v, path);
        else if (key == "d1")
            m.d1 = as_number(v, path);
        else if (key == "r2")
            m.r2 = as_number(v, path);
        else if (key == "alpha")
            m.alpha = as_number(v, path);
        else if (key == "delta")
            m.delta = as_number(v, path);
        else if (key == "gamma")
            m.gamma = parse_gamma(as_string(v, path), path);
        else if (key == "gamma_s")
            m.gamma_s = as_number(v, path);
        else if (key == "gamma_q")
            m.gamma_q = as_number(v, path);
        else if (key == "gamma_eps")
            m.gamma_eps = as_number(v, path);
        else if (key == "gamma_m")
            m.gamma_m = as_int(v, path);
        else
            invalid(path, "unknown key");
    }
}

void map_damping(const Table& t, DampingProfile& d) {
    for (const auto& [key, v] : t) {
        const std::string path = "[damping]." + key;
        if (key == "a0")
            d.a0 = as_number(v, path);
        else if (key == "R0")
            d.R0 = as_number(v, path);
        else if (key == "eps0")
            d.eps0 = as_number(v, path);
        else if (key == "ramp")
            d.ramp = as_number(v, path);
        else if (key == "d1")
            d.d1 = as_number(v, path);
        else if (key == "eps1")
            d.eps1 = as_number(v, path);
        else if (key == "collar_ramp")
            d.collar_ramp = as_number(v, path);
        else
            invalid(path, "unknown key");
    }
}

void map_grid(const Table& t, GridSpec& g) {
    for (const auto& [key, v] : t) {
        const std::string path = "[grid]." + key;
        if (key == "r_in")
            g.r_in = as_number(v, path);
        else if (key == "r_out")
            g.r_out = as_number(v, path);
        else if (key == "j")
            g.j = as_int(v, path);
        else if (key == "k")
            g.k = as_int(v, path);
        else
            invalid(path, "unknown key");
    }
}

void map_time(const Table& t, TimeSpec& ts) {
    for (const auto& [key, v] : t) {
        const std::string path = "[time]." + key;
        if (key == "dt")
            ts.dt = as_number(v, path);
        else if (key == "t_final")
            ts.t_final = as_number(v, path);
        else if (key == "p")
            ts.p = as_number(v, path);
        else if (key == "nonlinear")
            ts.nonlinear = as_boolean(v, path);
        else if (key == "tolerance")
            ts.tolerance = as_number(v, path);
        else if (key == "max_iterations")
            ts.max_iterations = as_int(v, path);
        else if (key == "diag_stride")
            ts.diag_stride = as_int(v, path);
        else if (key == "snapshot_stride")
            ts.snapshot_stride = as_int(v, path);
        else
            invalid(path, "unknown key");
    }
}

void map_initial(const Table& t, InitialData& in) {
    for (const auto& [key, v] : t) {
        const std::string path = "[initial]." + key;
        if (key == "kind")
            in.kind = parse_kind(as_string(v, path), path);
        else if (key == "amplitude")
            in.amplitude = as_number(v, path);
        else if (key == "center")
            in.center = as_number(v, path);
        else if (key == "width")
            in.width = as_number(v, path);
        else if (key == "k")
            in.k = as_number(v, path);
        else if (key == "m_theta")
            in.m_theta = as_int(v, path);
        else if (key == "boundary_margin")
            in.boundary_margin = as_number(v, path);
        else
            invalid(path, "unknown key");
    }
}

void map_outputs(const Table& t, OutputSpec& o) {
    for (const auto& [key, v] : t) {
        const std::string path = "[outputs]." + key;
        if (key == "csv")
            o.csv = as_boolean(v, path);
        else if (key == "snapshots")
            o.snapshots = as_boolean(v, path);
        else if (key == "plt")
            o.plt = as_boolean(v, path);
        else
            invalid(path, "unknown key");
    }
}

// --- semantic validation ----------------------------------------------------

void validate(const Scenario& sc) {
    if (sc.schema != 1)
        invalid("schema", "unsupported schema version " +
                              std::to_string(sc.schema) + " (expected 1)");

    const MetricSpec& m = sc.metric;
    if (m.n < 2) invalid("[metric].n", "must be >= 2");
    if (m.family == MetricSpec::Family::example21 ||
        m.family == MetricSpec::Family::power_tangent) {
        if (m.m < 0.0) invalid("[metric].m", "must be >= 0");
    }
    if (m.family == MetricSpec::Family::example21 && !(m.d1 > 0.0))
        invalid("[metric].d1", "must be positive for the example21 family");
    if (m.family == MetricSpec::Family::trapped_sphere && !(m.r2 > 0.0))
        invalid("[metric].r2", "must be positive for the trapped-sphere family");
    if (!(m.delta > 0.0)) invalid("[metric].delta", "must be positive");
    if (m.alpha < 0.0) invalid("[metric].alpha", "must be >= 0");
    if (m.gamma == MetricSpec::Gamma::modulated) {
        if (sc.grid.k <= 0)
            invalid("[metric].gamma",
                    "the modulated profile needs an angular axis ([grid].k > 0)");
        if (!(m.gamma_s > 0.0)) invalid("[metric].gamma_s", "must be positive");
        if (!(m.gamma_eps >= 0.0 && m.gamma_eps < 1.0))
            invalid("[metric].gamma_eps", "must lie in [0, 1)");
    }

    const GridSpec& g = sc.grid;
    if (!(g.r_in > 0.0)) invalid("[grid].r_in", "must be positive");
    if (!(g.r_out > g.r_in)) invalid("[grid].r_out", "must exceed r_in");
    if (g.j < 2) invalid("[grid].j", "needs at least 2 cells");
    if (g.k < 0) invalid("[grid].k", "must be >= 0");
    if (m.family == MetricSpec::Family::example21 && g.r_in < m.d1)
        invalid("[grid].r_in",
                "must be >= [metric].d1 (the tangent profile is a pure power "
                "law only beyond the blend radius)");

    const TimeSpec& t = sc.time;
    if (!(t.dt > 0.0)) invalid("[time].dt", "must be positive");
    if (!(t.t_final > 0.0)) invalid("[time].t_final", "must be positive");
    if (!(t.p > 1.0)) invalid("[time].p", "p must exceed 1");
    if (m.n > 2) {
        const double critical =
            static_cast<double>(m.n + 2) / static_cast<double>(m.n - 2);
        if (!(t.p < critical))
            invalid("[time].p",
                    "p must be < (n+2)/(n-2) = " + format_double(critical));
    }
    if (!(t.tolerance > 0.0)) invalid("[time].tolerance", "must be positive");
    if (t.max_iterations < 1) invalid("[time].max_iterations", "must be >= 1");
    if (t.diag_stride < 1) invalid("[time].diag_stride", "must be >= 1");
    if (t.snapshot_stride < 0) invalid("[time].snapshot_stride", "must be >= 0");

    const InitialData& in = sc.initial;
    if (in.kind != InitialData::Kind::zero) {
        if (!(in.width > 0.0)) invalid("[initial].width", "must be positive");
        if (!(in.center > g.r_in && in.center < g.r_out))
            invalid("[initial].center",
                    "must lie strictly between [grid].r_in and [grid].r_out");
    }
    if (in.kind == InitialData::Kind::ring && g.k <= 0)
        invalid("[initial].kind",
                "ring modes need an angular axis ([grid].k > 0)");
    if (in.boundary_margin >= 0.0 &&
        2.0 * in.boundary_margin >= g.r_out - g.r_in)
        invalid("[initial].boundary_margin",
                "twice the margin must be smaller than the annulus width");

    const DampingProfile& d = sc.damping;
    try {
        d.validate();
    } catch (const ConfigError& e) {
        throw ValidationError(std::string("[damping]: ") + e.what());
    }
    if (d.active()) {
        // the run geometry needs r_out > R0 > r_in
        if (!(d.R0 > g.r_in && d.R0 < g.r_out))
            invalid("[damping].R0",
                    "must lie strictly between [grid].r_in and [grid].r_out");
    }
}

void put(std::ostringstream& out, const char* key, double v) {
    out << key << " = " << format_double(v) << "\n";
}
void put(std::ostringstream& out, const char* key, int v) {
    out << key << " = " << v << "\n";
}
void put(std::ostringstream& out, const char* key, bool v) {
    out << key << " = " << (v ? "true" : "false") << "\n";
}
void put_string(std::ostringstream& out, const char* key,
                const std::string& v) {
    out << key << " = \"";
    for (char c : v) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\t': out << "\\t"; break;
            case '\r': out << "\\r"; break;
            default: out << c;
        }
    }
    out << "\"\n";
}

} // namespace

Scenario parse_scenario(std::string_view text, const std::string& origin) {
    const toml::Document doc = toml::parse(text, origin);
    Scenario sc;
    map_root(doc.root, sc);
    for (const auto& [name, table] : doc.sections) {
        if (name == "metric")
            map_metric(table, sc.metric);
        else if (name == "damping")
            map_damping(table, sc.damping);
        else if (name == "grid")
            map_grid(table, sc.grid);
        else if (name == "time")
            map_time(table, sc.time);
        else if (name == "initial")
            map_initial(table, sc.initial);
        else if (name == "outputs")
            map_outputs(table, sc.outputs);
        else
            invalid("[" + name + "]", "unknown section");
    }
    validate(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_scenario(text, path);
}

std::string to_toml(const Scenario& sc) {
    std::ostringstream out;
    put(out, "schema", sc.schema);
    put_string(out, "name", sc.name);
    out << "seed = " << sc.seed << "\n";

    out << "\n[metric]\n";
    out << "family = \"" << family_name(sc.metric.family) << "\"\n";
    put(out, "n", sc.metric.n);
    put(out, "m", sc.metric.m);
    put(out, "d1", sc.metric.d1);
    put(out, "r2", sc.metric.r2);
    put(out, "alpha", sc.metric.alpha);
    put(out, "delta", sc.metric.delta);
    out << "gamma = \"" << gamma_name(sc.metric.gamma) << "\"\n";
    put(out, "gamma_s", sc.metric.gamma_s);
    put(out, "gamma_q", sc.metric.gamma_q);
    put(out, "gamma_eps", sc.metric.gamma_eps);
    put(out, "gamma_m", sc.metric.gamma_m);

    out << "\n[damping]\n";
    put(out, "a0", sc.damping.a0);
    put(out, "R0", sc.damping.R0);
    put(out, "eps0", sc.damping.eps0);
    put(out, "ramp", sc.damping.ramp);
    put(out, "d1", sc.damping.d1);
    put(out, "eps1", sc.damping.eps1);
    put(out, "collar_ramp", sc.damping.collar_ramp);

    out << "\n[grid]\n";
    put(out, "r_in", sc.grid.r_in);
    put(out, "r_out", sc.grid.r_out);
    put(out, "j", sc.grid.j);
    put(out, "k", sc.grid.k);

    out << "\n[time]\n";
    put(out, "dt", sc.time.dt);
    put(out, "t_final", sc.time.t_final);
    put(out, "p", sc.time.p);
    put(out, "nonlinear", sc.time.nonlinear);
    put(out, "tolerance", sc.time.tolerance);
    put(out, "max_iterations", sc.time.max_iterations);
    put(out, "diag_stride", sc.time.diag_stride);
    put(out, "snapshot_stride", sc.time.snapshot_stride);

    out << "\n[initial]\n";
    out << "kind = \"" << kind_name(sc.initial.kind) << "\"\n";
    put(out, "amplitude", sc.initial.amplitude);
    put(out, "center", sc.initial.center);
    put(out, "width", sc.initial.width);
    put(out, "k", sc.initial.k);
    put(out, "m_theta", sc.initial.m_theta);
    put(out, "boundary_margin", sc.initial.boundary_margin);

    out << "\n[outputs]\n";
    put(out, "csv", sc.outputs.csv);
    put(out, "snapshots", sc.outputs.snapshots);
    put(out, "plt", sc.outputs.plt);
    return out.str();
}

std::string content_hash(const Scenario& sc) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_toml(sc))));
    return std::string(buf, 16);
}

// --- orchestration builders -------------------------------------------------

std::unique_ptr<MetricField> build_metric(const Scenario& sc) {
    const MetricSpec& m = sc.metric;
    switch (m.family) {
        case MetricSpec::Family::flat: return make_flat_metric(m.n);
        case MetricSpec::Family::example21:
            return make_example21_metric(m.n, m.m, m.d1);
        case MetricSpec::Family::power_tangent:
            return make_power_tangent_metric(m.n, m.m);
        case MetricSpec::Family::trapped_sphere:
            return make_trapped_sphere_metric(m.n, m.r2);
    }
    throw Error("unreachable metric family");
}

RadialMetricParams radial_params(const Scenario& sc) {
    const MetricSpec& m = sc.metric;
    RadialMetricParams p;
    p.n = m.n;
    p.alpha = m.alpha;
    switch (m.family) {
        case MetricSpec::Family::flat:
            p.c0 = 1.0;
            p.d = 0.0;
            break;
        case MetricSpec::Family::example21:
        case MetricSpec::Family::power_tangent:
            p.c0 = 1.0;
            p.d = m.m * (m.n - 1);
            break;
        case MetricSpec::Family::trapped_sphere:
            throw ConfigError(
                "trapped-sphere metrics have no power-law volume element; "
                "they support geodesic tracing only");
    }
    return p;
}

RadialGrid build_radial_grid(const Scenario& sc) {
    const RadialMetricParams p = radial_params(sc);
    return make_radial_grid(p.n, p.c0, p.d, sc.grid.r_in, sc.grid.r_out,
                            sc.grid.j);
}

WarpedGrid build_warped_grid(const Scenario& sc) {
    if (sc.grid.k <= 0)
        throw ConfigError(
            "scenario has no angular axis ([grid].k = 0); the warped grid "
            "needs [grid].k > 0");
    WarpedProfile profile;
    if (sc.metric.gamma == MetricSpec::Gamma::modulated) {
        profile.kind = WarpedProfile::Kind::modulated;
        profile.s = sc.metric.gamma_s;
        profile.q = sc.metric.gamma_q;
        profile.eps = sc.metric.gamma_eps;
        profile.m_theta = sc.metric.gamma_m;
    } else {
        const RadialMetricParams p = radial_params(sc);
        profile.kind = WarpedProfile::Kind::radial_equivalent;
        profile.n = p.n;
        profile.c0 = p.c0;
        profile.d = p.d;
    }
    return make_warped_grid(profile, sc.grid.r_in, sc.grid.r_out, sc.grid.j,
                            sc.grid.k);
}

std::unique_ptr<DiscreteOperator> build_operator(const Scenario& sc) {
    if (sc.grid.k > 0) {
        const WarpedGrid grid = build_warped_grid(sc);
        return make_warped_operator(grid, sc.damping);
    }
    const RadialGrid grid = build_radial_grid(sc);
    return make_radial_operator(grid, sc.damping);
}

SolverConfig solver_config(const Scenario& sc) {
    SolverConfig cfg;
    cfg.dt = sc.time.dt;
    cfg.t_final = sc.time.t_final;
    cfg.p = sc.time.p;
    cfg.nonlinear = sc.time.nonlinear;
    cfg.fp_tolerance = sc.time.tolerance;
    cfg.fp_max_iterations = sc.time.max_iterations;
    return cfg;
}

RunSettings run_settings(const Scenario& sc) {
    RunSettings settings;
    settings.diag_stride = sc.time.diag_stride;
    settings.alpha = sc.metric.alpha;
    return settings;
}

Region default_geodesic_region(const Scenario& sc) {
    const double hi =
        sc.damping.active() ? sc.damping.R0 : sc.grid.r_out;
    return Region::shell(sc.metric.n, sc.grid.r_in, hi);
}

} // namespace mwlab
