#pragma once
// Scenario: the validated, serializable description of one laboratory run.
// A scenario file is the single source of truth for a run's physics; parsing
// is fail-closed (unknown keys and sections are ValidationErrors naming the
// key path) and every load re-checks the physical preconditions, so file and
// in-memory state can never disagree. The canonical serialization to_toml()
// writes every key in a fixed order, which makes the 64-bit content hash a
// stable provenance tag: two files that parse to the same scenario hash
// identically no matter how they were formatted.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "mwlab/damping.hpp"
#include "mwlab/geodesics.hpp"
#include "mwlab/grid.hpp"
#include "mwlab/metric.hpp"
#include "mwlab/numerics.hpp" // fnv1a64, the provenance digest primitive
#include "mwlab/solver.hpp"

namespace mwlab {

struct MetricSpec {
    enum class Family { flat, example21, power_tangent, trapped_sphere };
    Family family = Family::flat;
    int n = 3;
    double m = 0.0;     // tangent-profile exponent (example21, power_tangent)
    double d1 = 1.0;    // example21 blend radius: f = r^m only for r >= d1
    double r2 = 2.0;    // trapped-sphere radius
    double alpha = 0.0; // angular Morawetz density coefficient
    double delta = 1.0; // escape-rate parameter (assumptions, geodesics)

    // angular profile for warped grids ([grid].k > 0)
    enum class Gamma { radial, modulated };
    Gamma gamma = Gamma::radial;
    double gamma_s = 1.0;
    double gamma_q = 1.0;
    double gamma_eps = 0.0;
    int gamma_m = 0;

    bool operator==(const MetricSpec&) const = default;
};

struct GridSpec {
    double r_in = 1.0;
    double r_out = 16.0;
    int j = 200;
    int k = 0; // 0: radial reduction; > 0: warped (r, theta) grid
    bool operator==(const GridSpec&) const = default;
};

struct TimeSpec {
    double dt = 1e-3;
    double t_final = 1.0;
    double p = 3.0;
    bool nonlinear = true;
    double tolerance = 1e-12;
    int max_iterations = 50;
    int diag_stride = 1;
    int snapshot_stride = 0; // 0: snapshots only at t = 0 and t_final
    bool operator==(const TimeSpec&) const = default;
};

struct OutputSpec {
    bool csv = true;
    bool snapshots = false;
    bool plt = false;
    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    int schema = 1;
    std::string name = "scenario";
    std::uint64_t seed = 0;
    MetricSpec metric;
    DampingProfile damping;
    GridSpec grid;
    TimeSpec time;
    InitialData initial;
    OutputSpec outputs;
    bool operator==(const Scenario&) const = default;
};

// Parse + validate. ParseError on syntax, ValidationError on schema or
// physics violations; every message names the offending key path.
Scenario parse_scenario(std::string_view text, const std::string& origin = "");
Scenario load_scenario(const std::string& path);

// Canonical serialization (fixed key order, every key present, shortest
// round-trip number formatting). parse_scenario(to_toml(s)) == s.
std::string to_toml(const Scenario& sc);

// 16 lowercase hex digits of fnv1a64(to_toml(sc)).
std::string content_hash(const Scenario& sc);

// --- orchestration builders -------------------------------------------------
// Trapped-sphere metrics have no power-law volume element, so every grid or
// operator builder rejects them with ConfigError; they support geodesic
// tracing only.

std::unique_ptr<MetricField> build_metric(const Scenario& sc);
RadialMetricParams radial_params(const Scenario& sc);
RadialGrid build_radial_grid(const Scenario& sc);
WarpedGrid build_warped_grid(const Scenario& sc); // ConfigError when k == 0
std::unique_ptr<DiscreteOperator> build_operator(const Scenario& sc);
SolverConfig solver_config(const Scenario& sc);
RunSettings run_settings(const Scenario& sc);

// Escape region for geodesic checks: the undamped shell [r_in, R0] when
// damping is active, the whole annulus otherwise.
Region default_geodesic_region(const Scenario& sc);

} // namespace mwlab
