// morawetz-lab: command-line laboratory for damped nonlinear Schrodinger
// flows on exterior domains with non-Euclidean metrics. Every subcommand
// loads one scenario file (the single source of truth for the physics),
// writes a summary.json tagged with the scenario's content hash, and exits
// 0 on success, 1 when a checked property fails, 2 on configuration errors,
// 3 on runtime errors. All outputs are deterministic: identical scenario and
// seed produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mwlab/assumptions.hpp"
#include "mwlab/decay.hpp"
#include "mwlab/emit.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/geodesics.hpp"
#include "mwlab/identity.hpp"
#include "mwlab/numerics.hpp"
#include "mwlab/scenario.hpp"
#include "mwlab/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mwlab;

namespace {

struct GlobalOpts {
    std::string scenario_path;
    std::string out_dir = ".";
    std::int64_t seed = -1; // < 0: keep the scenario's seed
    int threads = 1;
    bool quiet = false;
};

void note(const GlobalOpts& g, const std::string& msg) {
    if (!g.quiet) std::fprintf(stderr, "%s\n", msg.c_str());
}

Scenario load(const GlobalOpts& g) {
    if (g.scenario_path.empty())
        throw ConfigError("--scenario is required (path to a scenario file)");
    Scenario sc = load_scenario(g.scenario_path);
    if (g.seed >= 0) sc.seed = static_cast<std::uint64_t>(g.seed);
    return sc;
}

json envelope(const Scenario& sc, const char* command) {
    json j;
    j["command"] = command;
    j["scenario"] = {{"name", sc.name},
                     {"hash", content_hash(sc)},
                     {"seed", sc.seed}};
    return j;
}

void write_summary(const fs::path& out_dir, const json& j,
                   const GlobalOpts& g) {
    fs::create_directories(out_dir);
    const fs::path path = out_dir / "summary.json";
    atomic_write(path, j.dump(2) + "\n");
    note(g, "wrote " + path.string());
}

json vec_json(const Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

// --- shared simulate pipeline (also the sweep child) -------------------------

struct SimOutcome {
    json payload;
    bool tainted = false;
};

SimOutcome simulate_core(const Scenario& sc, const fs::path& out,
                         const GlobalOpts& g) {
    fs::create_directories(out);
    const std::string hash = content_hash(sc);
    const SolverConfig cfg = solver_config(sc);
    const RunSettings settings = run_settings(sc);

    std::unique_ptr<DiscreteOperator> op;
    FieldState initial;
    if (sc.grid.k > 0) {
        const WarpedGrid grid = build_warped_grid(sc);
        op = make_warped_operator(grid, sc.damping);
        initial = make_initial_data(sc.initial, grid);
    } else {
        const RadialGrid grid = build_radial_grid(sc);
        op = make_radial_operator(grid, sc.damping);
        initial = make_initial_data(sc.initial, grid);
    }

    const long steps = std::max<long>(1, std::lround(cfg.t_final / cfg.dt));
    std::vector<std::string> files;
    json snap_files = json::array();
    StepObserver observer;
    const fs::path snapdir = out / "snapshots";
    auto snap_name = [](long step) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snap_%06ld.bin", step);
        return std::string(buf);
    };
    long last_snap = -1;
    if (sc.outputs.snapshots) {
        fs::create_directories(snapdir);
        write_snapshot(snapdir / snap_name(0), initial, sc.grid.j, sc.grid.k);
        snap_files.push_back(
            {{"file", snap_name(0)}, {"step", 0}, {"t", initial.t}});
        last_snap = 0;
        const int stride = sc.time.snapshot_stride;
        if (stride > 0) {
            observer = [&, stride](const StepContext& c) {
                const long step = c.step_index + 1;
                if (step % stride != 0) return;
                write_snapshot(snapdir / snap_name(step), c.after, sc.grid.j,
                               sc.grid.k);
                snap_files.push_back({{"file", snap_name(step)},
                                      {"step", step},
                                      {"t", c.after.t}});
                last_snap = step;
            };
        }
    }

    const SimulationResult res =
        run_simulation(*op, initial, cfg, settings, observer);

    if (sc.outputs.snapshots && last_snap != steps) {
        write_snapshot(snapdir / snap_name(steps), res.final_state, sc.grid.j,
                       sc.grid.k);
        snap_files.push_back({{"file", snap_name(steps)},
                              {"step", steps},
                              {"t", res.final_state.t}});
    }
    if (sc.outputs.snapshots) {
        json sidecar;
        sidecar["scenario"] = {{"name", sc.name}, {"hash", hash}};
        sidecar["grid"] = {{"r_in", sc.grid.r_in},
                           {"r_out", sc.grid.r_out},
                           {"j", sc.grid.j},
                           {"k", sc.grid.k}};
        sidecar["format"] = {
            {"header_bytes", 32},
            {"magic", "MWLAB1"},
            {"layout",
             "u32 j, u32 k, f64 t, 8 reserved bytes; then one little-endian "
             "f64 (re, im) pair per node in state order"}};
        sidecar["files"] = snap_files;
        atomic_write(snapdir / "snapshots.json", sidecar.dump(2) + "\n");
        files.push_back("snapshots/snapshots.json");
    }

    if (sc.outputs.csv) {
        atomic_write(out / "series.csv", csv_text(res.series));
        files.push_back("series.csv");
    }
    if (sc.outputs.plt) {
        atomic_write(out / "series.dat", dat_text(res.series, hash));
        atomic_write(out / "series.plt", plt_text("series.dat", hash));
        files.push_back("series.dat");
        files.push_back("series.plt");
    }

    const DiagnosticsSeries& s = res.series;
    const double m0 = s.mass.front();
    const double drift = std::abs(s.mass.back() - m0);
    double max_mres = 0.0, max_eres = 0.0, max_obm = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        max_mres = std::max(max_mres, s.mass_identity_residual[i]);
        max_eres = std::max(max_eres, s.energy_identity_residual[i]);
        max_obm = std::max(max_obm, s.outer_boundary_mass[i]);
    }
    const bool tainted = max_obm > 1e-4;

    json run;
    run["steps"] = steps;
    run["rows"] = s.rows();
    run["t_final"] = s.t.back();
    run["mass_initial"] = m0;
    run["mass_final"] = s.mass.back();
    run["mass_drift_rel"] = m0 > 0.0 ? drift / m0 : drift;
    run["energy_initial"] = s.energy.front();
    run["energy_final"] = s.energy.back();
    run["max_mass_identity_residual"] = max_mres;
    run["max_energy_identity_residual"] = max_eres;
    run["outer_boundary_mass_max"] = max_obm;
    run["tainted"] = tainted;

    json payload;
    payload["run"] = run;
    payload["files"] = files;
    (void)g;
    return SimOutcome{payload, tainted};
}

int cmd_simulate(const GlobalOpts& g) {
    const Scenario sc = load(g);
    note(g, "simulate: " + sc.name + " (" + content_hash(sc) + ")");
    json summary = envelope(sc, "simulate");
    const SimOutcome outcome = simulate_core(sc, g.out_dir, g);
    summary.update(outcome.payload);
    write_summary(g.out_dir, summary, g);
    return 0;
}

// --- decay --------------------------------------------------------------------

json fit_json(const DecayFit& f) {
    return json{{"t1", f.t1},
                {"t2", f.t2},
                {"C1", f.C1},
                {"C2", f.C2},
                {"r_squared", f.r_squared},
                {"monotone", f.monotone},
                {"exponential", f.exponential},
                {"verdict", f.verdict}};
}

DiagnosticsSeries run_series(const Scenario& sc) {
    const SolverConfig cfg = solver_config(sc);
    const RunSettings settings = run_settings(sc);
    if (sc.grid.k > 0) {
        const WarpedGrid grid = build_warped_grid(sc);
        auto op = make_warped_operator(grid, sc.damping);
        return run_simulation(*op, make_initial_data(sc.initial, grid), cfg,
                              settings)
            .series;
    }
    const RadialGrid grid = build_radial_grid(sc);
    auto op = make_radial_operator(grid, sc.damping);
    return run_simulation(*op, make_initial_data(sc.initial, grid), cfg,
                          settings)
        .series;
}

int cmd_decay(const GlobalOpts& g, double t1, double t2, double transient,
              const std::vector<double>& sweep_amplitudes) {
    const Scenario sc = load(g);
    note(g, "decay: " + sc.name + " (" + content_hash(sc) + ")");
    json summary = envelope(sc, "decay");

    const DiagnosticsSeries series = run_series(sc);
    const DecayFit fit = (t2 > t1 && t1 >= 0.0)
                             ? fit_exponential_rate(series, t1, t2)
                             : fit_exponential_rate(series, transient);
    summary["fit"] = fit_json(fit);
    const double e0 = series.energy.front();
    summary["energy_ratio_final"] =
        e0 > 0.0 ? series.energy.back() / e0 : 0.0;

    if (sc.outputs.csv) {
        fs::create_directories(g.out_dir);
        atomic_write(fs::path(g.out_dir) / "series.csv", csv_text(series));
    }

    bool ok = fit.exponential;
    if (!sweep_amplitudes.empty()) {
        auto run_amp = [&sc](double amplitude) {
            Scenario child = sc;
            child.initial.amplitude = amplitude;
            return run_series(child);
        };
        const UniformitySweep sweep =
            uniformity_sweep(run_amp, sweep_amplitudes, transient, g.threads);
        json rows = json::array();
        for (const SweepRow& row : sweep.rows) {
            json r;
            r["amplitude"] = row.amplitude;
            r["degenerate"] = row.degenerate;
            if (!row.note.empty()) r["note"] = row.note;
            if (!row.degenerate) r["fit"] = fit_json(row.fit);
            ok = ok && !row.degenerate && row.fit.exponential;
            rows.push_back(std::move(r));
        }
        summary["sweep"] = {{"amplitudes", sweep_amplitudes},
                            {"rows", rows},
                            {"c2_spread", sweep.c2_spread}};
    }
    summary["ok"] = ok;
    write_summary(g.out_dir, summary, g);
    return ok ? 0 : 1;
}

// --- morawetz ------------------------------------------------------------------

int cmd_morawetz(const GlobalOpts& g, std::vector<double> horizons) {
    const Scenario sc = load(g);
    note(g, "morawetz: " + sc.name + " (" + content_hash(sc) + ")");
    if (sc.grid.k > 0)
        throw ConfigError(
            "the boundedness check runs on the radial reduction; set "
            "[grid].k = 0");
    const RadialGrid grid = build_radial_grid(sc);
    const MorawetzCheck chk = morawetz_boundedness_check(
        grid, sc.damping, sc.initial, solver_config(sc), sc.metric.alpha,
        horizons);

    json summary = envelope(sc, "morawetz");
    json rows = json::array();
    bool any_tainted = false;
    for (const MorawetzRow& row : chk.rows) {
        any_tainted = any_tainted || row.tainted;
        rows.push_back({{"T", row.T},
                        {"I1_over_E0", row.I1_over_E0},
                        {"I2_over_E0", row.I2_over_E0},
                        {"I3_over_E0", row.I3_over_E0},
                        {"boundary_mass_max", row.boundary_mass_max},
                        {"tainted", row.tainted}});
    }
    summary["rows"] = rows;
    summary["growth"] = {{"i1", chk.growth_i1},
                         {"i2", chk.growth_i2},
                         {"i3", chk.growth_i3}};
    summary["i2_covered"] = chk.i2_covered;
    summary["bounded"] = chk.bounded;
    summary["tainted"] = any_tainted;
    const bool ok = chk.bounded && !any_tainted;
    summary["ok"] = ok;
    write_summary(g.out_dir, summary, g);
    return ok ? 0 : 1;
}

// --- identity-check -------------------------------------------------------------

json terms_json(const MultiplierTerms& t) {
    return json{{"boundary", t.boundary},
                {"time_boundary", t.time_boundary},
                {"dh_form", t.dh_form},
                {"damping", t.damping},
                {"divergence", t.divergence},
                {"p_momentum", t.p_momentum},
                {"p_gradient", t.p_gradient},
                {"p_potential", t.p_potential},
                {"p_bulk", t.p_bulk},
                {"p_laplacian", t.p_laplacian},
                {"h_residual", t.h_residual},
                {"p_residual", t.p_residual},
                {"residual", t.residual}};
}

int cmd_identity(const GlobalOpts& g, int levels, const std::string& which,
                 double cutoff_r0, double cutoff_eps0) {
    const Scenario sc = load(g);
    note(g, "identity-check: " + sc.name + " (" + content_hash(sc) + ")");
    if (sc.grid.k > 0)
        throw ConfigError(
            "multiplier identities run on the radial reduction; set "
            "[grid].k = 0");
    if (levels < 1 || levels > 8)
        throw ConfigError("--levels must lie in [1, 8]");
    if (static_cast<long>(sc.grid.j) << (levels - 1) > 2'000'000)
        throw ConfigError("refined grid would exceed 2e6 cells; lower "
                          "--levels or [grid].j");

    // default cutoff geometry: the damping layer's, else the outer quarter
    if (cutoff_r0 <= 0.0)
        cutoff_r0 = sc.damping.active() ? sc.damping.R0 : 0.75 * sc.grid.r_out;
    if (cutoff_eps0 <= 0.0)
        cutoff_eps0 =
            sc.damping.active() ? sc.damping.eps0 : 0.25 * sc.grid.r_out;

    std::vector<std::pair<std::string, RadialMultiplier>> multipliers;
    if (which == "inverse_r" || which == "both")
        multipliers.emplace_back(
            "inverse_r", RadialMultiplier{RadialMultiplier::Kind::inverse_r});
    if (which == "cutoff" || which == "both")
        multipliers.emplace_back(
            "cutoff", RadialMultiplier{RadialMultiplier::Kind::cutoff,
                                       cutoff_r0, cutoff_eps0});
    ScalarMultiplier P;
    P.kind = ScalarMultiplier::Kind::half_dim_over_r;
    P.n = sc.metric.n;

    json level_rows = json::array();
    std::map<std::string, std::vector<double>> residuals;
    for (int level = 0; level < levels; ++level) {
        Scenario refined = sc;
        refined.grid.j = sc.grid.j << level;
        refined.time.dt = sc.time.dt / static_cast<double>(1 << level);
        const RadialGrid grid = build_radial_grid(refined);
        auto op = make_radial_operator(grid, refined.damping);
        const FieldState initial = make_initial_data(refined.initial, grid);
        const SolverConfig cfg = solver_config(refined);

        std::vector<MultiplierIdentityAccumulator> accs;
        accs.reserve(multipliers.size());
        for (const auto& [name, H] : multipliers)
            accs.emplace_back(grid, *op, H, P, cfg.p, cfg.nonlinear);
        StepObserver observer = [&accs](const StepContext& c) {
            for (auto& acc : accs) acc.observe(c);
        };
        run_simulation(*op, initial, cfg, run_settings(refined), observer);

        json row;
        row["j"] = refined.grid.j;
        row["dt"] = refined.time.dt;
        for (std::size_t i = 0; i < multipliers.size(); ++i) {
            const MultiplierTerms terms = accs[i].report();
            row[multipliers[i].first] = terms_json(terms);
            residuals[multipliers[i].first].push_back(terms.residual);
        }
        level_rows.push_back(std::move(row));
        note(g, "  level " + std::to_string(level) +
                    " (j = " + std::to_string(refined.grid.j) + ") done");
    }

    bool ok = true;
    json ratios;
    for (const auto& [name, res] : residuals) {
        json list = json::array();
        for (std::size_t l = 0; l + 1 < res.size(); ++l) {
            const double ratio =
                res[l + 1] > 0.0
                    ? res[l] / res[l + 1]
                    : (res[l] == 0.0
                           ? 1.0
                           : std::numeric_limits<double>::infinity());
            list.push_back(ratio);
            ok = ok && ratio >= 1.5;
        }
        ratios[name] = list;
    }

    json summary = envelope(sc, "identity-check");
    summary["multiplier_p"] = "half_dim_over_r";
    summary["cutoff"] = {{"R0", cutoff_r0}, {"eps0", cutoff_eps0}};
    summary["levels"] = level_rows;
    summary["residual_ratios"] = ratios;
    summary["converging"] = ok;
    summary["ok"] = ok;
    write_summary(g.out_dir, summary, g);
    return ok ? 0 : 1;
}

// --- check-assumptions ------------------------------------------------------------

json condition_json(const ConditionCheck& c) {
    json j;
    j["id"] = c.id;
    j["ok"] = c.ok;
    j["equality"] = c.equality;
    j["margin"] = c.margin;
    if (c.witness.size() > 0) j["witness"] = vec_json(c.witness);
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

json report_json(const AssumptionReport& r) {
    json j;
    j["assumption"] = r.assumption;
    j["verdict"] = to_string(r.verdict);
    j["c0"] = r.c0;
    j["d"] = r.d;
    j["det_residual"] = r.det_residual;
    j["alpha"] = r.alpha;
    j["alpha_max"] = r.alpha_max;
    j["delta"] = r.delta;
    j["delta_max"] = r.delta_max;
    j["damping_coverage_ok"] = r.damping_coverage_ok;
    j["damping_sup"] = r.damping_sup;
    j["damping_grad_sup"] = r.damping_grad_sup;
    j["damping_lap_sup"] = r.damping_lap_sup;
    if (!r.exponent_bound.empty()) j["exponent_bound"] = r.exponent_bound;
    if (!r.ceps.empty()) {
        json table = json::array();
        for (const CepsEntry& e : r.ceps)
            table.push_back({{"eps", e.eps},
                             {"c_eps", e.c_eps},
                             {"hard_violation", e.hard_violation}});
        j["ceps"] = table;
    }
    json conds = json::array();
    for (const ConditionCheck& c : r.conditions)
        conds.push_back(condition_json(c));
    j["conditions"] = conds;
    json viol = json::array();
    for (const ConditionCheck* c : r.violations()) viol.push_back(c->id);
    j["violations"] = viol;
    return j;
}

int cmd_assumptions(const GlobalOpts& g, const std::string& require, int radii,
                    int directions) {
    const Scenario sc = load(g);
    note(g, "check-assumptions: " + sc.name + " (" + content_hash(sc) + ")");
    const auto metric = build_metric(sc);
    const DomainSpec dom{sc.grid.r_in, sc.grid.r_out};
    SamplerConfig sampler;
    sampler.radii = radii;
    sampler.directions = directions;
    sampler.seed = sc.seed;

    const AssumptionReport a =
        check_assumption_A(*metric, dom, sc.metric.alpha, sc.damping, sampler);
    const AssumptionReport b =
        check_assumption_B(*metric, dom, sc.metric.delta, sc.damping, sampler);
    const AssumptionReport c =
        check_assumption_C(*metric, dom, sc.metric.delta, sc.damping, sampler);
    const BoundaryCheck boundary = check_boundary_condition(
        *metric,
        sphere_boundary_samples(*metric, sc.grid.r_in, 64, sc.seed));

    json summary = envelope(sc, "check-assumptions");
    summary["boundary"] = {{"ok", boundary.ok},
                           {"max_value", boundary.max_value}};
    summary["A"] = report_json(a);
    summary["B"] = report_json(b);
    summary["C"] = report_json(c);

    bool ok = true;
    if (!require.empty()) {
        const AssumptionReport& target =
            require == "A" ? a : (require == "B" ? b : c);
        ok = target.verdict != Verdict::fails;
        summary["required"] = require;
        summary["required_holds"] = ok;
    }
    summary["ok"] = ok;
    write_summary(g.out_dir, summary, g);
    return ok ? 0 : 1;
}

// --- geodesics -----------------------------------------------------------------

// Conservative auto budget for the escape integration: the escape bound is
// (2/delta) sup |x - x0|_g, so twice a sampled overestimate of the sup always
// covers it.
double auto_budget(const MetricField& field, const Region& region,
                   double delta, const Vec& x0) {
    const int n = field.dimension();
    double sup_euclid = 0.0;
    double lo = 0.0, hi = 0.0;
    Vec center = Vec::Zero(n);
    if (region.kind == Region::Kind::ball) {
        center = region.center;
        sup_euclid = region.radius + (region.center - x0).norm();
        lo = region.radius / 32.0;
        hi = region.radius;
    } else {
        sup_euclid = region.r_hi + x0.norm();
        lo = region.r_lo;
        hi = region.r_hi;
    }
    double stretch2 = 1.0;
    Vec dir = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    for (double s : linspace(lo, hi, 33)) {
        if (s <= 0.0) continue;
        const Vec x = center + s * dir;
        if (x.norm() < 1e-9) continue;
        Eigen::SelfAdjointEigenSolver<Mat> eig(field.metric(x));
        stretch2 = std::max(stretch2, eig.eigenvalues().maxCoeff());
    }
    return 2.0 * (2.0 / delta) * sup_euclid * std::sqrt(stretch2) + 1.0;
}

int cmd_geodesics(const GlobalOpts& g, const std::string& region_kind,
                  double ball_radius, double ball_center, double shell_lo,
                  double shell_hi, int count, double t_budget, double h,
                  double slack) {
    const Scenario sc = load(g);
    note(g, "geodesics: " + sc.name + " (" + content_hash(sc) + ")");
    const auto metric = build_metric(sc);
    const int n = sc.metric.n;

    Region region = default_geodesic_region(sc);
    Vec x0 = Vec::Zero(n);
    if (region_kind == "ball") {
        if (!(ball_radius > 0.0))
            throw ConfigError("--ball-radius must be positive");
        Vec center = Vec::Zero(n);
        center[0] = ball_center;
        region = Region::ball(center, ball_radius);
        x0 = center;
    } else {
        if (shell_lo > 0.0) region.r_lo = shell_lo;
        if (shell_hi > 0.0) region.r_hi = shell_hi;
        if (!(region.r_hi > region.r_lo))
            throw ConfigError("--shell-hi must exceed --shell-lo");
    }
    if (count < 1) throw ConfigError("--count must be >= 1");

    const double delta = sc.metric.delta;
    if (t_budget <= 0.0) t_budget = auto_budget(*metric, region, delta, x0);

    const std::vector<GeodesicState> ics =
        sample_geodesic_ics(*metric, region, count, sc.seed);
    const GccReport report =
        check_gcc(*metric, region, delta, x0, ics, t_budget, h, slack,
                  g.threads);

    json summary = envelope(sc, "geodesics");
    json region_j;
    if (region.kind == Region::Kind::ball) {
        region_j = {{"kind", "ball"},
                    {"center", vec_json(region.center)},
                    {"radius", region.radius}};
    } else {
        region_j = {{"kind", "shell"},
                    {"r_lo", region.r_lo},
                    {"r_hi", region.r_hi}};
    }
    summary["region"] = region_j;
    summary["delta"] = delta;
    summary["count"] = report.sample_count;
    summary["t_budget"] = t_budget;
    summary["step"] = h;
    summary["all_exited"] = report.all_exited;
    summary["max_exit_time"] = report.max_exit_time;
    summary["argmax"] = report.argmax;
    summary["sup_distance"] = report.sup_distance;
    summary["bound"] = report.bound;
    summary["within_bound"] = report.within_bound;
    json stuck = json::array();
    for (std::size_t i = 0;
         i < report.non_exiting.size() && i < std::size_t{32}; ++i)
        stuck.push_back(report.non_exiting[i]);
    summary["non_exiting"] = stuck;
    const bool ok = report.all_exited && report.within_bound;
    summary["ok"] = ok;
    write_summary(g.out_dir, summary, g);
    return ok ? 0 : 1;
}

// --- sweep -----------------------------------------------------------------------

int cmd_sweep(const GlobalOpts& g) {
    if (g.scenario_path.empty())
        throw ConfigError(
            "--scenario is required (a scenario file or a directory of them)");
    std::vector<fs::path> inputs;
    if (fs::is_directory(g.scenario_path)) {
        for (const auto& entry : fs::directory_iterator(g.scenario_path))
            if (entry.path().extension() == ".toml")
                inputs.push_back(entry.path());
        std::sort(inputs.begin(), inputs.end());
    } else {
        inputs.push_back(g.scenario_path);
    }
    if (inputs.empty())
        throw ConfigError("no .toml scenario files in " + g.scenario_path);

    std::vector<json> results(inputs.size());
    std::vector<int> codes(inputs.size(), 0);
    parallel_for(inputs.size(), g.threads, [&](std::size_t i) {
        const fs::path& file = inputs[i];
        json row;
        row["file"] = file.filename().string();
        try {
            Scenario sc = load_scenario(file.string());
            if (g.seed >= 0) sc.seed = static_cast<std::uint64_t>(g.seed);
            const fs::path child_dir =
                fs::path(g.out_dir) / file.stem().string();
            json child = envelope(sc, "simulate");
            const SimOutcome outcome = simulate_core(sc, child_dir, g);
            child.update(outcome.payload);
            write_summary(child_dir, child, g);
            row["name"] = sc.name;
            row["hash"] = content_hash(sc);
            row["tainted"] = outcome.tainted;
            row["status"] = "ok";
        } catch (const ConfigError& e) {
            row["status"] = "config-error";
            row["error"] = e.what();
            codes[i] = 2;
        } catch (const std::exception& e) {
            row["status"] = "runtime-error";
            row["error"] = e.what();
            codes[i] = 3;
        }
        results[i] = std::move(row);
    });

    json summary;
    summary["command"] = "sweep";
    summary["children"] = results;
    int exit_code = 0;
    for (int c : codes) exit_code = std::max(exit_code, c);
    summary["ok"] = exit_code == 0;
    write_summary(g.out_dir, summary, g);
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "morawetz-lab: numerical laboratory for damped nonlinear Schrodinger "
        "flows on exterior domains with non-Euclidean metrics"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--scenario", g.scenario_path,
                   "scenario file (sweep also accepts a directory)");
    app.add_option("--out-dir", g.out_dir, "output directory")
        ->capture_default_str();
    app.add_option("--seed", g.seed, "override the scenario seed (>= 0)");
    app.add_option("--threads", g.threads, "worker threads for sweeps")
        ->capture_default_str();
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    auto* sim = app.add_subcommand(
        "simulate", "run the scenario and emit diagnostics/snapshots");

    auto* assum = app.add_subcommand(
        "check-assumptions",
        "sample the structural hypotheses (A/B/C) and the boundary sign");
    std::string require;
    int radii = 64, directions = 128;
    assum->add_option("--require", require,
                      "fail (exit 1) unless this assumption holds")
        ->check(CLI::IsMember({"A", "B", "C"}));
    assum->add_option("--radii", radii, "radial sample count")
        ->capture_default_str();
    assum->add_option("--directions", directions, "direction sample count")
        ->capture_default_str();

    auto* geo = app.add_subcommand(
        "geodesics", "trace unit-speed geodesics and check the escape bound");
    std::string region_kind = "shell";
    double ball_radius = 0.0, ball_center = 0.0, shell_lo = 0.0, shell_hi = 0.0;
    int count = 500;
    double t_budget = 0.0, step_h = 1e-3, slack = 1e-4;
    geo->add_option("--region", region_kind, "escape region shape")
        ->check(CLI::IsMember({"shell", "ball"}))
        ->capture_default_str();
    geo->add_option("--ball-radius", ball_radius, "ball region radius");
    geo->add_option("--ball-center", ball_center,
                    "ball center on the first axis");
    geo->add_option("--shell-lo", shell_lo, "inner shell radius (default: r_in)");
    geo->add_option("--shell-hi", shell_hi,
                    "outer shell radius (default: R0 or r_out)");
    geo->add_option("--count", count, "number of initial conditions")
        ->capture_default_str();
    geo->add_option("--t-budget", t_budget,
                    "integration budget (default: auto from the bound)");
    geo->add_option("--step", step_h, "integrator step")->capture_default_str();
    geo->add_option("--slack", slack, "tolerance added to the escape bound")
        ->capture_default_str();

    auto* ident = app.add_subcommand(
        "identity-check",
        "verify both multiplier identities under grid/time refinement");
    int levels = 3;
    std::string multiplier = "both";
    double cutoff_r0 = 0.0, cutoff_eps0 = 0.0;
    ident->add_option("--levels", levels, "refinement levels")
        ->capture_default_str();
    ident->add_option("--multiplier", multiplier, "which radial multiplier")
        ->check(CLI::IsMember({"inverse_r", "cutoff", "both"}))
        ->capture_default_str();
    ident->add_option("--cutoff-r0", cutoff_r0,
                      "cutoff support radius (default: damping R0)");
    ident->add_option("--cutoff-eps0", cutoff_eps0,
                      "cutoff transition width (default: damping eps0)");

    auto* decay = app.add_subcommand(
        "decay", "fit the exponential energy decay rate (optional sweep)");
    double t1 = -1.0, t2 = -1.0, transient = 0.1;
    std::vector<double> sweep_amplitudes;
    decay->add_option("--t1", t1, "fit window start (default: post-transient)");
    decay->add_option("--t2", t2, "fit window end (default: t_final)");
    decay->add_option("--transient-fraction", transient,
                      "fraction of the run to skip when no window is given")
        ->capture_default_str();
    decay
        ->add_option("--sweep-amplitudes", sweep_amplitudes,
                     "comma-separated amplitudes for a uniformity sweep")
        ->delimiter(',');

    auto* mora = app.add_subcommand(
        "morawetz",
        "check boundedness of the time-integrated Morawetz densities");
    std::vector<double> horizons{20.0, 40.0};
    mora->add_option("--horizons", horizons, "comma-separated time horizons")
        ->delimiter(',')
        ->capture_default_str();

    auto* sweep = app.add_subcommand(
        "sweep", "simulate every scenario file in a directory in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(g);
        if (assum->parsed()) return cmd_assumptions(g, require, radii, directions);
        if (geo->parsed())
            return cmd_geodesics(g, region_kind, ball_radius, ball_center,
                                 shell_lo, shell_hi, count, t_budget, step_h,
                                 slack);
        if (ident->parsed())
            return cmd_identity(g, levels, multiplier, cutoff_r0, cutoff_eps0);
        if (decay->parsed())
            return cmd_decay(g, t1, t2, transient, sweep_amplitudes);
        if (mora->parsed()) return cmd_morawetz(g, horizons);
        if (sweep->parsed()) return cmd_sweep(g);
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
