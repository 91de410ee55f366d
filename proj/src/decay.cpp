#include "mwlab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwlab/errors.hpp"
#include "mwlab/numerics.hpp"

namespace mwlab {

DecayFit fit_exponential_rate(const DiagnosticsSeries& series, double t1,
                              double t2) {
    if (series.rows() < 2)
        throw FitError("decay fit: series holds fewer than two samples");
    if (!(t2 > t1)) throw FitError("decay fit: window must satisfy t2 > t1");
    const double tol = 1e-12 * (1.0 + std::abs(t2));

    std::vector<double> ts, logs;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < series.rows(); ++i) {
        const double t = series.t[i];
        if (t < t1 - tol || t > t2 + tol) continue;
        const double e = series.energy[i];
        if (!(e > 0.0))
            throw FitError("decay fit: non-positive energy at t = " +
                           format_double(t));
        if (e > prev * (1.0 + 1e-12)) monotone = false;
        prev = e;
        ts.push_back(t);
        logs.push_back(std::log(e));
    }
    if (ts.size() < 2)
        throw FitError("decay fit: window contains fewer than two samples");
    if (!(series.energy.front() > 0.0))
        throw FitError("decay fit: E(0) <= 0, cannot normalize the prefactor");

    // Ordinary least squares on (t, log E).
    const double n = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += logs[i];
    }
    const double tbar = st / n, ybar = sy / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (logs[i] - ybar);
    }
    const double slope = sty / stt;
    const double intercept = ybar - slope * tbar;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double fit = intercept + slope * ts[i];
        ss_res += (logs[i] - fit) * (logs[i] - fit);
        ss_tot += (logs[i] - ybar) * (logs[i] - ybar);
    }

    DecayFit f;
    f.t1 = ts.front();
    f.t2 = ts.back();
    f.monotone = monotone;
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    f.exponential = f.r_squared >= kExponentialFitThreshold;
    if (f.exponential) {
        f.C2 = -slope;
        f.C1 = std::exp(intercept) / series.energy.front();
        f.verdict = "exponential";
    } else {
        f.verdict = "no exponential regime detected";
    }
    return f;
}

DecayFit fit_exponential_rate(const DiagnosticsSeries& series,
                              double transient_fraction) {
    if (series.rows() < 2)
        throw FitError("decay fit: series holds fewer than two samples");
    if (!(transient_fraction >= 0.0) || !(transient_fraction < 1.0))
        throw FitError("decay fit: transient fraction must lie in [0, 1)");
    const double T = series.t.back();
    return fit_exponential_rate(series, transient_fraction * T, T);
}

UniformitySweep uniformity_sweep(
    const std::function<DiagnosticsSeries(double amplitude)>& run,
    const std::vector<double>& amplitudes, double transient_fraction,
    int threads) {
    if (amplitudes.empty())
        throw ConfigError("uniformity sweep: no amplitudes given");
    for (double a : amplitudes)
        if (!(a >= 0.0))
            throw ConfigError("uniformity sweep: amplitudes must be >= 0");

    UniformitySweep sweep;
    sweep.rows.resize(amplitudes.size());
    parallel_for(amplitudes.size(), threads, [&](std::size_t i) {
        SweepRow& row = sweep.rows[i];
        row.amplitude = amplitudes[i];
        DiagnosticsSeries series;
        try {
            series = run(amplitudes[i]);
        } catch (const StepError& e) {
            throw StepError("amplitude " + format_double(amplitudes[i]) +
                            ": " + e.what());
        }
        try {
            row.fit = fit_exponential_rate(series, transient_fraction);
        } catch (const FitError& e) {
            row.degenerate = true;
            row.note = e.what();
        }
    });

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    int count = 0;
    for (const SweepRow& row : sweep.rows) {
        if (row.degenerate || !row.fit.exponential) continue;
        lo = std::min(lo, row.fit.C2);
        hi = std::max(hi, row.fit.C2);
        sum += row.fit.C2;
        ++count;
    }
    if (count >= 2) {
        const double mean = sum / count;
        sweep.c2_spread = mean != 0.0 ? (hi - lo) / std::abs(mean) : 0.0;
    }
    return sweep;
}

namespace {

double relative_change(double prev, double last) {
    if (prev == 0.0 && last == 0.0) return 0.0;
    const double scale = std::max(std::abs(prev), 1e-300);
    return std::abs(last - prev) / scale;
}

} // namespace

MorawetzCheck morawetz_boundedness_check(const RadialGrid& grid,
                                         const DampingProfile& damping,
                                         const InitialData& data,
                                         SolverConfig cfg, double alpha,
                                         std::vector<double> horizons) {
    if (damping.active())
        throw ConfigError(
            "boundedness check: damping must be identically zero (the bound "
            "addresses the free flow)");
    const double d_min = 2.0 * (3.0 - grid.n);
    if (grid.d < d_min - 1e-12)
        throw ConfigError("boundedness check: requires d >= 2(3-n) = " +
                          format_double(d_min) + ", got d = " +
                          format_double(grid.d));
    if (horizons.empty())
        throw ConfigError("boundedness check: no horizons given");
    for (double T : horizons)
        if (!(T > 0.0))
            throw ConfigError("boundedness check: horizons must be > 0");
    std::sort(horizons.begin(), horizons.end());
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] - horizons[i - 1] <=
            1e-12 * (1.0 + horizons.back()))
            throw ConfigError("boundedness check: duplicate horizon " +
                              format_double(horizons[i]));

    auto op = make_radial_operator(grid, damping);
    const FieldState init = make_initial_data(data, grid);
    cfg.t_final = horizons.back();
    RunSettings settings;
    settings.alpha = alpha;
    const DiagnosticsSeries series =
        run_simulation(*op, init, cfg, settings).series;
    const double e0 = series.energy.front();

    MorawetzCheck mc;
    mc.i2_covered = grid.d > d_min + 1e-12;
    for (double T : horizons) {
        MorawetzRow row;
        row.T = T;
        const MorawetzIntegrals I = morawetz_integrals(series, 0.0, T);
        row.I1_over_E0 = e0 > 0.0 ? I.I1 / e0 : 0.0;
        row.I2_over_E0 = e0 > 0.0 ? I.I2 / e0 : 0.0;
        row.I3_over_E0 = e0 > 0.0 ? I.I3 / e0 : 0.0;
        const double tol = 1e-12 * (1.0 + T);
        for (std::size_t i = 0;
             i < series.rows() && series.t[i] <= T + tol; ++i)
            row.boundary_mass_max =
                std::max(row.boundary_mass_max, series.outer_boundary_mass[i]);
        row.tainted = row.boundary_mass_max > 1e-4;
        mc.rows.push_back(row);
    }

    if (mc.rows.size() >= 2) {
        const MorawetzRow& a = mc.rows[mc.rows.size() - 2];
        const MorawetzRow& b = mc.rows.back();
        mc.growth_i1 = relative_change(a.I1_over_E0, b.I1_over_E0);
        mc.growth_i2 = relative_change(a.I2_over_E0, b.I2_over_E0);
        mc.growth_i3 = relative_change(a.I3_over_E0, b.I3_over_E0);
        mc.bounded = mc.growth_i1 <= 0.05 && mc.growth_i3 <= 0.05 &&
                     (!mc.i2_covered || mc.growth_i2 <= 0.05);
    }
    return mc;
}

} // namespace mwlab
