#include "ckdv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "ckdv/bourgain.hpp"
#include "ckdv/diagnostics.hpp"
#include "ckdv/error.hpp"
#include "ckdv/kernels.hpp"
#include "ckdv/parallel.hpp"
#include "ckdv/solver.hpp"
#include "ckdv/transforms.hpp"

#ifndef CKDV_VERSION
#define CKDV_VERSION "unknown"
#endif

namespace ckdv {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

double hs_a(const ExperimentConfig& cfg, const char* what) {
    const auto* hs = std::get_if<HirotaSatsuma>(&cfg.system);
    if (!hs) throw ConfigError(std::string(what) + " needs a hirota_satsuma system");
    if (hs->a == 0.0) throw ConfigError(std::string(what) + " needs a != 0");
    return hs->a;
}

double sech2(double z) {
    const double c = std::cosh(z);
    return 1.0 / (c * c);
}

/// KdV soliton (c/2) sech^2(sqrt(c)/2 (x - shift)).
SpectralField kdv_soliton(const GridSpec& g, double c, double shift) {
    RVec w(g.n);
    for (int j = 0; j < g.n; ++j) w[j] = 0.5 * c * sech2(0.5 * std::sqrt(c) * (g.x(j) - shift));
    return forward(w, g);
}

double wrap(double z, double period) { return z - period * std::round(z / period); }

double linf(const RVec& a, const RVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

double state_linf(const State& a, const State& b) {
    return std::max(linf(inverse(a.u), inverse(b.u)), linf(inverse(a.v), inverse(b.v)));
}

double pair_norm(const SpectralField& u, const SpectralField& v, double s) {
    return std::sqrt(sobolev_norm_sq(u, s) + sobolev_norm_sq(v, s));
}

State scaled(const State& s, double c) { return State{c * s.u, c * s.v, s.t}; }

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

Trajectory run_stepper(const State& s0, const ExperimentConfig& cfg, double T, double sample_interval) {
    return simulate(s0, cfg.system, T, StepperConfig{cfg.dt}, sample_interval);
}

struct Triple {
    double a, a0, a1;
};

/// a uniform in [-4, 4]; a0, a1 uniform in [-4, 4] and at least 0.1 apart.
Triple random_triple(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    Triple t{U(rng), U(rng), U(rng)};
    while (std::abs(t.a1 - t.a0) < 0.1) t.a1 = U(rng);
    return t;
}

}  // namespace

State initial_state(const ExperimentConfig& cfg, const GridSpec& grid) {
    const InitialSpec& in = cfg.initial;
    if (in.type == "snapshot") return read_snapshot(in.path).to_state();
    if (in.type == "zero") return State{SpectralField(grid), SpectralField(grid), 0.0};
    if (in.type == "soliton") return hs_as_kdv(kdv_soliton(grid, in.c, in.shift), hs_a(cfg, "soliton data"));
    RVec u(grid.n), v(grid.n);
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double zu = (x - in.u_shift) / in.u_width, zv = (x - in.v_shift) / in.v_width;
        u[j] = in.u_amp * std::exp(-zu * zu);
        v[j] = in.v_amp * std::exp(-zv * zv);
    }
    return make_state(u, v, grid);
}

ExperimentResult simulate_experiment(const ExperimentConfig& cfg) {
    const State s0 = initial_state(cfg, make_grid(cfg.n, cfg.period));
    const Trajectory tr = run_stepper(s0, cfg, cfg.T, cfg.sample_interval);
    std::vector<DiagnosticRecord> recs;
    for (const auto& s : tr.states) recs.push_back(make_record(s, cfg.system, cfg.sobolev_s));

    ExperimentResult r;
    r.tables.emplace_back("diagnostics.csv", diagnostics_table(recs));
    if (cfg.simulate.snapshots) {
        if (tr.states.size() > 1) r.snapshots.emplace_back("snapshot_initial.bin", Snapshot::from_state(tr.states.front()));
        r.snapshots.emplace_back("snapshot_final.bin", Snapshot::from_state(tr.states.back()));
    }
    r.pass = true;
    json drift = json::object();
    const std::pair<const char*, Quantity> qs[] = {{"V", Quantity::V},       {"F", Quantity::F},
                                                   {"phi1", Quantity::Phi1}, {"phi2", Quantity::Phi2},
                                                   {"phi3", Quantity::Phi3}, {"phi4", Quantity::Phi4}};
    for (const auto& [name, q] : qs) {
        const double d = relative_drift(recs, q);
        if (std::isnan(d)) continue;
        drift[name] = d;
        if (!(d < cfg.simulate.drift_tol)) r.pass = false;
    }
    r.summary = {{"system", system_name(cfg.system)},
                 {"samples", recs.size()},
                 {"t_final", tr.states.back().t},
                 {"relative_drift", drift},
                 {"drift_tol", cfg.simulate.drift_tol}};
    return r;
}

ExperimentResult diagnose_experiment(const ExperimentConfig& cfg) {
    const State s = read_snapshot(cfg.diagnose.snapshot).to_state();
    const DiagnosticRecord rec = make_record(s, cfg.system, cfg.sobolev_s);
    ExperimentResult r;
    r.tables.emplace_back("diagnostics.csv", diagnostics_table({rec}));
    r.pass = true;
    r.summary = {{"system", system_name(cfg.system)}, {"n", s.u.grid.n}, {"period", s.u.grid.period}, {"t", s.t},
                 {"V", rec.V},  {"F", rec.F},         {"Hs_u", rec.sobolev_u},      {"Hs_v", rec.sobolev_v}};
    return r;
}

ExperimentResult lipschitz_probe(const ExperimentConfig& cfg) {
    const auto& k = cfg.lipschitz;
    const GridSpec g = make_grid(cfg.n, cfg.period);
    const State s0 = initial_state(cfg, g);
    const double s = cfg.sobolev_s;
    const double base_norm = pair_norm(s0.u, s0.v, s);
    if (base_norm == 0.0) throw ConfigError("lipschitz probe needs nonzero initial data");

    auto rng = make_rng(cfg.seed, 1);
    std::normal_distribution<double> nd;
    auto direction = [&] {
        RVec w(g.n);
        for (int j = 0; j < g.n; ++j) w[j] = nd(rng);
        SpectralField f = forward(w, g);
        for (int j = 0; j < g.n; ++j)
            if (std::abs(g.mode(j)) > k.direction_kmax) f.coeffs[j] = 0.0;
        return f;
    };
    SpectralField du = direction(), dv = direction();
    const double dn = pair_norm(du, dv, s);
    du *= 1.0 / dn;
    dv *= 1.0 / dn;

    // Run 0 is the base solution, run i the perturbation by deltas[i - 1].
    const std::size_t m = k.deltas.size();
    std::vector<Trajectory> runs(m + 1);
    parallel_for(m + 1, [&](std::size_t i) {
        State p = s0;
        if (i > 0) {
            const double eps = k.deltas[i - 1] * base_norm;
            p.u += eps * du;
            p.v += eps * dv;
        }
        runs[i] = run_stepper(p, cfg, cfg.T, cfg.sample_interval);
    });

    CsvTable table{{"delta_rel", "delta_data", "delta_solution", "ratio"}, {}, {}};
    std::vector<double> ratios;
    std::vector<std::vector<double>> running(m), instant(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Trajectory& p = runs[i + 1];
        const double d0 = pair_norm(p.states[0].u - runs[0].states[0].u, p.states[0].v - runs[0].states[0].v, s);
        double sup = 0.0;
        for (std::size_t j = 0; j < p.states.size(); ++j) {
            const double d = pair_norm(p.states[j].u - runs[0].states[j].u, p.states[j].v - runs[0].states[j].v, s);
            sup = std::max(sup, d);
            running[i].push_back(sup / d0);
            instant[i].push_back(d / d0);
        }
        ratios.push_back(sup / d0);
        table.rows.push_back({k.deltas[i], d0, sup, sup / d0});
    }

    // Running sup at the smallest delta, against the horizon.
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (k.deltas[i] < k.deltas[smallest]) smallest = i;
    CsvTable growth{{"T", "ratio", "instant_ratio"}, {}, {}};
    bool monotone = true;
    for (std::size_t j = 0; j < running[smallest].size(); ++j) {
        growth.rows.push_back({runs[0].states[j].t, running[smallest][j], instant[smallest][j]});
        if (j > 0 && running[smallest][j] < running[smallest][j - 1]) monotone = false;
    }

    ExperimentResult r;
    r.tables.emplace_back("lipschitz.csv", table);
    r.tables.emplace_back("lipschitz_growth.csv", growth);
    double change = kNaN;
    if (m >= 2) {
        // The two smallest deltas in ladder order.
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return k.deltas[a] < k.deltas[b]; });
        change = std::abs(ratios[order[0]] / ratios[order[1]] - 1.0);
    }
    r.pass = m >= 2 && change < k.stabilization_tol && monotone;
    r.summary = {{"ratios", ratios}, {"stabilization_change", change}, {"growth_monotone", monotone}};
    return r;
}

ExperimentResult scaling_probe(const ExperimentConfig& cfg) {
    const auto& k = cfg.scaling;
    hs_a(cfg, "scaling probe");
    if (cfg.initial.type == "snapshot") throw ConfigError("scaling probe needs analytic initial data");
    const GridSpec g = make_grid(cfg.n, cfg.period);
    const double lambda = k.lambda, l3 = lambda * lambda * lambda;
    const int samples = 10;
    const double interval = k.T > 0.0 ? k.T / samples : 1.0;

    // On the torus the map is exact: samples of u on the grid of period
    // lambda L, times lambda^2, are samples of u_lambda on the grid of period
    // L with the same n. The slow run covers lambda^3 T and shares its sample
    // times (divided by lambda^3) with the direct run.
    const GridSpec big = make_grid(cfg.n, lambda * cfg.period);
    const State u0 = initial_state(cfg, big);
    auto relabel = [&](const State& st) {
        return make_state(lambda * lambda * inverse(st.u), lambda * lambda * inverse(st.v), g, st.t / l3);
    };
    std::vector<Trajectory> runs(2);
    parallel_for(2, [&](std::size_t i) {
        if (i == 0) {
            runs[0] = run_stepper(u0, cfg, l3 * k.T, l3 * interval);
            for (auto& st : runs[0].states) st = relabel(st);
        } else {
            runs[1] = run_stepper(relabel(u0), cfg, k.T, interval);
        }
    });
    CsvTable cov{{"t", "linf_error"}, {}, {}};
    double cov_err = 0.0;
    const std::size_t ns = std::min(runs[0].states.size(), runs[1].states.size());
    for (std::size_t j = 0; j < ns; ++j) {
        const double e = state_linf(runs[0].states[j], runs[1].states[j]);
        cov.rows.push_back({runs[1].states[j].t, e});
        cov_err = std::max(cov_err, e);
    }
    const double edge = std::max(boundary_level(runs[1].states.back().u), boundary_level(runs[1].states.back().v));

    // ||lambda^2 u0(lambda .)||_s^2 = lambda^3 \int (1 + lambda^2 eta^2)^s |u0^(eta)|^2 d eta
    // for u0^(eta) = eta^2 exp(-eta^2), the transform of a second derivative
    // of a Gaussian; the low-frequency zero keeps s = -3/2 finite.
    auto norm = [](double lam, double s) {
        auto f = [&](double eta) {
            const double e2 = eta * eta;
            return std::pow(1.0 + lam * lam * e2, s) * e2 * e2 * std::exp(-2.0 * e2);
        };
        const double I = 2.0 * integrate(f, 0.0, 12.0, {1.0 / lam}, QuadOptions{1e-13, 0.0, 20000, 4}).value;
        return std::sqrt(lam * lam * lam * I);
    };
    CsvTable ntab{{"lambda", "s", "norm", "ratio"}, {}, {}};
    CsvTable fits{{"s", "exponent", "expected"}, {}, {}};
    json exps = json::array();
    bool fit_ok = true;
    for (double s : k.norm_s) {
        const double n1 = norm(1.0, s);
        for (double lam : k.norm_lambdas) {
            const double v = norm(lam, s);
            ntab.rows.push_back({lam, s, v, v / n1});
        }
        std::vector<double> ys;
        for (double lam : k.fit_lambdas) ys.push_back(norm(lam, s));
        const double e = loglog_slope(k.fit_lambdas, ys);
        fits.rows.push_back({s, e, s + 1.5});
        exps.push_back({{"s", s}, {"exponent", e}, {"expected", s + 1.5}});
        if (!(std::abs(e - (s + 1.5)) <= k.exponent_tol)) fit_ok = false;
    }

    ExperimentResult r;
    r.tables.emplace_back("scaling_covariance.csv", cov);
    r.tables.emplace_back("scaling_norms.csv", ntab);
    r.tables.emplace_back("scaling_exponents.csv", fits);
    r.pass = cov_err < k.covariance_tol && fit_ok;
    r.summary = {{"lambda", lambda},          {"covariance_linf", cov_err}, {"covariance_tol", k.covariance_tol},
                 {"boundary_level", edge},    {"exponents", exps},          {"exponent_tol", k.exponent_tol}};
    return r;
}

ExperimentResult picard_study(const ExperimentConfig& cfg) {
    const auto& k = cfg.picard;
    const GridSpec g = make_grid(cfg.n, cfg.period);
    const State base = initial_state(cfg, g);
    const std::size_t m = k.amplitudes.size();

    struct Row {
        double ratio = kNaN, agreement = kNaN;
        bool converged = false, diverged = false;
    };
    std::vector<Row> rows(m);
    parallel_for(m, [&](std::size_t i) {
        const State s0 = scaled(base, k.amplitudes[i]);
        PicardOptions opt;
        opt.n_iters = k.iterations;
        opt.time_resolution = k.time_resolution;
        opt.sobolev_s = cfg.sobolev_s;
        opt.keep_iterates = false;
        Row& row = rows[i];
        try {
            const PicardResult pr = picard_iterate(s0, cfg.system, k.T, opt);
            row.ratio = pr.contraction_ratio;
            row.converged = pr.converged;
            row.diverged = pr.diverged;
            if (pr.converged && pr.contraction_ratio < 0.9) {
                const Trajectory st = run_stepper(s0, cfg, k.T, k.T);
                row.agreement = state_linf(pr.iterates.back().states.back(), st.states.back());
            }
        } catch (const BlowupDetected&) {
            row.ratio = std::numeric_limits<double>::infinity();
            row.diverged = true;
        }
    });

    CsvTable t{{"amplitude", "contraction_ratio", "converged", "diverged", "stepper_linf"}, {}, {}};
    bool small_contracts = false, large_fails = false, agree = true;
    for (std::size_t i = 0; i < m; ++i) {
        const Row& row = rows[i];
        t.rows.push_back({k.amplitudes[i], row.ratio, double(row.converged), double(row.diverged), row.agreement});
        if (!std::isnan(row.agreement)) {
            small_contracts = true;
            if (!(row.agreement < k.agreement_tol)) agree = false;
        }
        if (row.diverged || row.ratio >= 1.0) large_fails = true;
    }
    json ratios = json::array(), agreements = json::array();
    for (const auto& row : rows) {
        ratios.push_back(row.ratio);
        agreements.push_back(row.agreement);
    }
    ExperimentResult r;
    r.tables.emplace_back("picard.csv", t);
    r.pass = small_contracts && agree && large_fails;
    r.summary = {{"amplitudes", k.amplitudes},
                 {"contraction_ratios", ratios},
                 {"stepper_linf", agreements},
                 {"contracting_found", small_contracts},
                 {"agreement_ok", agree},
                 {"noncontracting_found", large_fails}};
    return r;
}

ExperimentResult convergence_study(const ExperimentConfig& cfg) {
    const auto& k = cfg.convergence;
    const double a = hs_a(cfg, "convergence study");

    // One-soliton: u(x, t) = w(-x, a t) with w the KdV soliton of speed c;
    // one box period is L / (|a| c).
    const GridSpec g = make_grid(cfg.n, cfg.period);
    const double c = k.soliton_c;
    const double period_t = cfg.period / (std::abs(a) * c);
    const State s0 = hs_as_kdv(kdv_soliton(g, c, 0.0), a);
    const Trajectory tr = run_stepper(s0, cfg, period_t, period_t / k.soliton_samples);
    CsvTable sol{{"t", "linf_error"}, {}, {}};
    double sol_err = 0.0;
    for (const auto& st : tr.states) {
        RVec exact(g.n);
        for (int j = 0; j < g.n; ++j)
            exact[j] = 0.5 * c * sech2(0.5 * std::sqrt(c) * wrap(-g.x(j) - c * a * st.t, cfg.period));
        const double e = std::max(linf(inverse(st.u), exact), inverse(st.v).cwiseAbs().maxCoeff());
        sol.rows.push_back({st.t, e});
        sol_err = std::max(sol_err, e);
    }

    // dt-halving against a fine reference, smooth data on a coarse grid.
    ExperimentConfig oc = cfg;
    oc.initial = InitialSpec{};
    oc.initial.u_amp = k.order_amplitudes[0];
    oc.initial.v_amp = k.order_amplitudes[1];
    const State o0 = initial_state(oc, make_grid(k.order_n, cfg.period));
    std::vector<double> dts{k.order_ref_dt, k.order_dts[0], k.order_dts[1]};
    std::vector<State> finals(3);
    parallel_for(3, [&](std::size_t i) {
        finals[i] = simulate(o0, cfg.system, k.order_T, StepperConfig{dts[i]}, k.order_T).states.back();
    });
    CsvTable ord{{"dt", "error"}, {}, {}};
    std::vector<double> errs;
    for (int i = 1; i <= 2; ++i) {
        const double e = std::max((finals[i].u.coeffs - finals[0].u.coeffs).cwiseAbs().maxCoeff(),
                                  (finals[i].v.coeffs - finals[0].v.coeffs).cwiseAbs().maxCoeff());
        errs.push_back(e);
        ord.rows.push_back({dts[i], e});
    }
    const double order = std::log(errs[0] / errs[1]) / std::log(k.order_dts[0] / k.order_dts[1]);

    ExperimentResult r;
    r.tables.emplace_back("convergence_soliton.csv", sol);
    r.tables.emplace_back("convergence_order.csv", ord);
    r.pass = sol_err < k.soliton_tol && order >= k.order_min && order <= k.order_max;
    r.summary = {{"soliton_period", period_t}, {"soliton_linf", sol_err}, {"soliton_tol", k.soliton_tol},
                 {"order", order},             {"order_errors", errs},   {"order_range", {k.order_min, k.order_max}}};
    return r;
}

ExperimentResult bourgain_linear(const ExperimentConfig& cfg) {
    const auto& k = cfg.bourgain;
    ExperimentResult r;
    json sum = json::object();
    bool pass = true;

    // Free evolution: ||psi U_a u0||_{X^a_{s,b}} / ||u0||_s over random
    // band-limited data (|xi| <= 3).
    {
        const GridSpec g = make_grid(64, 16.0 * std::numbers::pi);
        auto rng = make_rng(cfg.seed, 10);
        std::normal_distribution<double> nd;
        std::vector<SpectralField> data;
        for (int i = 0; i < k.constancy_fields; ++i) {
            SpectralField u(g);
            for (int j = 0; j < g.n; ++j)
                if (std::abs(g.wavenumber(j)) <= 3.0 && g.mode(j) != g.n / 2) u.coeffs[j] = cplx(nd(rng), nd(rng));
            data.push_back(u);
        }
        const ConstancyReport c = free_evolution_constancy(data, 1.0, k.constancy_s, k.constancy_b, TimeGrid{});
        CsvTable t{{"field", "ratio"}, {}, {}};
        for (std::size_t i = 0; i < c.ratios.size(); ++i) t.rows.push_back({double(i), c.ratios[i]});
        r.tables.emplace_back("free_evolution.csv", t);
        const bool ok = c.cv < k.cv_tol;
        pass = pass && ok;
        sum["free_evolution"] = {{"mean", c.mean}, {"cv", c.cv}, {"cv_tol", k.cv_tol}, {"pass", ok}};
    }

    // Duhamel term: T-exponent of the ratio against b' + 1 - b.
    {
        const GridSpec g = make_grid(16, 16.0);
        SpectralField phi(g);
        for (int j = 0; j < g.n; ++j) phi.coeffs[j] = std::exp(-g.wavenumber(j) * g.wavenumber(j));
        std::vector<double> Ts;
        for (int i = 1; i <= 10; ++i) Ts.push_back(0.1 * i);
        const DuhamelReport d = duhamel_exponent(phi, 1.0, 0.0, k.duhamel_b, k.duhamel_b_prime, Ts, k.duhamel_sigma,
                                                 TimeGrid{k.duhamel_nt, 8.0});
        CsvTable t{{"T", "lhs", "rhs", "ratio"}, {}, {}};
        for (const auto& row : d.rows) t.rows.push_back({row.T, row.lhs, row.rhs, row.ratio});
        r.tables.emplace_back("duhamel.csv", t);
        const bool ok = std::abs(d.exponent - d.target) <= k.exponent_tol;
        pass = pass && ok;
        sum["duhamel"] = {{"exponent", d.exponent}, {"target", d.target}, {"tol", k.exponent_tol}, {"pass", ok}};
    }


    r.pass = pass;
    r.summary = sum;
    return r;
}

ExperimentResult bourgain_embedding(const ExperimentConfig& cfg) {
    const auto& k = cfg.bourgain;
    ExperimentResult r;
    json sum = json::object();
    bool pass = true;

    // Random space-time fields shared by the embedding and intersection checks.
    std::vector<SpaceTimeField> fields(k.fields);
    std::vector<Triple> triples(k.fields);
    parallel_for(static_cast<std::size_t>(k.fields), [&](std::size_t i) {
        auto rng = make_rng(cfg.seed, 11, i);
        fields[i] = random_space_time_field(k.field_nx, k.field_nt, k.field_period_x, k.field_period_t, rng);
        triples[i] = random_triple(rng);
    });

    {
        CsvTable t{{"s", "b", "field", "a", "a0", "a1", "lhs", "rhs", "constant", "pass"}, {}, {}};
        long failures = 0;
        double worst = 0.0;
        for (const auto& sb : k.embedding_sb) {
            std::vector<std::array<EmbeddingCheck, 2>> checks(fields.size());
            parallel_for(fields.size(), [&](std::size_t i) {
                checks[i][0] = embedding_check(fields[i], 2.0, 1.0, -1.0, sb[0], sb[1]);
                checks[i][1] = embedding_check(fields[i], triples[i].a, triples[i].a0, triples[i].a1, sb[0], sb[1]);
            });
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const Triple fixed{2.0, 1.0, -1.0};
                for (int j = 0; j < 2; ++j) {
                    const auto& e = checks[i][j];
                    const Triple& tr = j == 0 ? fixed : triples[i];
                    t.rows.push_back({sb[0], sb[1], double(i), tr.a, tr.a0, tr.a1, e.lhs, e.rhs, e.constant,
                                      double(e.pass)});
                    if (!e.pass) ++failures;
                    worst = std::max(worst, e.lhs / (e.constant * e.rhs));
                }
            }
        }
        r.tables.emplace_back("embedding.csv", t);
        const bool ok = failures == 0;
        pass = pass && ok;
        sum["embedding"] = {{"checks", t.rows.size()}, {"failures", failures}, {"max_lhs_over_bound", worst},
                            {"pass", ok}};
    }

    {
        const auto& sb = k.embedding_sb.front();
        const std::array<double, 2> first{k.intersection_first[0], k.intersection_first[1]};
        const std::array<double, 2> second{k.intersection_second[0], k.intersection_second[1]};
        std::vector<IntersectionRatio> rs(fields.size());
        parallel_for(fields.size(),
                     [&](std::size_t i) { rs[i] = intersection_ratio(fields[i], first, second, sb[0], sb[1]); });
        CsvTable t{{"field", "ratio", "lower", "upper", "pass"}, {}, {}};
        long failures = 0;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            t.rows.push_back({double(i), rs[i].ratio, rs[i].lower, rs[i].upper, double(rs[i].pass)});
            if (!rs[i].pass) ++failures;
            lo = std::min(lo, rs[i].ratio);
            hi = std::max(hi, rs[i].ratio);
        }
        r.tables.emplace_back("intersection.csv", t);
        const bool ok = failures == 0;
        pass = pass && ok;
        sum["intersection"] = {{"min_ratio", lo},           {"max_ratio", hi},       {"lower", rs.front().lower},
                               {"upper", rs.front().upper}, {"failures", failures}, {"pass", ok}};
    }

    r.pass = pass;
    r.summary = sum;
    return r;
}

ExperimentResult bourgain_pointwise(const ExperimentConfig& cfg) {
    const auto& k = cfg.bourgain;
    ExperimentResult r;
    json sum = json::object();
    bool pass = true;

    {
        auto rng = make_rng(cfg.seed, 12);
        CsvTable t{{"a", "a0", "a1", "max_ratio", "bound", "points", "violations"}, {}, {}};
        long violations = 0, points = 0;
        for (int i = 0; i < k.pointwise_triples; ++i) {
            const Triple tr = random_triple(rng);
            const LatticeScan sc = pointwise_scan(tr.a, tr.a0, tr.a1, k.pointwise_points, k.pointwise_points);
            t.rows.push_back({tr.a, tr.a0, tr.a1, sc.max_ratio, sc.bound, double(sc.points), double(sc.violations)});
            violations += sc.violations;
            points += sc.points;
        }
        r.tables.emplace_back("pointwise.csv", t);
        const FwScan fw = f_w_scan(10.0, k.fw_points);
        const bool ok = violations == 0 && fw.max_value == 0.5 && fw.plateau_min == 0.5;
        pass = pass && ok;
        sum["pointwise"] = {{"points", points},          {"violations", violations},     {"fw_max", fw.max_value},
                            {"fw_plateau_min", fw.plateau_min}, {"fw_points", fw.points}, {"pass", ok}};
    }

    r.pass = pass;
    r.summary = sum;
    return r;
}

ExperimentResult bourgain_bilinear(const ExperimentConfig& cfg) {
    const auto& k = cfg.bourgain;
    ExperimentResult r;
    json sum = json::object();
    bool pass = true;

    {
        struct Pattern {
            double l, r, o;
        };
        const Pattern patterns[] = {{-1, -1, -1}, {-1, -1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
        const std::array<double, 3> params[] = {{0.0, 0.6, -0.4}, {-0.6, 0.55, -0.45}};
        CsvTable t{{"s", "b", "b_prime", "a_left", "a_right", "a_out", "band", "max_ratio", "q10", "median", "q90",
                    "admissible"},
                   {},
                   {}};
        json ladders = json::array();
        bool all_ok = true;
        for (const auto& p : params) {
            for (const auto& pat : patterns) {
                std::vector<double> maxima;
                bool admissible = true;
                for (int band : k.bilinear_bands) {
                    BilinearOptions opt;
                    opt.trials = k.bilinear_trials;
                    opt.seed = cfg.seed;
                    const BilinearResult b = bilinear_ratio(p[0], p[1], p[2], pat.l, pat.r, pat.o, band, opt);
                    t.rows.push_back({p[0], p[1], p[2], pat.l, pat.r, pat.o, double(band), b.max_ratio, b.q10,
                                      b.median, b.q90, double(b.admissible)});
                    maxima.push_back(b.max_ratio);
                    admissible = admissible && b.admissible;
                }
                double change = 0.0;
                for (std::size_t i = 1; i < maxima.size(); ++i)
                    change = std::max(change, std::abs(maxima[i] / maxima[i - 1] - 1.0));
                const bool ok = admissible && change < k.bilinear_tol;
                all_ok = all_ok && ok;
                ladders.push_back({{"s", p[0]},
                                   {"b", p[1]},
                                   {"b_prime", p[2]},
                                   {"pattern", {pat.l, pat.r, pat.o}},
                                   {"maxima", maxima},
                                   {"max_change", change},
                                   {"admissible", admissible},
                                   {"pass", ok}});
            }
        }
        r.tables.emplace_back("bilinear.csv", t);
        pass = pass && all_ok;
        sum["bilinear"] = {{"ladders", ladders}, {"tol", k.bilinear_tol}, {"pass", all_ok}};
    }

    r.pass = pass;
    r.summary = sum;
    return r;
}

ExperimentResult bourgain_membership(const ExperimentConfig& cfg) {
    const auto& k = cfg.bourgain;
    ExperimentResult r;
    json sum = json::object();
    bool pass = true;

    {
        const double s = k.membership_sb[0], b = k.membership_sb[1];
        const MembershipReport smooth =
            membership_ladder([](double x) { return std::exp(-0.5 * x * x); }, 32.0, 64, 4, s, b);
        const MembershipReport rough =
            membership_ladder([](double x) { return std::pow(1.0 + std::abs(x), -0.6); }, 32.0, 64, 4, s, b);
        CsvTable lt{{"profile", "nx", "x_plus", "x_minus"}, {}, {}};
        for (const auto& [name, rep] : {std::pair{"gaussian", &smooth}, std::pair{"rough", &rough}})
            for (const auto& rung : rep->rungs) {
                lt.labels.push_back(name);
                lt.rows.push_back({double(rung.nx), rung.x_plus, rung.x_minus});
            }
        r.tables.emplace_back("membership.csv", lt);
        const bool ok = smooth.stable && !rough.stable;
        pass = pass && ok;
        sum["membership"] = {{"gaussian_change", smooth.last_change},
                             {"gaussian_stable", smooth.stable},
                             {"rough_change", rough.last_change},
                             {"rough_stable", rough.stable},
                             {"pass", ok}};
    }

    r.pass = pass;
    r.summary = sum;
    return r;
}

ExperimentResult bourgain_suite(const ExperimentConfig& cfg) {
    std::vector<ExperimentResult> parts{bourgain_linear(cfg), bourgain_embedding(cfg), bourgain_pointwise(cfg)};
    if (cfg.bourgain.bilinear) parts.push_back(bourgain_bilinear(cfg));
    parts.push_back(bourgain_membership(cfg));
    ExperimentResult r;
    r.pass = true;
    for (auto& p : parts) {
        r.pass = r.pass && p.pass;
        r.summary.update(p.summary);
        for (auto& t : p.tables) r.tables.push_back(std::move(t));
    }
    return r;
}

ExperimentResult kernel_suite(const ExperimentConfig& cfg) {
    const auto& k = cfg.kernels;
    KernelQuad q;
    q.x_max = k.x_max;
    q.quad.rel_tol = k.rel_tol;
    CsvTable t{{"kernel", "s", "b", "b_prime", "alpha", "beta", "max_value", "max_refined", "rel_change", "stable",
                "argmax_u", "argmax_v", "samples"},
               {},
               {}};
    json rows = json::array();
    bool pass = true;
    for (const auto& name : k.lemmas) {
        const KernelId id = kernel_from_name(name);
        const KernelParams p = reference_params(id);
        const KernelCheck c = kernel_bound_check(id, p, default_samples(id), q, k.stability_tol);
        t.labels.push_back(name);
        t.rows.push_back({p.s, p.b, p.b_prime, p.alpha, p.beta, c.max_value, c.max_refined, c.rel_change,
                          double(c.stable), c.argmax.u, c.argmax.v, double(c.samples)});
        rows.push_back({{"kernel", name}, {"max", c.max_value}, {"rel_change", c.rel_change}, {"stable", c.stable}});
        pass = pass && c.stable;
    }
    ExperimentResult r;
    r.tables.emplace_back("kernels.csv", t);
    r.pass = pass;
    r.summary = {{"kernels", rows}, {"stability_tol", k.stability_tol}};
    return r;
}

ExperimentResult nonequivalence_experiment(const ExperimentConfig& cfg) {
    const auto& k = cfg.noneq;
    const NonequivalenceReport rep = nonequivalence_demo(k.a0, k.a1, k.s, k.b, k.radii);
    CsvTable t{{"R", "norm_a0", "norm_a1"}, {}, {}};
    for (const auto& row : rep.rows) t.rows.push_back({row.R, row.norm_a0, row.norm_a1});
    ExperimentResult r;
    r.tables.emplace_back("noneq.csv", t);
    r.pass = rep.growth_exponent > 0.0 && rep.a0_increasing && rep.a1_last_change < k.stabilize_tol;
    r.summary = {{"construction", rep.construction},     {"growth_exponent", rep.growth_exponent},
                 {"a0_increasing", rep.a0_increasing},   {"a1_last_change", rep.a1_last_change},
                 {"stabilize_tol", k.stabilize_tol}};
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::Simulate: return simulate_experiment(cfg);
        case ExperimentKind::Diagnose: return diagnose_experiment(cfg);
        case ExperimentKind::LipschitzProbe: return lipschitz_probe(cfg);
        case ExperimentKind::ScalingProbe: return scaling_probe(cfg);
        case ExperimentKind::PicardStudy: return picard_study(cfg);
        case ExperimentKind::ConvergenceStudy: return convergence_study(cfg);
        case ExperimentKind::BourgainSuite: return bourgain_suite(cfg);
        case ExperimentKind::KernelSuite: return kernel_suite(cfg);
        case ExperimentKind::Nonequivalence: return nonequivalence_experiment(cfg);
    }
    throw InvalidArgument("unknown experiment kind");
}

json RunManifest::to_json() const {
    json j{{"config", config}, {"version", version}, {"wall_time_s", wall_time}, {"files", files},
           {"pass", pass},     {"summary", summary}};
    j["error"] = error.empty() ? json(nullptr) : json{{"kind", error_kind}, {"message", error}};
    return j;
}

std::string version_string() { return CKDV_VERSION; }

RunManifest run(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.config = ckdv::to_json(cfg);
    m.version = version_string();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    fs::remove(dir / "manifest.json");
    try {
        const ExperimentResult res = run_experiment(cfg);
        for (const auto& [name, table] : res.tables) {
            write_csv((dir / name).string(), table);
            m.files.push_back(name);
        }
        for (const auto& [name, snap] : res.snapshots) {
            write_snapshot((dir / name).string(), snap);
            m.files.push_back(name);
        }
        m.pass = res.pass;
        m.summary = res.summary;
    } catch (const ConfigError& e) {
        m.error = e.what();
        m.error_kind = "config";
    } catch (const std::exception& e) {
        m.error = e.what();
        m.error_kind = "runtime";
    }
    if (!m.error.empty()) m.pass = false;
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write " + tmp.string());
        out << m.to_json().dump(2) << '\n';
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, dir / "manifest.json");
    return m;
}

}  // namespace ckdv
