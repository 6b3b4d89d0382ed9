#include "critsense/deformed.hpp"
#include "critsense/rng.hpp"
#include "critsense/subsys.hpp"
#include "critsense/symmetry.hpp"
#include "critsense/xcli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>

namespace critsense {

namespace {

using Task = std::function<std::vector<ExperimentRecord>()>;

// Independent sweep points run concurrently; results keep task order.
std::vector<ExperimentRecord> run_tasks(const std::vector<Task>& tasks) {
    std::vector<std::vector<ExperimentRecord>> parts(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(tasks.size()); ++i) {
        try {
            parts[i] = tasks[i]();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<ExperimentRecord> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

struct Context {
    const ExperimentConfig& cfg;
    std::string hash;

    ExperimentRecord base() const {
        ExperimentRecord r;
        r.scenario = to_string(cfg.scenario);
        r.model = to_string(cfg.model.kind);
        r.J = cfg.model.J;
        r.h = cfg.model.h;
        r.delta_xxz = cfg.model.delta_xxz;
        r.channel = cfg.channel ? to_string(cfg.channel->kind) : "none";
        r.p = cfg.channel ? cfg.channel->p : 0.0;
        r.seed = cfg.seed;
        r.config_hash = hash;
        r.code_version = code_version();
        return r;
    }
};

std::string canonical_probe(const std::string& p) { return p == "critical" ? "critical_fm" : p; }

PureState model_ground_state(const ModelSpec& model, int L) {
    ModelSpec m = model;
    m.L = L;
    GroundOptions opts;
    opts.compute_gap = false;
    return solve_model(m, opts).state;
}

PureState probe_state(const ModelSpec& model, const std::string& label, int L) {
    const std::string p = canonical_probe(label);
    if (p == "ghz") return ghz_state(L);
    if (p == "spin_coherent") return spin_coherent_state(L);
    if (p == "oat") return oat_aligned_state(L, oat_optimal_twist(L).twist_time);
    const PureState gs = model_ground_state(model, L);
    if (p == "critical_fm") return gs;
    if (L % 2) throw DomainError("xcli", "probe_state", "critical_afm needs even L");
    PauliOperator U(L);
    std::vector<std::pair<int, char>> odd;
    for (int j = 1; j < L; j += 2) odd.push_back({j, 'X'});
    U.add(1.0, PauliString::from_sites(L, odd));
    return PureState(L, critsense::apply(U, gs.amplitudes()), true);
}

PauliOperator probe_generator(const std::string& label, int L) {
    return canonical_probe(label) == "critical_afm" ? PauliOperator::staggered_single(L, 'Z')
                                                    : PauliOperator::sum_single(L, 'Z');
}

void add_fit(ExperimentRecord& r, const PowerLawFit& f) {
    r.value = f.exponent;
    r.fit_exponent = f.exponent;
    r.fit_prefactor = f.prefactor;
    r.fit_r_squared = f.r_squared;
}

std::vector<ExperimentRecord> qfi_scaling(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<Task> tasks;
    for (const auto& probe : cfg.probes)
        for (int L : cfg.L_list)
            tasks.push_back([&ctx, &cfg, probe, L] {
                ExperimentRecord r = ctx.base();
                r.probe = canonical_probe(probe);
                r.L = L;
                r.observable = "qfi";
                r.value = qfi_pure(probe_state(cfg.model, probe, L), probe_generator(probe, L));
                r.qfi = r.value;
                return std::vector<ExperimentRecord>{r};
            });
    std::vector<ExperimentRecord> out = run_tasks(tasks);
    const std::size_t n = out.size();
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string p = out[i].probe;
        if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
        seen.push_back(p);
        if (cfg.L_list.size() < 3) continue;
        ExperimentRecord r = ctx.base();
        r.probe = p;
        r.observable = "qfi_fit";
        add_fit(r, fit(out, p, "qfi"));
        out.push_back(r);
    }
    return out;
}

std::vector<ExperimentRecord> theta_curves(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const std::vector<double> grid = cfg.theta.values();
    std::vector<Task> tasks;
    for (int L : cfg.L_list)
        tasks.push_back([&ctx, &grid, L] {
            std::vector<ExperimentRecord> rows;
            const SymmetryCurves c = symmetry_curves(L, grid);
            const PureState fm = critical_fm_state(L);
            const PauliOperator O = PauliOperator::sum_single(L, 'Z');
            const PauliOperator parity = subsystem_parity(L, L, 0);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const PrecisionPoint pp = error_propagation(fm, O, parity, grid[k]);
                const std::pair<const char*, double> series[] = {
                    {"parity", c.parity[k]}, {"reflection", c.reflection[k]}, {"translation", c.translation[k]}};
                for (const auto& [name, v] : series) {
                    ExperimentRecord r = ctx.base();
                    r.probe = std::string(name) == "parity" ? "critical_fm" : "critical_afm";
                    r.L = L;
                    r.theta = grid[k];
                    r.observable = name;
                    r.value = v;
                    if (std::string(name) == "parity") {
                        r.variance = pp.variance;
                        r.delta_theta = pp.delta_theta;
                    }
                    rows.push_back(r);
                }
            }
            ExperimentRecord r = ctx.base();
            r.L = L;
            r.observable = "collapse_deviation";
            r.value = curve_collapse_deviation(c);
            rows.push_back(r);
            return rows;
        });
    return run_tasks(tasks);
}

std::optional<double> channel_reference(const ChannelSpec& spec, const std::string& probe, const PureState& psi,
                                        const PauliOperator& O, int L) {
    if (spec.site_mask) return std::nullopt;
    switch (spec.kind) {
    case ChannelKind::bitflip_x:
        if (probe == "critical_afm") return std::nullopt;
        return bitflip_qfi_formula(L, spec.p, expectation(psi, O * O).real());
    case ChannelKind::zz: return qfi_pure(psi, O);
    case ChannelKind::dephase_z:
        if (probe != "ghz") return std::nullopt;
        return 4.0 * L * L * std::pow(1.0 - 2.0 * spec.p, 2.0 * L);
    case ChannelKind::global_dephase: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<ExperimentRecord> channel_sweep(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const std::vector<double> ps = cfg.p_list.empty() ? std::vector<double>{cfg.channel->p} : cfg.p_list;
    std::vector<Task> tasks;
    for (const auto& probe : cfg.probes)
        for (int L : cfg.L_list)
            for (double p : ps)
                tasks.push_back([&ctx, &cfg, probe, L, p] {
                    ChannelSpec spec = *cfg.channel;
                    spec.p = p;
                    spec.validate();
                    const PureState psi = probe_state(cfg.model, probe, L);
                    const PauliOperator O = probe_generator(probe, L);
                    const MixedState rho = apply_channel(MixedState::from_pure(psi), spec);
                    ExperimentRecord r = ctx.base();
                    r.probe = canonical_probe(probe);
                    r.L = L;
                    r.p = p;
                    r.observable = "qfi";
                    r.value = qfi_mixed(rho, O).value;
                    r.qfi = r.value;
                    r.reference = channel_reference(spec, r.probe, psi, O, L);
                    return std::vector<ExperimentRecord>{r};
                });
    return run_tasks(tasks);
}

std::vector<ExperimentRecord> deformed(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<Task> tasks;
    for (std::size_t idx = 0; idx < cfg.L_list.size(); ++idx) {
        const int L = cfg.L_list[idx];
        tasks.push_back([&ctx, &cfg, L, idx] {
            std::vector<ExperimentRecord> rows;
            const PureState psi = model_ground_state(cfg.model, L);
            auto row = [&](const std::string& obs, double v) {
                ExperimentRecord r = ctx.base();
                r.probe = "ladder";
                r.L = L;
                r.observable = obs;
                r.value = v;
                rows.push_back(r);
                return &rows.back();
            };
            const auto ops = ladder_chain1_x(L);
            const OutcomeEnsemble ens = enumerate_outcomes(psi, ops);
            PauliOperator chain2(2 * L);
            for (int j = 0; j < L; ++j) chain2.add(1.0, {{ladder_site(j, 2), 'Z'}});
            const double aq = averaged_qfi(ens);
            ExperimentRecord* r = row("averaged_qfi", aq);
            r->qfi = aq;
            r->reference = averaged_qfi_decoded(psi);
            row("qfi_pure_chain2", qfi_pure(psi, chain2));
            row("decoded_correlator", decoded_correlator(ens, 0, L - 1));
            const auto samples = sample_outcomes(psi, ops, mix_seed(cfg.seed, idx), cfg.shots);
            const SampledEstimate est = decoded_correlator_sampled(psi, samples, 0, L - 1);
            r = row("decoded_correlator_sampled", est.mean);
            r->variance = est.standard_error * est.standard_error;
            if (!cfg.beta_list.empty()) {
                const LroReport lro = uniform_outcome_lro_check(psi, cfg.beta_list);
                for (std::size_t k = 0; k < lro.beta.size(); ++k) {
                    r = row("lro_correlator", lro.correlator[k]);
                    r->beta = lro.beta[k];
                }
                row("lro_monotone", lro.monotone ? 1.0 : 0.0);
            }
            return rows;
        });
    }
    return run_tasks(tasks);
}

void window_rows(const Context& ctx, std::vector<ExperimentRecord>& rows, const WindowReport& w, int L, int Ls) {
    const std::pair<const char*, double> items[] = {{"theta_min", w.theta_min},
                                                    {"delta_theta_min", w.delta_theta_min},
                                                    {"theta_l", w.theta_l},
                                                    {"theta_r", w.theta_r},
                                                    {"sql_reference", w.sql_reference},
                                                    {"interior_minimum", w.interior_minimum ? 1.0 : 0.0},
                                                    {"has_window", w.has_window ? 1.0 : 0.0}};
    for (const auto& [name, v] : items) {
        ExperimentRecord r = ctx.base();
        r.probe = "critical";
        r.L = L;
        r.L_sub = Ls;
        r.observable = name;
        r.value = v;
        rows.push_back(r);
    }
}

std::vector<ExperimentRecord> subsystem(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const int L = cfg.model.L;
    const std::vector<double> grid = cfg.theta.values();
    const PureState psi = model_ground_state(cfg.model, L);
    const bool rydberg = cfg.model.kind == ModelKind::rydberg;
    const double nbar = rydberg ? mean_occupation(psi) : 0.0;
    std::vector<Task> tasks;
    std::vector<PrecisionCurve> curves(cfg.L_sub_list.size());
    std::vector<WindowReport> windows(cfg.L_sub_list.size());
    for (std::size_t i = 0; i < cfg.L_sub_list.size(); ++i) {
        const int Ls = cfg.L_sub_list[i];
        tasks.push_back([&, i, Ls] {
            std::vector<ExperimentRecord> rows;
            if (rydberg) {
                const std::vector<cplx> c = rydberg_disorder_curve(psi, Ls, nbar, grid);
                for (std::size_t k = 0; k < grid.size(); ++k)
                    for (int part = 0; part < 2; ++part) {
                        ExperimentRecord r = ctx.base();
                        r.probe = "critical";
                        r.L = L;
                        r.L_sub = Ls;
                        r.theta = grid[k];
                        r.observable = part ? "disorder_im" : "disorder_re";
                        r.value = part ? c[k].imag() : c[k].real();
                        rows.push_back(r);
                    }
                return rows;
            }
            const SubsystemProtocol p = cfg.model.kind == ModelKind::tfim ? ising_subsystem_protocol(L, Ls)
                                                                          : xxz_subsystem_protocol(L, Ls, 1, 1);
            curves[i] = parity_theta_curve(psi, p, grid);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                ExperimentRecord r = ctx.base();
                r.probe = "critical";
                r.L = L;
                r.L_sub = Ls;
                r.theta = grid[k];
                r.observable = "subsystem_parity";
                r.value = curves[i].signal[k];
                r.variance = curves[i].variance[k];
                r.delta_theta = curves[i].delta_theta[k];
                rows.push_back(r);
            }
            windows[i] = window_report(curves[i], Ls);
            window_rows(ctx, rows, windows[i], L, Ls);
            return rows;
        });
    }
    std::vector<ExperimentRecord> out = run_tasks(tasks);
    if (rydberg) return out;
    for (std::size_t i = 0; i + 1 < cfg.L_sub_list.size(); ++i) {
        if (cfg.model.kind != ModelKind::tfim) break;
        ExperimentRecord r = ctx.base();
        r.probe = "critical";
        r.L = L;
        r.L_sub = cfg.L_sub_list[i + 1];
        r.observable = "collapse_distance";
        r.value = collapse_distance(curves[i], cfg.L_sub_list[i], curves[i + 1], cfg.L_sub_list[i + 1]);
        out.push_back(r);
    }
    std::vector<double> xs, tmin, dmin;
    for (std::size_t i = 0; i < windows.size(); ++i)
        if (windows[i].interior_minimum) {
            xs.push_back(cfg.L_sub_list[i]);
            tmin.push_back(windows[i].theta_min);
            dmin.push_back(windows[i].delta_theta_min);
        }
    if (xs.size() >= 3) {
        for (const auto& [name, ys] : {std::pair{"theta_min_fit", tmin}, std::pair{"delta_theta_min_fit", dmin}}) {
            ExperimentRecord r = ctx.base();
            r.probe = "critical";
            r.L = L;
            r.observable = name;
            add_fit(r, fit_power_law(xs, ys));
            out.push_back(r);
        }
    }
    return out;
}

std::vector<ExperimentRecord> hadamard(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const std::vector<double> grid = cfg.theta.values();
    std::vector<Task> tasks;
    for (int L : cfg.L_list)
        tasks.push_back([&ctx, &cfg, &grid, L] {
            std::vector<ExperimentRecord> rows;
            const PureState psi = probe_state(cfg.model, "critical_afm", L);
            const PauliOperator O = PauliOperator::staggered_single(L, 'Z');
            const SymmetryOperator U = SymmetryOperator::translation(L);
            const double q = qfi_pure(psi, O);
            for (double t : grid) {
                ExperimentRecord r = ctx.base();
                r.probe = "critical_afm";
                r.L = L;
                r.theta = t;
                r.observable = "hadamard_cfi";
                r.value = hadamard_fisher(psi, O, U, t);
                r.qfi = q;
                rows.push_back(r);
            }
            ExperimentRecord g = ctx.base();
            g.probe = "critical_afm";
            g.L = L;
            g.observable = "controlled_swaps";
            g.value = hadamard_gate_count(U).controlled_swaps;
            rows.push_back(g);
            return rows;
        });
    std::vector<ExperimentRecord> out = run_tasks(tasks);
    if (cfg.L_list.size() >= 3) {
        for (double t : grid) {
            std::vector<double> xs, ys;
            for (const auto& r : out)
                if (r.observable == "hadamard_cfi" && r.theta == t) {
                    xs.push_back(r.L);
                    ys.push_back(r.value);
                }
            ExperimentRecord r = ctx.base();
            r.probe = "critical_afm";
            r.theta = t;
            r.observable = "hadamard_cfi_fit";
            add_fit(r, fit_power_law(xs, ys));
            out.push_back(r);
        }
    }
    return out;
}

} // namespace

PowerLawFit fit(const std::vector<ExperimentRecord>& records, const std::string& probe, const std::string& observable) {
    std::map<int, double> pts;
    for (const auto& r : records)
        if (r.probe == probe && r.observable == observable && r.L > 0) pts[r.L] = r.value;
    std::vector<double> xs, ys;
    for (const auto& [L, v] : pts) {
        xs.push_back(L);
        ys.push_back(v);
    }
    return fit_power_law(xs, ys);
}

void sort_records(std::vector<ExperimentRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        if (a.L != b.L) return a.L < b.L;
        if (a.theta != b.theta) return a.theta < b.theta;
        return a.p < b.p;
    });
}

std::vector<ExperimentRecord> run(const ExperimentConfig& config) {
    config.validate();
    const Context ctx{config, config_hash(config)};
    std::vector<ExperimentRecord> out;
    switch (config.scenario) {
    case Scenario::qfi_scaling: out = qfi_scaling(ctx); break;
    case Scenario::theta_curves: out = theta_curves(ctx); break;
    case Scenario::channel_sweep: out = channel_sweep(ctx); break;
    case Scenario::deformed: out = deformed(ctx); break;
    case Scenario::subsystem: out = subsystem(ctx); break;
    case Scenario::hadamard: out = hadamard(ctx); break;
    }
    sort_records(out);
    return out;
}

} // namespace critsense
