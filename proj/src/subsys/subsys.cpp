#include "critsense/subsys.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <algorithm>
#include <cmath>

namespace critsense {

namespace {

void check_region(const char* op, int L, int first, int last) {
    if (L < 2) throw DomainError("subsys", op, "L must be >= 2");
    if (first < 0 || last > L - 1 || last < first) throw DomainError("subsys", op, "region does not fit in the chain");
}

// gamma_{j,1} = X_j prod_{i<j} (-Z_i), gamma_{j,2} = Y_j prod_{i<j} (-Z_i)
PauliOperator majorana(int n, int j, int kind) {
    PauliOperator g = PauliOperator::identity(n);
    for (int i = 0; i < j; ++i) g = g * PauliOperator::single(n, i, 'Z', -1.0);
    return g * PauliOperator::single(n, j, kind == 1 ? 'X' : 'Y');
}

int centred_offset(int L, int span) { return (L - span) / 2; }

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2, double* y_at) {
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double a = (d1 - d0) / (x2 - x0);
    if (!(a > 0.0)) {
        *y_at = y1;
        return x1;
    }
    const double b = d0 - a * (x0 + x1);
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    // Newton form through (x0, y0), (x1, y1)
    *y_at = y0 + d0 * (xv - x0) + a * (xv - x0) * (xv - x1);
    return xv;
}

double interp_crossing(double ta, double ya, double tb, double yb, double level, bool log_axis) {
    const double s = (level - ya) / (yb - ya);
    if (log_axis) return std::exp(std::log(ta) + s * (std::log(tb) - std::log(ta)));
    return ta + s * (tb - ta);
}

// Linear interpolation of y(x) on ascending xs in log x.
double interp_log(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    const double u = (std::log(x) - std::log(xs[k - 1])) / (std::log(xs[k]) - std::log(xs[k - 1]));
    return ys[k - 1] + u * (ys[k] - ys[k - 1]);
}

} // namespace

PauliOperator subsystem_parity(int L, int L_sub, int offset) {
    check_region("subsystem_parity", L, offset, offset + L_sub - 1);
    std::vector<std::pair<int, char>> sites;
    for (int j = offset; j < offset + L_sub; ++j) sites.emplace_back(j, 'X');
    PauliOperator p(L);
    p.add(1.0, PauliString::from_sites(L, sites));
    return p;
}

PauliOperator xxz_string_parity(int L, int L_sub, int alpha, int beta, int offset) {
    if ((alpha != 1 && alpha != 2) || (beta != 1 && beta != 2))
        throw DomainError("subsys", "xxz_string_parity", "alpha and beta must be 1 or 2");
    if (L_sub < 1) throw DomainError("subsys", "xxz_string_parity", "L_sub must be >= 1");
    check_region("xxz_string_parity", L, offset, offset + L_sub);
    PauliOperator p = majorana(L, offset, alpha) * majorana(L, offset + L_sub, beta) * cplx(0.0, 1.0);
    p.prune(1e-14);
    return p;
}

void SubsystemProtocol::validate() const {
    if (measurement.n_qubits() != L || imprinter.n_qubits() != L)
        throw DomainError("subsys", "validate", "operators do not match the chain length");
    if (measurement.size() != 1 || std::abs(std::abs(measurement.terms()[0].coeff) - 1.0) > 1e-12 ||
        !measurement.is_hermitian())
        throw DomainError("subsys", "validate", "measurement must be a single Hermitian Pauli string");
    if (!imprinter.is_hermitian()) throw DomainError("subsys", "validate", "imprinter is not Hermitian");
    const PauliString& m = measurement.terms()[0].str;
    for (const auto& t : imprinter.terms())
        if (m.commutes_with(t.str))
            throw DomainError("subsys", "validate", "imprinter term commutes with the measurement");
}

SubsystemProtocol ising_subsystem_protocol(int L, int L_sub, int offset) {
    if (L_sub < 1 || L_sub > L) throw DomainError("subsys", "ising_subsystem_protocol", "L_sub out of range");
    if (offset < 0) offset = centred_offset(L, L_sub);
    SubsystemProtocol p;
    p.L = L;
    p.L_sub = L_sub;
    p.offset = offset;
    p.measurement = subsystem_parity(L, L_sub, offset);
    p.imprinter = PauliOperator(L);
    for (int j = offset; j < offset + L_sub; ++j) p.imprinter.add(0.5, {{j, 'Z'}});
    p.validate();
    return p;
}

SubsystemProtocol xxz_subsystem_protocol(int L, int L_sub, int alpha, int beta, int offset) {
    if (L_sub < 2 || L_sub > L - 1) throw DomainError("subsys", "xxz_subsystem_protocol", "L_sub out of range");
    if (offset < 0) offset = centred_offset(L, L_sub + 1);
    SubsystemProtocol p;
    p.L = L;
    p.L_sub = L_sub;
    p.offset = offset;
    p.measurement = xxz_string_parity(L, L_sub, alpha, beta, offset);
    p.imprinter = PauliOperator(L);
    for (int j = offset + 1; j < offset + L_sub; ++j) p.imprinter.add(0.5, {{j, 'X'}});
    p.validate();
    return p;
}

double parity_expectation_direct(const PureState& psi, const SubsystemProtocol& p, double theta) {
    const PureState st = evolve_phase(psi, p.imprinter, theta);
    return expectation(st, p.measurement).real();
}

double parity_expectation_pullthrough(const PureState& psi, const SubsystemProtocol& p, double theta) {
    const PureState st = evolve_phase(psi, p.imprinter, 2.0 * theta);
    return psi.amplitudes().dot(critsense::apply(p.measurement, st.amplitudes())).real();
}

PrecisionCurve parity_theta_curve(const PureState& psi, const SubsystemProtocol& p, const std::vector<double>& grid) {
    p.validate();
    if (psi.n_qubits() != p.L) throw DomainError("subsys", "parity_theta_curve", "state size mismatch");
    const CompiledOperator meas(p.measurement);
    const CompiledOperator gen(p.imprinter);
    Vec pi_psi;
    meas.apply(psi.amplitudes(), pi_psi);
    PrecisionCurve c;
    for (double t : grid) {
        const Vec v = evolve_phase(psi, p.imprinter, 2.0 * t).amplitudes();
        Vec ov;
        gen.apply(v, ov);
        // <Pi> = <Pi psi | v>, d<Pi>/dtheta = 2i <Pi psi | O v>
        const double mean = pi_psi.dot(v).real();
        const double slope = (cplx(0.0, 2.0) * pi_psi.dot(ov)).real();
        const double var = std::max(0.0, 1.0 - mean * mean);
        c.theta.push_back(t);
        c.signal.push_back(mean);
        c.variance.push_back(var);
        c.delta_theta.push_back(std::abs(slope) < 1e-14 ? std::numeric_limits<double>::infinity()
                                                        : std::sqrt(var) / std::abs(slope));
    }
    c.validate();
    return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("subsys", "log_grid", "invalid grid");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

WindowReport window_report(const PrecisionCurve& curve, int L_sub) {
    curve.validate();
    if (L_sub < 1) throw DomainError("subsys", "window_report", "L_sub must be >= 1");
    const auto& t = curve.theta;
    const auto& y = curve.delta_theta;
    const std::size_t n = t.size();
    if (n < 3) throw DomainError("subsys", "window_report", "need at least three grid points");
    WindowReport r;
    r.sql_reference = 1.0 / std::sqrt(2.0 * L_sub);
    const std::size_t i = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    r.theta_min = t[i];
    r.delta_theta_min = y[i];
    const double margin = 1e-9 * std::abs(y[i]);
    r.interior_minimum = i > 0 && i + 1 < n && std::isfinite(y[i]) && y[0] > y[i] + margin && y[n - 1] > y[i] + margin;
    const bool log_axis = t.front() > 0.0;
    if (r.interior_minimum && std::isfinite(y[i - 1]) && std::isfinite(y[i + 1])) {
        auto u = [&](std::size_t k) { return log_axis ? std::log(t[k]) : t[k]; };
        double ymin = y[i];
        const double uv = parabola_vertex(u(i - 1), y[i - 1], u(i), y[i], u(i + 1), y[i + 1], &ymin);
        r.theta_min = log_axis ? std::exp(uv) : uv;
        r.delta_theta_min = std::min(ymin, y[i]);
    }
    r.has_window = r.delta_theta_min < r.sql_reference;
    if (r.has_window) {
        std::size_t k = i;
        while (k > 0 && y[k - 1] < r.sql_reference) --k;
        r.theta_l = k == 0 ? t[0] : interp_crossing(t[k - 1], y[k - 1], t[k], y[k], r.sql_reference, log_axis);
        k = i;
        while (k + 1 < n && y[k + 1] < r.sql_reference) ++k;
        r.theta_r = k + 1 == n ? t[n - 1] : interp_crossing(t[k], y[k], t[k + 1], y[k + 1], r.sql_reference, log_axis);
    }
    return r;
}

double collapse_distance(const PrecisionCurve& a, int L_a, const PrecisionCurve& b, int L_b, int samples) {
    a.validate();
    b.validate();
    if (samples < 2) throw DomainError("subsys", "collapse_distance", "need at least two samples");
    auto rescale = [](const PrecisionCurve& c, int Ls, std::vector<double>& xs, std::vector<double>& ys) {
        const double sx = std::pow(static_cast<double>(Ls), 7.0 / 8.0);
        const double sy = std::pow(static_cast<double>(Ls), 0.25);
        for (std::size_t k = 0; k < c.theta.size(); ++k) {
            if (!(c.theta[k] > 0.0)) throw DomainError("subsys", "collapse_distance", "theta must be positive");
            xs.push_back(c.theta[k] * sx);
            ys.push_back(c.signal[k] * sy);
        }
    };
    std::vector<double> xa, ya, xb, yb;
    rescale(a, L_a, xa, ya);
    rescale(b, L_b, xb, yb);
    const double lo = std::max(xa.front(), xb.front());
    const double hi = std::min(xa.back(), xb.back());
    if (!(hi > lo)) throw DomainError("subsys", "collapse_distance", "rescaled curves do not overlap");
    double d = 0.0;
    for (double x : log_grid(lo, hi, samples)) d = std::max(d, std::abs(interp_log(xa, ya, x) - interp_log(xb, yb, x)));
    return d;
}

XxzWindowTable xxz_window_scaling(double delta_xxz, const std::vector<int>& L_sub_list, int L,
                                  const std::vector<double>& grid) {
    if (L_sub_list.empty()) throw DomainError("subsys", "xxz_window_scaling", "no subsystem sizes");
    XxzWindowTable tab;
    tab.delta_xxz = delta_xxz;
    tab.K = luttinger_K(delta_xxz);
    tab.window_predicted = tab.K >= 1.5;
    tab.exp_delta_theta_min = -1.0 + 3.0 / (4.0 * tab.K);
    tab.exp_theta_l = -1.5 + 1.0 / tab.K;
    tab.exp_theta_min = -1.0 + 1.0 / (4.0 * tab.K);
    tab.exp_theta_r = -0.5 - 1.0 / (2.0 * tab.K);

    ModelSpec spec;
    spec.kind = ModelKind::xxz;
    spec.L = L;
    spec.delta_xxz = delta_xxz;
    GroundOptions opts;
    opts.compute_gap = false;
    const PureState psi = solve_model(spec, opts).state;
    const std::vector<double> g = grid.empty() ? log_grid(1e-3, 1.0, 256) : grid;

    std::vector<double> xs, tmin, dmin;
    for (int Ls : L_sub_list) {
        const SubsystemProtocol p = xxz_subsystem_protocol(L, Ls, 1, 1);
        const WindowReport rep = window_report(parity_theta_curve(psi, p, g), Ls);
        tab.rows.push_back({Ls, rep});
        if (rep.interior_minimum) {
            xs.push_back(Ls);
            tmin.push_back(rep.theta_min);
            dmin.push_back(rep.delta_theta_min);
        }
    }
    if (xs.size() >= 3) {
        tab.fit_theta_min = fit_power_law(xs, tmin);
        tab.fit_delta_theta_min = fit_power_law(xs, dmin);
    }
    return tab;
}

RydbergDisorderOperator::RydbergDisorderOperator(int L, int j, double mean_occupation) : L_(L), j_(j) {
    if (L < 2 || j < 0 || j >= L) throw DomainError("subsys", "rydberg_disorder_operator", "site out of range");
    if (!(mean_occupation >= 0.0 && mean_occupation <= 1.0))
        throw DomainError("subsys", "rydberg_disorder_operator", "mean occupation outside [0, 1]");
    a_ = std::sqrt(1.0 - mean_occupation);
    b_ = std::sqrt(mean_occupation);
}

Vec RydbergDisorderOperator::apply(const Vec& v) const {
    const std::uint64_t bit = site_bit(L_, j_);
    Vec out = Vec::Zero(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
        const auto u = static_cast<std::uint64_t>(s);
        if (u & bit) continue;
        out[s] = a_ * v[s] - b_ * v[static_cast<Eigen::Index>(u | bit)];
    }
    if (j_ == 0) return out;
    // swaps carry the emptied site j to the left end
    std::vector<int> perm(L_);
    for (int k = 0; k < L_; ++k) perm[k] = k < j_ ? k + 1 : k;
    perm[j_] = 0;
    return permute_sites(out, L_, perm);
}

Vec RydbergDisorderOperator::apply_adjoint(const Vec& v) const {
    Vec w = v;
    if (j_ > 0) {
        std::vector<int> inv(L_);
        for (int k = 0; k < L_; ++k) inv[k] = k <= j_ ? (k == 0 ? j_ : k - 1) : k;
        w = permute_sites(v, L_, inv);
    }
    const std::uint64_t bit = site_bit(L_, j_);
    Vec out = Vec::Zero(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
        const auto u = static_cast<std::uint64_t>(s);
        if (u & bit) continue;
        out[s] = a_ * w[s];
        out[static_cast<Eigen::Index>(u | bit)] = -b_ * w[s];
    }
    return out;
}

RydbergDisorderOperator rydberg_disorder_operator(int L, int j, double mean_occupation) {
    return RydbergDisorderOperator(L, j, mean_occupation);
}

double mean_occupation(const PureState& psi) {
    const int L = psi.n_qubits();
    double s = 0.0;
    for (int j = 0; j < L; ++j) s += 0.5 * (1.0 - expectation(psi, PauliOperator::single(L, j, 'Z')).real());
    return s / L;
}

std::vector<cplx> rydberg_disorder_curve(const PureState& psi, int L_sub, double mean_occ,
                                         const std::vector<double>& grid) {
    const int L = psi.n_qubits();
    if (L_sub < 1 || L_sub > L - 1) throw DomainError("subsys", "rydberg_disorder_curve", "L_sub out of range");
    // (1/2) (-1)^j (n_{j+1} - n_j) = (1/4) (-1)^j (Z_j - Z_{j+1})
    PauliOperator O(L);
    for (int j = 1; j < L_sub; ++j) {
        const double s = (j % 2 ? -0.25 : 0.25);
        O.add(s, {{j, 'Z'}});
        O.add(-s, {{(j + 1) % L, 'Z'}});
    }
    O.prune(1e-14);
    const RydbergDisorderOperator mu0(L, 0, mean_occ), mu(L, L_sub, mean_occ);
    std::vector<cplx> out;
    for (double t : grid) {
        const Vec v = O.size() ? evolve_phase(psi, O, t).amplitudes() : psi.amplitudes();
        out.push_back(mu0.apply(v).dot(mu.apply(v)));
    }
    return out;
}

} // namespace critsense
