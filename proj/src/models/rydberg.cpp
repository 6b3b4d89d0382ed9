#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <bit>
#include <cmath>

namespace critsense {

RydbergPoint rydberg_point(int L, double omega, double detuning, double V1, double V2) {
    if (L % 2 != 0) throw DomainError("models", "rydberg_point", "staggered order parameter needs even L");
    ModelSpec spec;
    spec.kind = ModelKind::rydberg;
    spec.L = L;
    spec.omega = omega;
    spec.delta_ryd = detuning;
    spec.V1 = V1;
    spec.V2 = V2;
    GroundOptions opts;
    opts.compute_gap = false;
    const GroundSolution g = solve_model(spec, opts);
    const RVec M = diagonal_values(PauliOperator::staggered_single(L, 'Z'));
    const Vec& v = g.state.amplitudes();
    double m2 = 0.0, ma = 0.0;
    for (Eigen::Index b = 0; b < v.size(); ++b) {
        const double p = std::norm(v[b]);
        m2 += p * M[b] * M[b];
        ma += p * std::abs(M[b]);
    }
    return {detuning, m2, ma, m2 / std::pow(L, 1.75), (m2 - ma * ma) / L};
}

RydbergCritical locate_rydberg_critical_detuning(double omega, double V1, double V2, const std::vector<int>& L_list,
                                                 double scan_lo, double scan_hi, int scan_points) {
    if (L_list.size() < 2) throw DomainError("models", "locate_rydberg_critical_detuning", "need at least two sizes");
    if (scan_points < 2 || !(scan_hi > scan_lo))
        throw DomainError("models", "locate_rydberg_critical_detuning", "invalid scan window");
    RydbergCritical out{};
    for (std::size_t p = 0; p + 1 < L_list.size(); ++p) {
        const int La = L_list[p], Lb = L_list[p + 1];
        auto f = [&](double d) {
            return rydberg_point(La, omega, d, V1, V2).scaled - rydberg_point(Lb, omega, d, V1, V2).scaled;
        };
        double lo = scan_lo, flo = f(lo), hi = lo;
        bool found = false;
        for (int k = 1; k < scan_points; ++k) {
            hi = scan_lo + (scan_hi - scan_lo) * k / (scan_points - 1);
            const double fhi = f(hi);
            if ((flo < 0) != (fhi < 0)) { found = true; break; }
            lo = hi;
            flo = fhi;
        }
        if (!found)
            throw NumericError("models", "locate_rydberg_critical_detuning", "no crossing found in scan window");
        while (hi - lo > 1e-3 * omega) {
            const double mid = 0.5 * (lo + hi), fm = f(mid);
            if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else { hi = mid; }
        }
        out.pair_crossings.push_back(0.5 * (lo + hi));
        out.bracket_width = hi - lo;
    }
    out.detuning = out.pair_crossings.back();
    return out;
}

} // namespace critsense
