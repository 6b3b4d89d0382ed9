#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <numbers>

namespace critsense {

PureState ghz_state(int L) {
    if (L < 1) throw DomainError("models", "ghz_state", "L must be >= 1");
    Vec v = Vec::Zero(Eigen::Index{1} << L);
    v[0] = v[v.size() - 1] = 1.0 / std::sqrt(2.0);
    return PureState(L, std::move(v), true);
}

PureState spin_coherent_state(int L) {
    if (L < 1) throw DomainError("models", "spin_coherent_state", "L must be >= 1");
    return PureState::product(L, 1.0, 1.0);
}

PureState oat_squeezed_state(int L, double twist_time) {
    if (twist_time < 0.0) throw DomainError("models", "oat_squeezed_state", "twist time must be >= 0");
    PureState sc = spin_coherent_state(L);
    Vec v = sc.amplitudes();
    for (Eigen::Index b = 0; b < v.size(); ++b) {
        const double m = L - 2.0 * std::popcount(static_cast<std::uint64_t>(b));
        v[b] *= std::polar(1.0, -twist_time * m * m / 4.0);
    }
    return PureState(L, std::move(v), true);
}

namespace {

struct TransverseMoments {
    double sx;
    Eigen::Matrix2d cov; // covariance of (S_y, S_z)
};

TransverseMoments transverse_moments(const PureState& psi) {
    const int L = psi.n_qubits();
    const PauliOperator Sx = PauliOperator::sum_single(L, 'X', 0.5);
    const PauliOperator Sy = PauliOperator::sum_single(L, 'Y', 0.5);
    const PauliOperator Sz = PauliOperator::sum_single(L, 'Z', 0.5);
    TransverseMoments m;
    m.sx = expectation(psi, Sx).real();
    const double my = expectation(psi, Sy).real(), mz = expectation(psi, Sz).real();
    m.cov(0, 0) = expectation(psi, Sy * Sy).real() - my * my;
    m.cov(1, 1) = expectation(psi, Sz * Sz).real() - mz * mz;
    m.cov(0, 1) = m.cov(1, 0) = 0.5 * expectation(psi, Sy * Sz + Sz * Sy).real() - my * mz;
    return m;
}

double squeezing(int L, double t) {
    const TransverseMoments m = transverse_moments(oat_squeezed_state(L, t));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m.cov);
    return L * es.eigenvalues()[0] / (m.sx * m.sx);
}

double aligning_rotation(const PureState& psi) {
    const TransverseMoments m = transverse_moments(psi);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m.cov);
    const Eigen::Vector2d e = es.eigenvectors().col(1);
    // e^{-i a S_x} maps S_z to cos(a) S_z + sin(a) S_y in the Heisenberg picture
    return std::atan2(e[0], e[1]);
}

} // namespace

OatOptimum oat_optimal_twist(int L, int grid) {
    if (L < 2) throw DomainError("models", "oat_optimal_twist", "L must be >= 2");
    const double t_max = std::numbers::pi / 4.0;
    double best_t = t_max / grid, best = squeezing(L, best_t);
    for (int k = 2; k <= grid; ++k) {
        const double t = t_max * k / grid;
        const double xi = squeezing(L, t);
        if (xi < best) { best = xi; best_t = t; }
    }
    // golden-section refinement inside the neighbouring grid cells
    double a = std::max(1e-9, best_t - t_max / grid), b = std::min(t_max, best_t + t_max / grid);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (squeezing(L, c) < squeezing(L, d)) b = d; else a = c;
    }
    OatOptimum o;
    o.twist_time = 0.5 * (a + b);
    o.squeezing = squeezing(L, o.twist_time);
    const PureState aligned = oat_aligned_state(L, o.twist_time);
    o.rotation = aligning_rotation(oat_squeezed_state(L, o.twist_time));
    o.qfi = 4.0 * variance(aligned, PauliOperator::sum_single(L, 'Z'));
    return o;
}

PureState oat_aligned_state(int L, double twist_time) {
    const PureState psi = oat_squeezed_state(L, twist_time);
    const double a = aligning_rotation(psi);
    const PauliOperator Sz = PauliOperator::sum_single(L, 'Z');
    const PauliOperator Sx = PauliOperator::sum_single(L, 'X', 0.5);
    const PureState p1 = evolve_phase(psi, Sx, -a), p2 = evolve_phase(psi, Sx, a);
    return variance(p1, Sz) >= variance(p2, Sz) ? p1 : p2;
}

PureState critical_fm_state(int L) {
    ModelSpec spec;
    spec.kind = ModelKind::tfim;
    spec.L = L;
    GroundOptions opts;
    opts.compute_gap = false;
    return solve_model(spec, opts).state;
}

PureState critical_afm_state(int L) {
    if (L % 2 != 0) throw DomainError("models", "critical_afm_state", "antiferromagnetic probe requires even L");
    const PureState fm = critical_fm_state(L);
    PauliOperator U(L);
    std::vector<std::pair<int, char>> odd;
    for (int j = 1; j < L; j += 2) odd.push_back({j, 'X'});
    U.add(1.0, PauliString::from_sites(L, odd));
    return PureState(L, critsense::apply(U, fm.amplitudes()), true);
}

} // namespace critsense
