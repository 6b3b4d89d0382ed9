#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace critsense {

namespace {

PauliOperator sector_projector(int n, const Sector& sector) {
    PauliOperator P = PauliOperator::identity(n);
    for (const auto& c : sector) {
        PauliOperator f = PauliOperator::identity(n, 0.5);
        f.add(0.5 * c.eigenvalue, c.op);
        P = P * f;
    }
    return P.prune(1e-15);
}

void check_sector(const PauliOperator& H, const Sector& sector) {
    for (const auto& c : sector) {
        if (c.eigenvalue != 1 && c.eigenvalue != -1)
            throw DomainError("models", "ground_state", "sector eigenvalue must be +1 or -1");
        if (c.op.y_count() % 2 != 0)
            throw DomainError("models", "ground_state", "sector operator must be Hermitian");
        if (!H.commutes_with(c.op))
            throw DomainError("models", "ground_state", "Hamiltonian does not commute with sector operator");
    }
    for (std::size_t a = 0; a < sector.size(); ++a)
        for (std::size_t b = a + 1; b < sector.size(); ++b)
            if (!sector[a].op.commutes_with(sector[b].op))
                throw DomainError("models", "ground_state", "sector operators do not commute");
}

} // namespace

GroundSolution ground_state(const PauliOperator& H, const Sector& sector, const GroundOptions& opts) {
    if (!H.is_hermitian()) throw DomainError("models", "ground_state", "Hamiltonian is not Hermitian");
    check_sector(H, sector);
    const int n = H.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    GroundSolution sol;

    if (dim <= opts.dense_dim) {
        Mat Hm = to_matrix(H);
        if (!sector.empty()) {
            double bound = 1.0;
            for (const auto& t : H.terms()) bound += std::abs(t.coeff);
            const Mat P = to_matrix(sector_projector(n, sector));
            const Mat I = Mat::Identity(Hm.rows(), Hm.cols());
            Hm = P * Hm * P + 2.0 * bound * (I - P);
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(Hm);
        if (es.info() != Eigen::Success) throw NumericError("models", "ground_state", "dense eigensolver failed");
        sol.energy = es.eigenvalues()[0];
        sol.state = PureState(n, es.eigenvectors().col(0), true);
        sol.gap = dim > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : 0.0;
    } else {
        CompiledOperator op(H);
        LinearMap Hmap = [&op](const Vec& in, Vec& out) { op.apply(in, out); };
        LinearMap proj;
        std::optional<CompiledOperator> P;
        if (!sector.empty()) {
            P.emplace(sector_projector(n, sector));
            proj = [&P](const Vec& in, Vec& out) { P->apply(in, out); };
        }
        LanczosOptions lo = opts.lanczos;
        if (dim > (std::size_t{1} << 17)) lo.krylov_dim = std::min(lo.krylov_dim, 40);
        EigenPair g = lanczos_lowest(Hmap, dim, proj, {}, lo);
        sol.energy = g.value;
        sol.state = PureState(n, g.vector, true);
        sol.residual = g.residual;
        if (opts.compute_gap) {
            lo.seed ^= 0x9e37ULL;
            EigenPair e1 = lanczos_lowest(Hmap, dim, proj, {g.vector}, lo);
            sol.gap = e1.value - g.value;
        }
    }

    const Vec Hv = apply(H, sol.state.amplitudes());
    sol.residual = (Hv - sol.energy * sol.state.amplitudes()).norm();
    if (sol.residual > 1e-8) throw NumericError("models", "ground_state", "ground-state residual above 1e-8");
    if (!sector.empty()) sol.parity = sector.front().eigenvalue;
    return sol;
}

Sector default_sector(const ModelSpec& spec) {
    const int n = spec.n_qubits();
    Sector s;
    if (spec.kind == ModelKind::tfim) {
        std::string all(n, 'X');
        s.push_back({PauliString::from_letters(n, all), 1});
    } else if (spec.kind == ModelKind::cluster_ladder) {
        for (int y = 1; y <= 2; ++y) {
            std::string leg(n, 'I');
            for (int j = 0; j < spec.L; ++j) leg[ladder_site(j, y)] = 'X';
            s.push_back({PauliString::from_letters(n, leg), 1});
        }
    }
    return s;
}

GroundSolution solve_model(const ModelSpec& spec, const GroundOptions& opts) {
    const PauliOperator H = build_hamiltonian(spec);
    GroundSolution sol = ground_state(H, default_sector(spec), opts);
    if (spec.boundary == Boundary::periodic && spec.kind != ModelKind::cluster_ladder) {
        const Vec& v = sol.state.amplitudes();
        const cplx t = v.dot(translate_sites(v, spec.n_qubits(), 1));
        if (std::abs(std::abs(t) - 1.0) < 1e-8) sol.momentum_phase = t;
    }
    return sol;
}

} // namespace critsense
