#include "critsense/state.hpp"
#include "critsense/policy.hpp"
#include "critsense/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>

namespace critsense {

namespace {

void check_qubits(int n, std::size_t len, const char* op) {
    if (n < 1) throw DomainError("qcore", op, "n_qubits must be >= 1");
    if (n > policy().sparse_cap) throw CapacityError("qcore", op, "qubit count exceeds sparse cap");
    if (len != (std::size_t{1} << n)) throw DomainError("qcore", op, "length does not match 2^n");
}

void check_match(int a, int b, const char* op) {
    if (a != b) throw DomainError("qcore", op, "dimension mismatch");
}

void require_hermitian(const PauliOperator& op, const char* name) {
    if (!op.is_hermitian()) throw DomainError("qcore", name, "operator is not Hermitian");
}

// Maps (kept bits, traced bits) back to a full basis index.
struct SiteSplit {
    std::vector<int> kept_pos;   // bit positions of kept sites, most significant first
    std::vector<int> traced_pos;

    SiteSplit(int n, std::vector<int> kept) {
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        std::vector<bool> is_kept(n, false);
        for (int s : kept) {
            if (s < 0 || s >= n) throw DomainError("qcore", "partial_trace", "kept site out of range");
            is_kept[s] = true;
        }
        for (int j = 0; j < n; ++j) (is_kept[j] ? kept_pos : traced_pos).push_back(n - 1 - j);
    }

    std::uint64_t full(std::uint64_t k, std::uint64_t t) const {
        std::uint64_t r = 0;
        const int nk = static_cast<int>(kept_pos.size()), nt = static_cast<int>(traced_pos.size());
        for (int i = 0; i < nk; ++i)
            if (k >> (nk - 1 - i) & 1) r |= std::uint64_t{1} << kept_pos[i];
        for (int i = 0; i < nt; ++i)
            if (t >> (nt - 1 - i) & 1) r |= std::uint64_t{1} << traced_pos[i];
        return r;
    }
};

} // namespace

PureState::PureState(int n, Vec amplitudes, bool normalize) : n_(n), amp_(std::move(amplitudes)) {
    check_qubits(n, static_cast<std::size_t>(amp_.size()), "PureState");
    const double nrm = amp_.norm();
    if (normalize) {
        if (nrm == 0.0) throw DomainError("qcore", "PureState", "zero vector cannot be normalized");
        amp_ /= nrm;
    } else if (std::abs(nrm - 1.0) > policy().norm_tol) {
        throw DomainError("qcore", "PureState", "state is not normalized");
    }
}

PureState PureState::basis(int n, std::uint64_t index) {
    Vec v = Vec::Zero(Eigen::Index{1} << n);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return PureState(n, std::move(v));
}

PureState PureState::product(int n, cplx a, cplx b) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const int ones = std::popcount(static_cast<std::uint64_t>(i));
        v[i] = std::pow(a, n - ones) * std::pow(b, ones);
    }
    return PureState(n, std::move(v), true);
}

MixedState::MixedState(int n, Mat rho) : n_(n), rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) throw DomainError("qcore", "MixedState", "matrix is not square");
    check_qubits(n, static_cast<std::size_t>(rho_.rows()), "MixedState");
    if (n > policy().dense_cap) throw CapacityError("qcore", "MixedState", "qubit count exceeds dense cap");
    const double herr = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herr > policy().hermitian_tol) throw DomainError("qcore", "MixedState", "matrix is not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0)) > policy().trace_tol)
        throw DomainError("qcore", "MixedState", "trace differs from 1");
}

MixedState MixedState::from_pure(const PureState& psi) {
    return MixedState(psi.n_qubits(), psi.amplitudes() * psi.amplitudes().adjoint());
}

const Spectrum& MixedState::spectrum() const {
    std::call_once(cache_->once, [this] {
        Eigen::SelfAdjointEigenSolver<Mat> es(rho_);
        if (es.info() != Eigen::Success)
            throw NumericError("qcore", "spectrum", "eigen-decomposition failed");
        cache_->spec.values = es.eigenvalues();
        cache_->spec.vectors = es.eigenvectors();
    });
    if (cache_->spec.values.size() > 0 && cache_->spec.values[0] < -policy().psd_tol)
        throw DomainError("qcore", "spectrum", "density matrix has a negative eigenvalue");
    return cache_->spec;
}

bool MixedState::has_spectrum() const { return cache_->spec.values.size() > 0; }

double MixedState::purity() const { return rho_.cwiseAbs2().sum(); }

cplx expectation(const PureState& psi, const PauliOperator& op) {
    check_match(psi.n_qubits(), op.n_qubits(), "expectation");
    const Vec& v = psi.amplitudes();
    cplx total = 0.0;
    for (const auto& t : op.terms()) {
        const PauliString s = t.str;
        total += t.coeff * chunked_sum<cplx>(psi.dim(), [&](std::size_t b) {
            return std::conj(v[static_cast<Eigen::Index>(b ^ s.x)]) * s.phase(b) * v[static_cast<Eigen::Index>(b)];
        });
    }
    return total;
}

cplx expectation_serial(const PureState& psi, const PauliOperator& op) {
    check_match(psi.n_qubits(), op.n_qubits(), "expectation");
    return psi.amplitudes().dot(apply_serial(op, psi.amplitudes()));
}

cplx expectation(const MixedState& rho, const PauliOperator& op) {
    check_match(rho.n_qubits(), op.n_qubits(), "expectation");
    const Mat& m = rho.matrix();
    cplx total = 0.0;
    for (const auto& t : op.terms()) {
        const PauliString s = t.str;
        total += t.coeff * chunked_sum<cplx>(rho.dim(), [&](std::size_t b) {
            return s.phase(b) * m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ s.x));
        });
    }
    return total;
}

double variance(const PureState& psi, const PauliOperator& op) {
    require_hermitian(op, "variance");
    check_match(psi.n_qubits(), op.n_qubits(), "variance");
    const Vec w = apply(op, psi.amplitudes());
    const double mean = psi.amplitudes().dot(w).real();
    return w.squaredNorm() - mean * mean;
}

double variance(const MixedState& rho, const PauliOperator& op) {
    require_hermitian(op, "variance");
    const double mean = expectation(rho, op).real();
    return expectation(rho, op * op).real() - mean * mean;
}

PureState evolve_phase(const PureState& psi, const PauliOperator& O, double theta) {
    require_hermitian(O, "evolve_phase");
    check_match(psi.n_qubits(), O.n_qubits(), "evolve_phase");
    const int n = psi.n_qubits();
    if (theta == 0.0) return psi;
    Vec v = psi.amplitudes();
    const std::int64_t dim = static_cast<std::int64_t>(psi.dim());

    if (O.is_diagonal()) {
        const RVec d = diagonal_values(O);
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < dim; ++b) v[b] *= std::polar(1.0, theta * d[b]);
        return PureState(n, std::move(v), true);
    }

    if (O.is_single_site_sum()) {
        std::vector<double> cx(n, 0.0), cy(n, 0.0), cz(n, 0.0);
        double c0 = 0.0;
        for (const auto& t : O.terms()) {
            const double c = t.coeff.real();
            if (t.str.weight() == 0) { c0 += c; continue; }
            for (int j = 0; j < n; ++j) {
                switch (t.str.letter(n, j)) {
                case 'X': cx[j] += c; break;
                case 'Y': cy[j] += c; break;
                case 'Z': cz[j] += c; break;
                default: break;
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            const double r = std::sqrt(cx[j] * cx[j] + cy[j] * cy[j] + cz[j] * cz[j]);
            if (r == 0.0) continue;
            // exp(i theta r n.sigma) = cos(theta r) + i sin(theta r) n.sigma
            const double c = std::cos(theta * r), s = std::sin(theta * r) / r;
            const cplx I(0.0, 1.0);
            const cplx u00 = c + I * s * cz[j], u11 = c - I * s * cz[j];
            const cplx u01 = I * s * cplx(cx[j], -cy[j]), u10 = I * s * cplx(cx[j], cy[j]);
            const std::uint64_t bit = site_bit(n, j);
#pragma omp parallel for schedule(static)
            for (std::int64_t b = 0; b < dim; ++b) {
                if (static_cast<std::uint64_t>(b) & bit) continue;
                const std::int64_t b1 = b | static_cast<std::int64_t>(bit);
                const cplx a0 = v[b], a1 = v[b1];
                v[b] = u00 * a0 + u01 * a1;
                v[b1] = u10 * a0 + u11 * a1;
            }
        }
        v *= std::polar(1.0, theta * c0);
        return PureState(n, std::move(v), true);
    }

    double bound = 0.0;
    for (const auto& t : O.terms()) bound += std::abs(t.coeff);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(theta) * bound)));
    const cplx step(0.0, theta / steps);
    CompiledOperator op(O);
    Vec term, next;
    for (int s = 0; s < steps; ++s) {
        Vec acc = v;
        term = v;
        for (int k = 1; k < 60; ++k) {
            op.apply(term, next);
            term = next * (step / static_cast<double>(k));
            acc += term;
            if (term.norm() < 1e-17 * acc.norm()) break;
        }
        v = acc;
    }
    return PureState(n, std::move(v), true);
}

Vec apply_operator(const PauliOperator& op, const PureState& psi) {
    check_match(psi.n_qubits(), op.n_qubits(), "apply_operator");
    return apply(op, psi.amplitudes());
}

PureState dephase_normalize(const Vec& v, int n) {
    if (v.norm() == 0.0) throw DomainError("qcore", "dephase_normalize", "zero-norm input");
    return PureState(n, v, true);
}

MixedState partial_trace(const MixedState& rho, const std::vector<int>& kept_sites) {
    const int n = rho.n_qubits();
    SiteSplit split(n, kept_sites);
    const int nk = static_cast<int>(split.kept_pos.size());
    const std::uint64_t dk = std::uint64_t{1} << nk, dt = std::uint64_t{1} << (n - nk);
    Mat out = Mat::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    const Mat& m = rho.matrix();
    for (std::uint64_t a = 0; a < dk; ++a)
        for (std::uint64_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::uint64_t t = 0; t < dt; ++t)
                acc += m(static_cast<Eigen::Index>(split.full(a, t)), static_cast<Eigen::Index>(split.full(b, t)));
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    return MixedState(nk, std::move(out));
}

MixedState partial_trace(const PureState& psi, const std::vector<int>& kept_sites) {
    const int n = psi.n_qubits();
    SiteSplit split(n, kept_sites);
    const int nk = static_cast<int>(split.kept_pos.size());
    const std::uint64_t dk = std::uint64_t{1} << nk, dt = std::uint64_t{1} << (n - nk);
    Mat M(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dt));
    for (std::uint64_t a = 0; a < dk; ++a)
        for (std::uint64_t t = 0; t < dt; ++t)
            M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = psi[split.full(a, t)];
    Mat r = M * M.adjoint();
    r = 0.5 * (r + r.adjoint()).eval();
    return MixedState(nk, std::move(r));
}

PureState random_state(int n, std::uint64_t seed) {
    CounterRng rng(seed);
    Vec v(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(rng.normal(), rng.normal());
    return PureState(n, std::move(v), true);
}

MixedState random_mixed_state(int n, std::uint64_t seed, int rank) {
    CounterRng rng(seed);
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Eigen::Index r = rank > 0 ? rank : dim;
    Mat g(dim, r);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < r; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return MixedState(n, std::move(rho));
}

} // namespace critsense
