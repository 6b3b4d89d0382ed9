#include "critsense/metrology.hpp"
#include "critsense/policy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace critsense {

std::string to_string(QfiMethod m) {
    switch (m) {
    case QfiMethod::pure_variance: return "pure_variance";
    case QfiMethod::mixed_spectral: return "mixed_spectral";
    case QfiMethod::formula_bitflip: return "formula_bitflip";
    case QfiMethod::lower_bound_Fn: return "lower_bound_Fn";
    case QfiMethod::outcome_averaged: return "outcome_averaged";
    }
    return "?";
}

double qfi_pure(const PureState& psi, const PauliOperator& O) { return 4.0 * variance(psi, O); }

namespace {

// 2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |Ob_ij|^2 over pairs with l_i + l_j > cutoff.
double spectral_sum(const RVec& lam, const Mat& Ob, double cutoff) {
    const Eigen::Index d = lam.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double s = lam[i] + lam[j];
            if (s <= cutoff) continue;
            const double diff = lam[i] - lam[j];
            total += 4.0 * diff * diff / s * std::norm(Ob(i, j));
        }
    return total;
}

Mat apply_columns(const PauliOperator& O, const Mat& V) {
    CompiledOperator op(O);
    Mat out(V.rows(), V.cols());
    Vec col;
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        op.apply(V.col(c), col);
        out.col(c) = col;
    }
    return out;
}

void check_inputs(const MixedState& rho, const PauliOperator& O, const char* op) {
    if (rho.n_qubits() != O.n_qubits()) throw DomainError("metrology", op, "dimension mismatch");
    if (!O.is_hermitian()) throw DomainError("metrology", op, "generator is not Hermitian");
}

bool translation_invariant(const PauliOperator& O) {
    PauliOperator d = O.translated(1) - O;
    d.prune(1e-12);
    return d.size() == 0;
}

std::uint64_t rotate_site(std::uint64_t b, int n) { return (b >> 1) | ((b & 1ULL) << (n - 1)); }

bool translation_invariant(const Mat& rho, int n) {
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index a = 0; a < dim; ++a) {
        const Eigen::Index ra = static_cast<Eigen::Index>(rotate_site(static_cast<std::uint64_t>(a), n));
        for (Eigen::Index b = 0; b < dim; ++b) {
            const Eigen::Index rb = static_cast<Eigen::Index>(rotate_site(static_cast<std::uint64_t>(b), n));
            if (std::abs(rho(ra, rb) - rho(a, b)) > 1e-10) return false;
        }
    }
    return true;
}

} // namespace

QfiReport qfi_mixed_dense(const MixedState& rho, const PauliOperator& O, double cutoff) {
    check_inputs(rho, O, "qfi_mixed");
    const Spectrum& sp = rho.spectrum();
    const Mat Ob = sp.vectors.adjoint() * apply_columns(O, sp.vectors);
    return {spectral_sum(sp.values, Ob, cutoff), QfiMethod::mixed_spectral, cutoff, "dense"};
}

namespace {

QfiReport qfi_support(const MixedState& rho, const PauliOperator& O, double cutoff) {
    const Mat& m = rho.matrix();
    const Eigen::Index dim = m.rows();
    std::vector<Eigen::Index> support;
    std::vector<bool> in_support(dim, false);
    for (Eigen::Index a = 0; a < dim; ++a)
        if (m(a, a).real() > 0.0) {
            support.push_back(a);
            in_support[a] = true;
        }
    const Eigen::Index s = static_cast<Eigen::Index>(support.size());
    Mat block(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) block(i, j) = m(support[i], support[j]);
    Eigen::SelfAdjointEigenSolver<Mat> es(block);
    if (es.info() != Eigen::Success) throw NumericError("metrology", "qfi_mixed", "eigen-decomposition failed");
    const RVec lam = es.eigenvalues();
    if (s > 0 && lam[0] < -policy().psd_tol)
        throw DomainError("metrology", "qfi_mixed", "density matrix has a negative eigenvalue");
    Mat V = Mat::Zero(dim, s);
    for (Eigen::Index i = 0; i < s; ++i) V.row(support[i]) = es.eigenvectors().row(i);
    const Mat OV = apply_columns(O, V);
    const Mat Ob = V.adjoint() * OV;
    double total = spectral_sum(lam, Ob, cutoff);
    // pairs with basis states outside the support (eigenvalue exactly zero)
    for (Eigen::Index i = 0; i < s; ++i) {
        if (lam[i] <= cutoff) continue;
        double leak = 0.0;
        for (Eigen::Index b = 0; b < dim; ++b)
            if (!in_support[b]) leak += std::norm(OV(b, i));
        total += 4.0 * lam[i] * leak;
    }
    return {total, QfiMethod::mixed_spectral, cutoff, "support"};
}

} // namespace

QfiReport qfi_mixed_momentum(const MixedState& rho, const PauliOperator& O, double cutoff) {
    check_inputs(rho, O, "qfi_mixed");
    const int n = rho.n_qubits();
    const Mat& m = rho.matrix();
    if (!translation_invariant(O)) throw DomainError("metrology", "qfi_mixed", "generator is not translation invariant");
    if (!translation_invariant(m, n)) throw DomainError("metrology", "qfi_mixed", "state is not translation invariant");

    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<int> orbit_of(dim, -1), shift_of(dim, 0);
    std::vector<std::uint64_t> reps;
    std::vector<int> period;
    for (std::uint64_t b = 0; b < dim; ++b) {
        if (orbit_of[b] >= 0) continue;
        const int id = static_cast<int>(reps.size());
        std::uint64_t e = b;
        int t = 0;
        do {
            orbit_of[e] = id;
            shift_of[e] = t++;
            e = rotate_site(e, n);
        } while (e != b);
        reps.push_back(b);
        period.push_back(t);
    }
    const int n_orb = static_cast<int>(reps.size());

    double total = 0.0;
    for (int mk = 0; mk < n; ++mk) {
        const double k = 2.0 * std::numbers::pi * mk / n;
        std::vector<int> members, index(n_orb, -1);
        for (int o = 0; o < n_orb; ++o)
            if ((mk * period[o]) % n == 0) {
                index[o] = static_cast<int>(members.size());
                members.push_back(o);
            }
        const Eigen::Index d = static_cast<Eigen::Index>(members.size());
        if (d == 0) continue;
        Mat rk = Mat::Zero(d, d), ok = Mat::Zero(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            const int oa = members[a];
            const std::uint64_t e0 = reps[oa];
            for (std::uint64_t b = 0; b < dim; ++b) {
                const int ob = index[orbit_of[b]];
                if (ob < 0) continue;
                const cplx w = std::sqrt(double(period[oa]) / period[members[ob]]) *
                               std::polar(1.0, -k * shift_of[b]);
                rk(a, ob) += w * m(static_cast<Eigen::Index>(e0), static_cast<Eigen::Index>(b));
            }
            for (const auto& t : O.terms()) {
                const std::uint64_t b = e0 ^ t.str.x;
                const int ob = index[orbit_of[b]];
                if (ob < 0) continue;
                const cplx w = std::sqrt(double(period[oa]) / period[members[ob]]) *
                               std::polar(1.0, -k * shift_of[b]);
                ok(a, ob) += w * t.coeff * t.str.phase(b);
            }
        }
        rk = 0.5 * (rk + rk.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(rk);
        if (es.info() != Eigen::Success) throw NumericError("metrology", "qfi_mixed", "block eigen-decomposition failed");
        if (es.eigenvalues()[0] < -policy().psd_tol)
            throw DomainError("metrology", "qfi_mixed", "density matrix has a negative eigenvalue");
        const Mat Ob = es.eigenvectors().adjoint() * ok * es.eigenvectors();
        total += spectral_sum(es.eigenvalues(), Ob, cutoff);
    }
    return {total, QfiMethod::mixed_spectral, cutoff, "momentum_blocks"};
}

QfiReport qfi_mixed(const MixedState& rho, const PauliOperator& O, double cutoff) {
    check_inputs(rho, O, "qfi_mixed");
    const Mat& m = rho.matrix();
    const Eigen::Index dim = m.rows();
    Eigen::Index support = 0;
    for (Eigen::Index a = 0; a < dim; ++a)
        if (m(a, a).real() > 0.0) ++support;
    if (support <= 2048 || support <= dim / 2) return qfi_support(rho, O, cutoff);
    if (translation_invariant(O) && translation_invariant(m, rho.n_qubits()))
        return qfi_mixed_momentum(rho, O, cutoff);
    return qfi_mixed_dense(rho, O, cutoff);
}

Mat unitary_family_derivative(const Mat& rho, const PauliOperator& O) {
    const Mat Orho = apply_columns(O, rho);
    // rho O = (O rho)^dag for Hermitian rho and O
    const cplx I(0.0, 1.0);
    return I * (Orho - Orho.adjoint());
}

Mat sld(const MixedState& rho, const Mat& drho, double cutoff) {
    const Spectrum& sp = rho.spectrum();
    const Mat d = sp.vectors.adjoint() * drho * sp.vectors;
    Mat L = Mat::Zero(d.rows(), d.cols());
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            const double s = sp.values[i] + sp.values[j];
            if (s > cutoff) L(i, j) = 2.0 * d(i, j) / s;
        }
    return sp.vectors * L * sp.vectors.adjoint();
}

Mat optimal_observable(const MixedState& rho, const Mat& drho, double theta, double F_Q, double cutoff) {
    if (!(F_Q > 0.0)) throw DomainError("metrology", "optimal_observable", "QFI must be positive");
    const Mat L = sld(rho, drho, cutoff);
    return theta * Mat::Identity(L.rows(), L.cols()) + L / F_Q;
}

} // namespace critsense
