#include "critsense/symmetry.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace critsense {

std::string to_string(SymmetryKind k) {
    switch (k) {
    case SymmetryKind::parity_x: return "parity_x";
    case SymmetryKind::parity_z: return "parity_z";
    case SymmetryKind::translation: return "translation";
    case SymmetryKind::reflection: return "reflection";
    }
    return "?";
}

namespace {

void check_size(int L, const char* op) {
    if (L < 2) throw DomainError("symmetry", op, "L must be >= 2");
    if (L > policy().sparse_cap) throw CapacityError("symmetry", op, "L exceeds the sparse cap");
}

std::uint64_t permute_mask(std::uint64_t m, int n, const std::vector<int>& perm) {
    std::uint64_t out = 0;
    for (int j = 0; j < n; ++j)
        if (m & site_bit(n, j)) out |= site_bit(n, perm[j]);
    return out;
}

std::vector<int> perm_from_swaps(int L, const std::vector<std::pair<int, int>>& swaps) {
    // content labels per site; the rightmost factor acts first
    std::vector<int> at(L);
    for (int j = 0; j < L; ++j) at[j] = j;
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(at[it->first], at[it->second]);
    std::vector<int> perm(L);
    for (int site = 0; site < L; ++site) perm[at[site]] = site;
    return perm;
}

} // namespace

SymmetryOperator SymmetryOperator::parity_x(int L) {
    check_size(L, "build_symmetry");
    SymmetryOperator s;
    s.kind_ = SymmetryKind::parity_x;
    s.L_ = L;
    s.string_ = PauliString{(std::uint64_t{1} << L) - 1, 0};
    return s;
}

SymmetryOperator SymmetryOperator::parity_z(int L) {
    check_size(L, "build_symmetry");
    SymmetryOperator s;
    s.kind_ = SymmetryKind::parity_z;
    s.L_ = L;
    s.string_ = PauliString{0, (std::uint64_t{1} << L) - 1};
    return s;
}

SymmetryOperator SymmetryOperator::translation(int L) {
    check_size(L, "build_symmetry");
    SymmetryOperator s;
    s.kind_ = SymmetryKind::translation;
    s.L_ = L;
    for (int k = 0; k + 1 < L; ++k) s.swaps_.push_back({k, k + 1});
    s.perm_ = perm_from_swaps(L, s.swaps_);
    return s;
}

SymmetryOperator SymmetryOperator::reflection(int L, int center, bool periodic) {
    check_size(L, "build_symmetry");
    if (center < 0 || center >= L || (!periodic && center + 1 >= L))
        throw DomainError("symmetry", "build_symmetry", "reflection center out of range");
    SymmetryOperator s;
    s.kind_ = SymmetryKind::reflection;
    s.L_ = L;
    s.center_ = center;
    s.flag_ = !periodic && L % 2 == 1;
    if (periodic) {
        for (int i = 0; i < L; ++i) {
            const int k = ((2 * center + 1 - i) % L + L) % L;
            if (i < k) s.swaps_.push_back({i, k});
        }
    } else {
        for (int k = 0; center - k >= 0 && center + 1 + k < L; ++k) s.swaps_.push_back({center - k, center + 1 + k});
    }
    s.perm_ = perm_from_swaps(L, s.swaps_);
    return s;
}

Vec SymmetryOperator::apply(const Vec& v) const {
    if (kind_ == SymmetryKind::parity_x || kind_ == SymmetryKind::parity_z) {
        PauliOperator P(L_);
        P.add(1.0, string_);
        return critsense::apply(P, v);
    }
    return permute_sites(v, L_, perm_);
}

Vec SymmetryOperator::apply_adjoint(const Vec& v) const {
    if (kind_ != SymmetryKind::translation) return apply(v);
    std::vector<int> inv(L_);
    for (int j = 0; j < L_; ++j) inv[perm_[j]] = j;
    return permute_sites(v, L_, inv);
}

Mat SymmetryOperator::matrix() const {
    if (L_ > policy().dense_cap) throw CapacityError("symmetry", "matrix", "L exceeds the dense cap");
    const Eigen::Index dim = Eigen::Index{1} << L_;
    Mat m(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) m.col(c) = apply(PureState::basis(L_, c).amplitudes());
    return m;
}

PauliOperator SymmetryOperator::conjugate(const PauliOperator& O) const {
    if (O.n_qubits() != L_) throw DomainError("symmetry", "conjugate", "size mismatch");
    PauliOperator out(L_);
    for (const auto& t : O.terms()) {
        switch (kind_) {
        case SymmetryKind::parity_x:
            out.add(std::popcount(t.str.z) % 2 ? -t.coeff : t.coeff, t.str);
            break;
        case SymmetryKind::parity_z:
            out.add(std::popcount(t.str.x) % 2 ? -t.coeff : t.coeff, t.str);
            break;
        default:
            out.add(t.coeff, PauliString{permute_mask(t.str.x, L_, perm_), permute_mask(t.str.z, L_, perm_)});
        }
    }
    return out;
}

bool anticommutes(const SymmetryOperator& A, const PauliOperator& O) {
    if (A.n_qubits() != O.n_qubits()) throw DomainError("symmetry", "anticommutes", "size mismatch");
    PauliOperator d = A.conjugate(O) + O;
    d.prune(1e-10);
    return d.size() == 0;
}

SymmetryEigen symmetry_eigenvalue(const PureState& psi, const SymmetryOperator& A) {
    const Vec Av = A.apply(psi.amplitudes());
    const cplx s = psi.amplitudes().dot(Av);
    const double res = (Av - s * psi.amplitudes()).norm();
    return {res < 1e-8, s.real(), s};
}

PauliOperator rydberg_order_parameter(int L) {
    if (L < 3) throw DomainError("symmetry", "rydberg_order_parameter", "L must be >= 3");
    PauliOperator O(L);
    for (int j = 0; j < L; ++j) {
        const double sign = j % 2 ? -1.0 : 1.0;
        const int k = (j + 1) % L;
        // n_k - n_j = (Z_j - Z_k) / 2
        O.add(0.5 * sign, {{j, 'Z'}});
        O.add(-0.5 * sign, {{k, 'Z'}});
    }
    O.prune(1e-14);
    return O;
}

GateCount hadamard_gate_count(const SymmetryOperator& U) {
    GateCount g;
    if (U.kind() == SymmetryKind::parity_x || U.kind() == SymmetryKind::parity_z) {
        g.controlled_x = U.n_qubits();
    } else {
        g.controlled_swaps = static_cast<int>(U.swaps().size());
        g.toffolis = 3 * g.controlled_swaps;
    }
    return g;
}

HadamardTestResult hadamard_test(const PureState& psi, const SymmetryOperator& U) {
    if (psi.n_qubits() != U.n_qubits()) throw DomainError("symmetry", "hadamard_test", "size mismatch");
    const Vec& v = psi.amplitudes();
    const Vec Uv = U.apply(v);
    if (std::abs(Uv.norm() - 1.0) > 1e-10) throw DomainError("symmetry", "hadamard_test", "U is not unitary");
    const Eigen::Index dim = v.size();
    // ancilla |+>, controlled-U, then H (or S^dag H for the imaginary part) on the ancilla
    Vec doubled(2 * dim);
    doubled.head(dim) = v / std::sqrt(2.0);
    doubled.tail(dim) = Uv / std::sqrt(2.0);
    auto measure = [&](cplx ancilla_phase) {
        const Vec a0 = (doubled.head(dim) + ancilla_phase * doubled.tail(dim)) / std::sqrt(2.0);
        return a0.squaredNorm();
    };
    HadamardTestResult r;
    r.p_plus = measure(1.0);
    r.p_minus = 1.0 - r.p_plus;
    r.re_T = 2.0 * r.p_plus - 1.0;
    r.im_T = 2.0 * measure(cplx(0.0, -1.0)) - 1.0;
    r.gates = hadamard_gate_count(U);
    return r;
}

std::vector<Effect> hadamard_povm(const SymmetryOperator& U) {
    auto make = [U](double sign) {
        return [U, sign](const Vec& v) {
            const Vec sym = 0.5 * (U.apply(v) + U.apply_adjoint(v));
            return Vec(0.5 * (v + sign * sym));
        };
    };
    return {{make(+1.0), "+1"}, {make(-1.0), "-1"}};
}

double hadamard_fisher(const PureState& psi, const PauliOperator& O, const SymmetryOperator& U, double theta) {
    return classical_fisher(hadamard_povm(U), imprint_family(psi, O), theta);
}

SymmetryCurves symmetry_curves(int L, const std::vector<double>& theta) {
    if (L % 2 != 0) throw DomainError("symmetry", "symmetry_curves", "L must be even");
    const PureState fm = critical_fm_state(L);
    const PureState afm = critical_afm_state(L);
    const PauliOperator Oz = PauliOperator::sum_single(L, 'Z');
    const PauliOperator Os = PauliOperator::staggered_single(L, 'Z');
    const SymmetryOperator P = SymmetryOperator::parity_x(L);
    const SymmetryOperator R = SymmetryOperator::reflection(L, L / 2 - 1);
    const SymmetryOperator T = SymmetryOperator::translation(L);

    SymmetryCurves c;
    c.theta = theta;
    c.s_parity = symmetry_eigenvalue(fm, P).s;
    c.s_reflection = symmetry_eigenvalue(afm, R).s;
    c.s_translation = symmetry_eigenvalue(afm, T).s;
    for (double t : theta) {
        const Vec f = evolve_phase(fm, Oz, t).amplitudes();
        const Vec a = evolve_phase(afm, Os, t).amplitudes();
        c.parity.push_back(f.dot(P.apply(f)).real() / c.s_parity);
        c.reflection.push_back(a.dot(R.apply(a)).real() / c.s_reflection);
        c.translation.push_back(a.dot(T.apply(a)).real() / c.s_translation);
    }
    return c;
}

double curve_collapse_deviation(const SymmetryCurves& c, double floor) {
    double worst = 0.0;
    auto cmp = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
            worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
        }
    };
    cmp(c.parity, c.reflection);
    cmp(c.parity, c.translation);
    cmp(c.reflection, c.translation);
    return worst;
}

} // namespace critsense
