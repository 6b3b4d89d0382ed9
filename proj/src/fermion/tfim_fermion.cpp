#include "critsense/fermion.hpp"
#include "critsense/policy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace critsense {

namespace {

constexpr int kMaxFermionL = 4096;
constexpr int kMaxDenseFermionL = 512;

// Pfaffian of a real antisymmetric matrix by pivoted Parlett-Reid elimination.
double pfaffian(RMat A) {
    const Eigen::Index n = A.rows();
    if (n % 2) return 0.0;
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index kp;
        A.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
        kp += k + 1;
        if (kp != k + 1) {
            A.row(k + 1).swap(A.row(kp));
            A.col(k + 1).swap(A.col(kp));
            pf = -pf;
        }
        if (A(k + 1, k) == 0.0) return 0.0;
        pf *= A(k, k + 1);
        if (k + 2 < n) {
            const Eigen::Index m = n - k - 2;
            const RVec tau = A.row(k).tail(m).transpose() / A(k, k + 1);
            const RVec col = A.col(k + 1).tail(m);
            A.bottomRightCorner(m, m) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

// <i b_j a_{j+d}> on the periodic chain, prod X = +1 sector.
double periodic_string_entry(int L, double J, double h, int d) {
    double s = 0.0;
    for (int m = 0; m < L; ++m) {
        const double q = 2.0 * std::numbers::pi * (m + 0.5) / L;
        s += (J * std::cos(q * (d - 1)) - h * std::cos(q * d)) / (0.5 * tfim_dispersion(J, h, q));
    }
    return s / L;
}

double thermodynamic_string_entry(double J, double h, int d) {
    // Re(e^{iqd} z) / |z| with z = J e^{-iq} - h, written as a phase to avoid 0/0 at the gap closing
    auto f = [&](double q) { return std::cos(q * d + std::atan2(-J * std::sin(q), J * std::cos(q) - h)); };
    // one panel per half oscillation keeps each Kronrod estimate well resolved
    const int panels = std::max(4, 2 * std::abs(d) + 2);
    const double w = std::numbers::pi / panels;
    double v = 0.0, err = 0.0;
    for (int k = 0; k < panels; ++k) {
        double e = 0.0;
        v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, k * w, (k + 1) * w, 6, 1e-11, &e);
        err += e;
    }
    if (!std::isfinite(v) || err > 1e-9)
        throw NumericError("fermion", "string_entry", "quadrature did not reach the target accuracy");
    return v / std::numbers::pi;
}

RMat coupling_matrix(int L, double J, double h, Boundary boundary) {
    RMat A = RMat::Zero(2 * L, 2 * L);
    auto set = [&A](Eigen::Index m, Eigen::Index n, double v) {
        A(m, n) = v;
        A(n, m) = -v;
    };
    for (int j = 0; j < L; ++j) set(2 * j, 2 * j + 1, -2.0 * h);
    for (int j = 0; j + 1 < L; ++j) set(2 * j + 1, 2 * j + 2, -2.0 * J);
    // Z_{L-1} Z_0 = -P i b_{L-1} a_0 and P = +1 in the solved sector
    if (boundary == Boundary::periodic) set(2 * L - 1, 0, 2.0 * J);
    return A;
}

std::vector<double> string_table(const FermionSolution& sol, int dmin, int dmax) {
    std::vector<double> t(static_cast<std::size_t>(dmax - dmin + 1));
#pragma omp parallel for schedule(dynamic)
    for (int d = dmin; d <= dmax; ++d) t[d - dmin] = sol.string_entry(d);
    return t;
}

bool translation_invariant(const FermionSolution& sol) {
    return sol.thermodynamic || sol.boundary == Boundary::periodic;
}

RMat string_block(const FermionSolution& sol, int r, const std::vector<double>* table, int dmin) {
    RMat G(r, r);
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k) {
            if (table) {
                G(j, k) = (*table)[k + 1 - j - dmin];
            } else {
                G(j, k) = sol.majorana(2 * j + 1, 2 * (k + 1));
            }
        }
    return G;
}

double block_determinant(const RMat& G) {
    Eigen::PartialPivLU<RMat> lu(G);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
        throw NumericError("fermion", "zz_correlator",
                           "string block is ill conditioned (rcond estimate " + std::to_string(rc) + ")");
    return lu.determinant();
}

void check_range(const FermionSolution& sol, int r) {
    if (r < 1) throw DomainError("fermion", "zz_correlator", "r must be >= 1");
    if (!sol.thermodynamic && r > sol.L - 1) throw DomainError("fermion", "zz_correlator", "r exceeds L - 1");
}

} // namespace

double tfim_dispersion(double J, double h, double q) {
    return 2.0 * std::sqrt(std::max(0.0, h * h + J * J - 2.0 * h * J * std::cos(q)));
}

double FermionSolution::string_entry(int d) const {
    if (thermodynamic) return thermodynamic_string_entry(J, h, d);
    const int j0 = std::max(0, -d);
    if (j0 + d > L - 1 || j0 > L - 1) throw DomainError("fermion", "string_entry", "separation out of range");
    return majorana(2 * j0 + 1, 2 * (j0 + d));
}

FermionSolution solve_tfim_fermion(int L, double J, double h, Boundary boundary) {
    if (L < 2) throw DomainError("fermion", "solve_tfim_fermion", "L must be >= 2");
    if (L > kMaxFermionL) throw CapacityError("fermion", "solve_tfim_fermion", "L exceeds the fermion cap");
    FermionSolution s;
    s.L = L;
    s.J = J;
    s.h = h;
    s.boundary = boundary;
    const RMat A = coupling_matrix(L, J, h, boundary);
    if (boundary == Boundary::periodic) {
        std::vector<double> f(2 * L);
#pragma omp parallel for schedule(static)
        for (int d = -L + 1; d <= L; ++d) f[d + L - 1] = periodic_string_entry(L, J, h, d);
        s.majorana = RMat::Zero(2 * L, 2 * L);
        for (int j = 0; j < L; ++j)
            for (int l = 0; l < L; ++l) {
                const double v = f[l - j + L - 1];
                s.majorana(2 * j + 1, 2 * l) = v;
                s.majorana(2 * l, 2 * j + 1) = -v;
            }
        s.epsilon.resize(L);
        for (int m = 0; m < L; ++m) s.epsilon[m] = tfim_dispersion(J, h, 2.0 * std::numbers::pi * (m + 0.5) / L);
        std::sort(s.epsilon.begin(), s.epsilon.end());
    } else {
        if (L > kMaxDenseFermionL) throw CapacityError("fermion", "solve_tfim_fermion", "open chain too long");
        const Mat iA = cplx(0.0, 1.0) * A.cast<cplx>();
        Eigen::SelfAdjointEigenSolver<Mat> es(iA);
        if (es.info() != Eigen::Success) throw NumericError("fermion", "solve_tfim_fermion", "diagonalisation failed");
        RVec sgn = es.eigenvalues().unaryExpr([](double e) { return e > 0.0 ? 1.0 : -1.0; });
        const Mat G = cplx(0.0, 1.0) * es.eigenvectors() * sgn.asDiagonal() * es.eigenvectors().adjoint();
        s.majorana = G.real();
        s.epsilon = es.eigenvalues().tail(L);
    }
    s.energy = 0.25 * (A.array() * s.majorana.array()).sum();
    if (L <= kMaxDenseFermionL) s.parity = pfaffian(s.majorana) > 0.0 ? 1 : -1;
    if (boundary == Boundary::periodic && s.parity != 1)
        throw NumericError("fermion", "solve_tfim_fermion", "Gaussian state left the prod X = +1 sector");
    return s;
}

FermionSolution solve_tfim_fermion_thermodynamic(double J, double h) {
    FermionSolution s;
    s.thermodynamic = true;
    s.J = J;
    s.h = h;
    double err = 0.0;
    auto eps = [&](double q) { return tfim_dispersion(J, h, q); };
    s.energy = -boost::math::quadrature::gauss_kronrod<double, 61>::integrate(eps, 0.0, std::numbers::pi, 20, 1e-13,
                                                                              &err) /
               (2.0 * std::numbers::pi);
    return s;
}

double zz_correlator(const FermionSolution& sol, int r) {
    check_range(sol, r);
    if (sol.thermodynamic) {
        const std::vector<double> t = string_table(sol, 2 - r, r);
        return block_determinant(string_block(sol, r, &t, 2 - r));
    }
    return block_determinant(string_block(sol, r, nullptr, 0));
}

std::vector<double> zz_correlators(const FermionSolution& sol, int r_max) {
    check_range(sol, r_max);
    std::vector<double> table;
    const bool use_table = sol.thermodynamic;
    if (use_table) table = string_table(sol, 2 - r_max, r_max);
    std::vector<double> out(r_max);
#pragma omp parallel for schedule(dynamic)
    for (int r = 1; r <= r_max; ++r)
        out[r - 1] = block_determinant(string_block(sol, r, use_table ? &table : nullptr, 2 - r_max));
    return out;
}

std::vector<double> zz_correlators_serial(const FermionSolution& sol, int r_max) {
    check_range(sol, r_max);
    std::vector<double> out;
    for (int r = 1; r <= r_max; ++r) out.push_back(zz_correlator(sol, r));
    return out;
}

std::vector<double> zz_correlators_fast(const FermionSolution& sol, int r_max) {
    check_range(sol, r_max);
    if (!translation_invariant(sol))
        throw DomainError("fermion", "zz_correlators_fast", "requires a translation-invariant solution");
    std::vector<double> table(static_cast<std::size_t>(2 * r_max - 1));
    for (int d = 2 - r_max; d <= r_max; ++d) table[d - 2 + r_max] = sol.string_entry(d);
    RMat U = string_block(sol, r_max, &table, 2 - r_max);
    std::vector<double> out(r_max);
    double det = 1.0;
    for (int k = 0; k < r_max; ++k) {
        const double piv = U(k, k);
        if (std::abs(piv) < 1e-300) throw NumericError("fermion", "zz_correlators_fast", "vanishing leading minor");
        det *= piv;
        out[k] = det;
        const int m = r_max - k - 1;
        if (m > 0) {
            const RVec l = U.col(k).tail(m) / piv;
            U.bottomRightCorner(m, m) -= l * U.row(k).tail(m);
        }
    }
    return out;
}

double qfi_tfim_fermion(int L, double J, double h) {
    const FermionSolution s = solve_tfim_fermion(L, J, h, Boundary::periodic);
    const int half = L / 2;
    // Gapped chains: once |<Z_0 Z_r>| falls below kTail the remaining terms are
    // dropped. A singular block right after a value below kSingularTail is the same tail.
    constexpr double kTail = 1e-12;
    constexpr double kSingularTail = 1e-10;
    constexpr int kBlock = 16;
    std::vector<double> c(static_cast<std::size_t>(half), 0.0);
    bool truncated = false;
    for (int start = 1; start <= half && !truncated; start += kBlock) {
        const int stop = std::min(half, start + kBlock - 1);
        std::vector<std::exception_ptr> errs(static_cast<std::size_t>(stop - start + 1));
#pragma omp parallel for schedule(dynamic)
        for (int r = start; r <= stop; ++r) {
            try {
                c[r - 1] = block_determinant(string_block(s, r, nullptr, 0));
            } catch (...) {
                errs[r - start] = std::current_exception();
            }
        }
        for (int r = start; r <= stop; ++r) {
            if (truncated) {
                c[r - 1] = 0.0;
            } else if (errs[r - start]) {
                if (r > 1 && std::abs(c[r - 2]) < kSingularTail) {
                    truncated = true;
                    c[r - 1] = 0.0;
                } else {
                    std::rethrow_exception(errs[r - start]);
                }
            } else if (std::abs(c[r - 1]) < kTail) {
                truncated = true;
                c[r - 1] = 0.0;
            }
        }
    }
    // C(r) = C(L - r) on the ring; fixed summation order
    double sum = 1.0;
    for (int r = 1; r < L; ++r) sum += c[std::min(r, L - r) - 1];
    return 4.0 * L * sum;
}

} // namespace critsense
