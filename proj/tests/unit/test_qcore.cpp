#include "critsense/models.hpp"
#include "critsense/policy.hpp"
#include "critsense/state.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace critsense;

namespace {

PauliOperator sum_z(int n) { return PauliOperator::sum_single(n, 'Z'); }

// Kronecker-product oracle independent of the bit-mask kernels.
Mat kron_oracle(int n, const std::string& letters) {
    Mat I = Mat::Identity(2, 2), X(2, 2), Y(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, cplx(0, -1), cplx(0, 1), 0;
    Z << 1, 0, 0, -1;
    Mat out = Mat::Identity(1, 1);
    for (int j = 0; j < n; ++j) {
        const Mat& p = letters[j] == 'X' ? X : letters[j] == 'Y' ? Y : letters[j] == 'Z' ? Z : I;
        Mat next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index a = 0; a < out.rows(); ++a)
            for (Eigen::Index b = 0; b < out.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = out(a, b) * p;
        out = next;
    }
    return out;
}

} // namespace

TEST_CASE("to_matrix of single Paulis") {
    PauliOperator z(1);
    z.add(1.0, "Z");
    const Mat m = to_matrix(z);
    CHECK(m(0, 0) == cplx(1.0));
    CHECK(m(1, 1) == cplx(-1.0));
    CHECK(std::abs(m(0, 1)) == 0.0);

    PauliOperator xx(2);
    xx.add(1.0, "XX");
    const Mat a = to_matrix(xx);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(a(r, c) == cplx(r + c == 3 ? 1.0 : 0.0));
}

TEST_CASE("to_matrix matches a Kronecker oracle on mixed strings") {
    for (const std::string s : {"XYZ", "YIX", "ZZY", "IYI"}) {
        PauliOperator op(3);
        op.add(cplx(0.3, -0.2), s);
        CHECK((to_matrix(op) - cplx(0.3, -0.2) * kron_oracle(3, s)).norm() < 1e-14);
    }
}

TEST_CASE("to_matrix respects the dense cap") {
    const PauliOperator big = sum_z(policy().dense_cap + 1);
    CHECK_THROWS_AS(to_matrix(big), CapacityError);
}

TEST_CASE("expectation on simple states") {
    CHECK(expectation(PureState::basis(2, 0), sum_z(2)).real() == doctest::Approx(2.0));
    PauliOperator z(1);
    z.add(1.0, "Z");
    CHECK(expectation(PureState::basis(1, 0), z).real() == doctest::Approx(1.0));
    CHECK(std::abs(expectation(ghz_state(4), sum_z(4))) < 1e-14);
}

TEST_CASE("expectation of the critical Ising chain at L = 8 matches dense diagonalisation") {
    ModelSpec spec;
    spec.L = 8;
    const PauliOperator H = build_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Mat> es(to_matrix(H));
    // the two lowest states are split at finite L; pick the prod X = +1 member
    PauliOperator par(8);
    par.add(1.0, "XXXXXXXX");
    const Mat P = to_matrix(par);
    Vec gs;
    for (int k = 0; k < 4; ++k) {
        const Vec v = es.eigenvectors().col(k);
        if ((v.adjoint() * P * v)(0).real() > 0.5) {
            gs = v;
            break;
        }
    }
    REQUIRE(gs.size() == 256);
    PauliOperator zz(8);
    zz.add(1.0, {{0, 'Z'}, {3, 'Z'}});
    const double oracle = (gs.adjoint() * to_matrix(zz) * gs)(0).real();
    CHECK(expectation(critical_fm_state(8), zz).real() == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(oracle == doctest::Approx(0.5197766556383132).epsilon(1e-9));
}

TEST_CASE("expectation parallel and serial paths agree") {
    const PureState psi = random_state(10, 3);
    ModelSpec spec;
    spec.kind = ModelKind::xxz;
    spec.L = 10;
    spec.delta_xxz = 0.4;
    const PauliOperator H = build_hamiltonian(spec);
    CHECK(std::abs(expectation(psi, H) - expectation_serial(psi, H)) < 1e-12);
    CHECK((apply(H, psi.amplitudes()) - apply_serial(H, psi.amplitudes())).norm() < 1e-12);
}

TEST_CASE("expectation is linear and real for Hermitian operators") {
    const PureState psi = random_state(5, 11);
    PauliOperator A(5), B(5);
    A.add(0.7, "XZIYI");
    A.add(-0.2, "ZZZII");
    B.add(1.3, "IYYXI");
    const cplx a(0.4, 0.1), b(-1.2, 0.0);
    const cplx lhs = expectation(psi, A * a + B * b);
    const cplx rhs = a * expectation(psi, A) + b * expectation(psi, B);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(expectation(psi, A).imag()) < 1e-12);
    const MixedState rho = random_mixed_state(5, 4);
    CHECK(std::abs(expectation(rho, A).imag()) < 1e-10);
}

TEST_CASE("variance examples") {
    CHECK(variance(ghz_state(4), sum_z(4)) == doctest::Approx(16.0));
    CHECK(variance(spin_coherent_state(4), sum_z(4)) == doctest::Approx(4.0));
    CHECK(variance(PureState::basis(4, 5), sum_z(4)) == doctest::Approx(0.0));
    PauliOperator nh(1);
    nh.add(cplx(0.0, 1.0), "X");
    CHECK_THROWS_AS(variance(PureState::basis(1, 0), nh), DomainError);
}

TEST_CASE("variance is non-negative and invariant under its own imprinting") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PureState psi = random_state(6, seed);
        PauliOperator O = sum_z(6);
        O.add(0.5, "XXIIII");
        O.add(0.25, "IIYYII");
        const double v0 = variance(psi, O);
        CHECK(v0 >= -1e-10);
        for (double t : {0.1, 0.7, 2.3}) CHECK(variance(evolve_phase(psi, O, t), O) == doctest::Approx(v0).epsilon(1e-10));
    }
}

TEST_CASE("evolve_phase examples") {
    const PureState plus = PureState::product(1, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    PauliOperator z(1);
    z.add(1.0, "Z");
    const PureState same = evolve_phase(plus, z, 0.0);
    CHECK((same.amplitudes() - plus.amplitudes()).norm() < 1e-15);
    const PureState st = evolve_phase(plus, z, std::numbers::pi / 2);
    CHECK(std::abs(st[0] - cplx(0.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(st[1] - cplx(0.0, -1.0) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("evolve_phase agrees with the dense exponential for a generic generator") {
    const PureState psi = random_state(4, 9);
    PauliOperator O(4);
    O.add(0.6, "XYII");
    O.add(-0.3, "IZZX");
    O.add(0.9, "YIIY");
    const double t = 0.83;
    Eigen::SelfAdjointEigenSolver<Mat> es(to_matrix(O));
    const Vec phases = (cplx(0.0, t) * es.eigenvalues().cast<cplx>()).array().exp();
    const Mat U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    const Vec expect = U * psi.amplitudes();
    const PureState got = evolve_phase(psi, O, t);
    CHECK((got.amplitudes() - expect).norm() < 1e-11);
    CHECK(got.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("PureState rejects unnormalised amplitudes") {
    Vec v = Vec::Zero(2);
    v[0] = 2.0;
    CHECK_THROWS_AS(PureState(1, v), DomainError);
    CHECK(PureState(1, v, true).amplitudes().norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(dephase_normalize(Vec::Zero(4), 2), DomainError);
}

TEST_CASE("partial trace examples") {
    const MixedState red = partial_trace(ghz_state(3), {0, 1});
    Mat expect = Mat::Zero(4, 4);
    expect(0, 0) = 0.5;
    expect(3, 3) = 0.5;
    CHECK((red.matrix() - expect).norm() < 1e-14);
    for (std::uint64_t s = 1; s <= 4; ++s) {
        const MixedState r = partial_trace(random_state(6, s), {1, 4});
        CHECK(r.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const PureState psi = random_state(3, 2);
    CHECK((apply_operator(PauliOperator::identity(3), psi) - psi.amplitudes()).norm() < 1e-15);
}

TEST_CASE("partial trace commutes with operators on the kept sites") {
    const MixedState rho = random_mixed_state(5, 8);
    const std::vector<int> kept{1, 3};
    PauliOperator full(5), local(2);
    full.add(0.4, {{1, 'X'}, {3, 'Y'}});
    full.add(-0.7, {{3, 'Z'}});
    local.add(0.4, {{0, 'X'}, {1, 'Y'}});
    local.add(-0.7, {{1, 'Z'}});
    const MixedState red = partial_trace(rho, kept);
    CHECK(std::abs(expectation(red, local) - expectation(rho, full)) < 1e-12);
}

TEST_CASE("MixedState validation and spectrum") {
    Mat bad = Mat::Identity(2, 2);
    CHECK_THROWS_AS(MixedState(1, bad), DomainError);
    Mat neg = Mat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    const MixedState m(1, neg);
    CHECK_THROWS_AS(m.spectrum(), DomainError);
    const MixedState r = random_mixed_state(3, 1);
    CHECK(r.spectrum().values.minCoeff() > -1e-10);
    CHECK(r.purity() <= 1.0 + 1e-12);
}

TEST_CASE("PauliOperator merges duplicates and multiplies with phases") {
    PauliOperator a(2);
    a.add(1.0, "XI");
    a.add(2.0, "XI");
    CHECK(a.size() == 1);
    CHECK(a.terms()[0].coeff == cplx(3.0));
    PauliOperator x(1), y(1);
    x.add(1.0, "X");
    y.add(1.0, "Y");
    const PauliOperator xy = x * y;
    REQUIRE(xy.size() == 1);
    CHECK(xy.terms()[0].str.letters(1) == "Z");
    CHECK(xy.terms()[0].coeff == cplx(0.0, 1.0));
    CHECK((to_matrix(x * y) - to_matrix(x) * to_matrix(y)).norm() < 1e-15);
}
