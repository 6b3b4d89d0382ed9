#include "critsense/metrology.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"
#include "critsense/symmetry.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace critsense;

namespace {

ModelSpec tfim(int L, double J = 1.0, double h = 1.0) {
    ModelSpec s;
    s.L = L;
    s.J = J;
    s.h = h;
    return s;
}

ModelSpec xxz(int L, double delta, Boundary b = Boundary::periodic) {
    ModelSpec s;
    s.kind = ModelKind::xxz;
    s.L = L;
    s.delta_xxz = delta;
    s.boundary = b;
    return s;
}

double coeff_of(const PauliOperator& op, const std::string& letters) {
    for (const auto& t : op.terms())
        if (t.str.letters(op.n_qubits()) == letters) return t.coeff.real();
    return 0.0;
}

} // namespace

TEST_CASE("tfim L = 2 periodic merges the double bond") {
    const PauliOperator H = build_hamiltonian(tfim(2));
    CHECK(H.size() == 3);
    CHECK(coeff_of(H, "ZZ") == doctest::Approx(-2.0));
    CHECK(coeff_of(H, "XI") == doctest::Approx(-1.0));
    CHECK(coeff_of(H, "IX") == doctest::Approx(-1.0));
}

TEST_CASE("xxz L = 3 open at zero anisotropy") {
    const PauliOperator H = build_hamiltonian(xxz(3, 0.0, Boundary::open));
    CHECK(H.size() == 4);
    for (const std::string s : {"XXI", "YYI", "IXX", "IYY"}) CHECK(coeff_of(H, s) == doctest::Approx(1.0));
    CHECK(H.is_hermitian());
}

TEST_CASE("cluster ladder L = 3 has eight three-body terms") {
    ModelSpec s;
    s.kind = ModelKind::cluster_ladder;
    s.L = 3;
    const PauliOperator H = build_hamiltonian(s);
    CHECK(H.size() == 8);
    for (const auto& t : H.terms()) CHECK(t.str.weight() == 3);
}

TEST_CASE("rydberg Hamiltonian uses n = (I - Z)/2 and X drive") {
    ModelSpec s;
    s.kind = ModelKind::rydberg;
    s.L = 4;
    s.omega = 0.7;
    s.delta_ryd = 0.3;
    s.V1 = 5.0;
    const PauliOperator H = build_hamiltonian(s);
    CHECK(H.is_hermitian());
    const Mat M = to_matrix(H);
    // |0101> (sites 1 and 3 occupied): -detuning * 2 + no blockade penalty
    const std::uint64_t b = site_bit(4, 1) | site_bit(4, 3);
    CHECK(M(b, b).real() == doctest::Approx(-0.6).epsilon(1e-12));
    // |1100> pays V1
    const std::uint64_t c = site_bit(4, 0) | site_bit(4, 1);
    CHECK(M(c, c).real() == doctest::Approx(5.0 - 0.6).epsilon(1e-12));
}

TEST_CASE("invalid couplings are rejected") {
    CHECK_THROWS_AS(build_hamiltonian(tfim(4, 0.0, 1.0)), DomainError);
    CHECK_FALSE(xxz(4, -1.5).xxz_critical_range());
    CHECK(xxz(4, 1.0).xxz_critical_range());
    ModelSpec r;
    r.kind = ModelKind::rydberg;
    r.L = 4;
    r.V1 = 0.0;
    CHECK_THROWS_AS(build_hamiltonian(r), DomainError);
}

TEST_CASE("declared symmetries commute with the Hamiltonians") {
    const PauliOperator Ht = build_hamiltonian(tfim(6, 0.7, 1.3));
    PauliOperator par(6);
    par.add(1.0, "XXXXXX");
    CHECK((Ht * par - par * Ht).prune(1e-14).size() == 0);
    const PauliOperator Hx = build_hamiltonian(xxz(6, 0.3));
    const PauliOperator Sz = PauliOperator::sum_single(6, 'Z');
    CHECK((Hx * Sz - Sz * Hx).prune(1e-14).size() == 0);
    for (int L : {4, 6, 8, 10}) {
        const Mat T = SymmetryOperator::translation(L).matrix();
        for (const ModelSpec& s : {tfim(L), xxz(L, 0.5)}) {
            const Mat H = to_matrix(build_hamiltonian(s));
            CHECK((T * H * T.adjoint() - H).norm() < 1e-10);
        }
    }
}

TEST_CASE("ground state examples") {
    const GroundSolution g2 = solve_model(tfim(2));
    CHECK(g2.energy == doctest::Approx(-2.8284271247461903).epsilon(1e-10));
    CHECK(g2.parity.value() == 1);

    const GroundSolution para = solve_model(tfim(4, 1.0, 100.0));
    const PureState plus = spin_coherent_state(4);
    CHECK(std::norm(plus.amplitudes().dot(para.state.amplitudes())) > 1.0 - 1e-3);

    const GroundSolution hb = solve_model(xxz(4, 1.0));
    const PauliOperator Sz = PauliOperator::sum_single(4, 'Z');
    CHECK(std::abs(expectation(hb.state, Sz)) < 1e-10);
    CHECK(variance(hb.state, Sz) < 1e-10);
}

TEST_CASE("ground solutions satisfy the eigen-equation and are variational") {
    for (const ModelSpec& s : {tfim(10), tfim(12, 1.0, 0.6), xxz(10, 0.4)}) {
        const GroundSolution g = solve_model(s);
        const PauliOperator H = build_hamiltonian(s);
        const Vec Hv = critsense::apply(H, g.state.amplitudes());
        CHECK((Hv - g.energy * g.state.amplitudes()).norm() < 1e-8);
        CHECK(g.gap >= -1e-10);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const PureState prod = PureState::product(s.L, std::cos(0.3 * seed), std::sin(0.3 * seed));
            CHECK(expectation(prod, H).real() >= g.energy - 1e-8);
        }
    }
}

TEST_CASE("Ising ground state is a definite parity state in the requested sector") {
    ModelSpec s = tfim(8, 1.0, 0.3);
    const GroundSolution g = solve_model(s);
    PauliOperator par(8);
    par.add(1.0, "XXXXXXXX");
    CHECK(expectation(g.state, par).real() == doctest::Approx(1.0).epsilon(1e-10));
    Sector minus{{PauliString::from_letters(8, "XXXXXXXX"), -1}};
    const GroundSolution gm = ground_state(build_hamiltonian(s), minus);
    CHECK(expectation(gm.state, par).real() == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("antiferromagnetic critical state records its momentum sector") {
    for (int L : {8, 10, 12}) {
        const PureState afm = critical_afm_state(L);
        const SymmetryEigen t = symmetry_eigenvalue(afm, SymmetryOperator::translation(L));
        CHECK(t.is_eigenstate);
        CHECK(std::abs(std::abs(t.value) - 1.0) < 1e-8);
        MESSAGE("L = " << L << " translation eigenvalue " << t.value);
    }
}

TEST_CASE("luttinger parameter") {
    CHECK(luttinger_K(0.0) == doctest::Approx(1.0));
    CHECK(luttinger_K(1.0) == doctest::Approx(0.5));
    CHECK(luttinger_K(-0.999999) > 100.0);
    CHECK(std::isinf(luttinger_K(-1.0, true)));
    CHECK_THROWS_AS(luttinger_K(-1.0), DomainError);
    CHECK_THROWS_AS(luttinger_K(1.5), DomainError);
    // K = 3/2 at delta = cos(2 pi / 3)
    CHECK(luttinger_K(-0.5) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("reference probe states") {
    const PureState g1 = ghz_state(1);
    CHECK(std::abs(g1[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(g1[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
    const PureState o0 = oat_squeezed_state(6, 0.0);
    CHECK((o0.amplitudes() - spin_coherent_state(6).amplitudes()).norm() < 1e-14);
    CHECK(variance(ghz_state(6), PauliOperator::sum_single(6, 'Z')) == doctest::Approx(36.0));
    CHECK(variance(spin_coherent_state(6), PauliOperator::sum_single(6, 'Z')) == doctest::Approx(6.0));
}

TEST_CASE("optimally twisted OAT probe lies between the SQL and the Heisenberg limit") {
    const OatOptimum opt = oat_optimal_twist(8);
    const double q = qfi_pure(oat_aligned_state(8, opt.twist_time), PauliOperator::sum_single(8, 'Z'));
    CHECK(q == doctest::Approx(opt.qfi).epsilon(1e-10));
    CHECK(q > 4.0 * 8);
    CHECK(q < 4.0 * 64);
    CHECK(opt.squeezing < 1.0);
}

TEST_CASE("rydberg critical detuning") {
    const std::vector<int> Ls{8, 10, 12};
    const RydbergCritical c = locate_rydberg_critical_detuning(1.0, 50.0, 0.0, Ls, 0.0, 2.0, 11);
    MESSAGE("crossing " << c.detuning << " bracket " << c.bracket_width);
    CHECK(std::isfinite(c.detuning));
    CHECK(c.detuning > 0.0);
    CHECK(c.bracket_width <= 1e-2);
    CHECK_THROWS_AS(locate_rydberg_critical_detuning(1.0, 50.0, 0.0, Ls, 2.0, 3.0, 5), NumericError);
}

TEST_CASE("rydberg connected susceptibility peaks near the crossing") {
    const int L = 12;
    const RydbergCritical c = locate_rydberg_critical_detuning(1.0, 50.0, 0.0, {8, 10, 12}, 0.0, 2.0, 11);
    double best = -1.0, where = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double d = 0.1 * k;
        const double chi = rydberg_point(L, 1.0, d, 50.0, 0.0).chi_conn;
        if (chi > best) {
            best = chi;
            where = d;
        }
    }
    MESSAGE("chi_conn maximum at " << where << ", crossing at " << c.detuning);
    // interior maximum of the scan, within the scan resolution of the crossing
    CHECK(where > 0.0);
    CHECK(where < 2.0);
    CHECK(std::abs(where - c.detuning) < 0.2);
}
