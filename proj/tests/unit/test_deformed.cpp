#include "critsense/deformed.hpp"
#include "critsense/fermion.hpp"
#include "critsense/metrology.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace critsense;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PureState ladder_ground(int L) {
    ModelSpec s;
    s.kind = ModelKind::cluster_ladder;
    s.L = L;
    return solve_model(s).state;
}

PauliOperator chain2_sum_z(int L) {
    PauliOperator O(2 * L);
    for (int j = 0; j < L; ++j) O.add(1.0, {{ladder_site(j, 2), 'Z'}});
    return O;
}

double chain2_zz(const PureState& psi, int j, int k) {
    const int n = psi.n_qubits();
    PauliOperator zz(n);
    zz.add(1.0, {{ladder_site(j, 2), 'Z'}, {ladder_site(k, 2), 'Z'}});
    return expectation(psi, zz).real();
}

double chain2_parity(const PureState& psi) {
    const int L = psi.n_qubits() / 2;
    std::vector<std::pair<int, char>> sites;
    for (int j = 0; j < L; ++j) sites.emplace_back(ladder_site(j, 2), 'X');
    PauliOperator P(psi.n_qubits());
    P.add(1.0, PauliString::from_sites(psi.n_qubits(), sites));
    return expectation(psi, P).real();
}

} // namespace

TEST_CASE("deformation examples") {
    const PureState psi = random_state(4, 3);
    const PureState same = deform(psi, DeformationSpec::uniform(4, 0.0, 'X'));
    CHECK((same.amplitudes() - psi.amplitudes()).norm() < 1e-14);

    const PureState plus = deform(PureState::basis(1, 0), DeformationSpec::uniform(1, kInf, 'X'));
    CHECK(std::abs(plus[0] - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(plus[1] - 1.0 / std::sqrt(2.0)) < 1e-14);

    CHECK_THROWS_AS(deform(PureState::basis(1, 0), DeformationSpec::uniform(1, kInf, 'Z', -1)), NumericError);
    DeformationSpec bad = DeformationSpec::uniform(3, 0.2, 'X');
    bad.outcomes.pop_back();
    CHECK_THROWS_AS(bad.validate(3), DomainError);
}

TEST_CASE("finite-beta deformation matches the single-site exponentials") {
    const PureState psi = random_state(3, 8);
    DeformationSpec d;
    d.beta = 0.37;
    d.sites = {0, 2};
    d.letters = {'Y', 'Z'};
    d.outcomes = {1, -1};
    // e^{beta s P} = cosh(beta) I + s sinh(beta) P for an involutory P
    PauliOperator E0(3), E2(3);
    E0.add(std::cosh(0.37), "III");
    E0.add(std::sinh(0.37), "YII");
    E2.add(std::cosh(0.37), "III");
    E2.add(-std::sinh(0.37), "IIZ");
    Vec v = to_matrix(E2) * (to_matrix(E0) * psi.amplitudes());
    v.normalize();
    CHECK((deform(psi, d).amplitudes() - v).norm() < 1e-12);
}

TEST_CASE("Z deformation of the critical chain speeds up correlation decay") {
    const int L = 12;
    const PureState psi = critical_fm_state(L);
    const PureState d = deform(psi, DeformationSpec::uniform(L, 0.5, 'Z'));
    auto connected = [L](const PureState& s, int r) {
        PauliOperator zz(L), z0(L), zr(L);
        zz.add(1.0, {{0, 'Z'}, {r, 'Z'}});
        z0.add(1.0, {{0, 'Z'}});
        zr.add(1.0, {{r, 'Z'}});
        return expectation(s, zz).real() - expectation(s, z0).real() * expectation(s, zr).real();
    };
    std::vector<double> rs, pristine, deformed;
    for (int r = 2; r <= 5; ++r) {
        rs.push_back(r);
        pristine.push_back(connected(psi, r));
        deformed.push_back(connected(d, r));
    }
    const double e0 = -fit_power_law(rs, pristine).exponent, e1 = -fit_power_law(rs, deformed).exponent;
    MESSAGE("pristine " << e0 << " deformed " << e1);
    CHECK(e1 > 0.25);
    CHECK(e1 > e0);
}

TEST_CASE("outcome enumeration examples") {
    const std::vector<PauliString> x1{PauliString::from_letters(1, "X")};
    const PureState plus = PureState::product(1, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    const OutcomeEnsemble a = enumerate_outcomes(plus, x1);
    for (const Outcome& o : a.outcomes) CHECK(o.probability == doctest::Approx(o.s[0] == 1 ? 1.0 : 0.0));
    const OutcomeEnsemble b = enumerate_outcomes(PureState::basis(1, 0), x1);
    REQUIRE(b.outcomes.size() == 2);
    for (const Outcome& o : b.outcomes) CHECK(o.probability == doctest::Approx(0.5).epsilon(1e-14));

    const PureState lad = ladder_ground(4);
    const OutcomeEnsemble c = enumerate_outcomes(lad, ladder_chain1_x(4));
    CHECK(c.outcomes.size() == 16);
    CHECK(c.total_probability() == doctest::Approx(1.0).epsilon(1e-10));
    for (const Outcome& o : c.outcomes)
        if (o.probability > 1e-14) CHECK(o.state.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    const OutcomeEnsemble w = enumerate_outcomes(lad, ladder_chain1_x(4), 0.4);
    CHECK(w.total_probability() == doctest::Approx(1.0).epsilon(1e-10));

    const std::vector<PauliString> clash{PauliString::from_letters(2, "XI"), PauliString::from_letters(2, "ZI")};
    CHECK_THROWS_AS(enumerate_outcomes(random_state(2, 1), clash), DomainError);
}

TEST_CASE("sampling is reproducible from the seed") {
    const PureState lad = ladder_ground(4);
    const auto a = sample_outcomes(lad, ladder_chain1_x(4), 99, 50);
    const auto b = sample_outcomes(lad, ladder_chain1_x(4), 99, 50);
    const auto c = sample_outcomes(lad, ladder_chain1_x(4), 100, 50);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("decoded correlator on a measured-eigenstate probe is the pristine correlator") {
    const int L = 4;
    const PureState psi = deform(random_state(2 * L, 5), DeformationSpec::ladder_chain1(L, kInf, std::vector<int>(L, 1)));
    const OutcomeEnsemble ens = enumerate_outcomes(psi, ladder_chain1_x(L));
    CHECK(decoded_correlator(ens, 0, 3) == doctest::Approx(chain2_zz(psi, 0, 3)).epsilon(1e-12));
    CHECK_THROWS_AS(decoded_correlator(ens, 2, 1), DomainError);
}

TEST_CASE("sign decoding equals operator insertion") {
    const PureState lad = ladder_ground(5);
    for (double beta : {kInf, 0.6}) {
        const OutcomeEnsemble ens = enumerate_outcomes(lad, ladder_chain1_x(5), beta);
        for (auto [j, k] : {std::pair{0, 4}, std::pair{1, 3}, std::pair{0, 1}})
            CHECK(std::abs(decoded_correlator(ens, j, k) - decoded_correlator_insertion(lad, j, k, beta)) < 1e-10);
    }
}

TEST_CASE("sampled decoded correlator agrees with the exhaustive value") {
    const PureState lad = ladder_ground(5);
    const OutcomeEnsemble ens = enumerate_outcomes(lad, ladder_chain1_x(5));
    const double exact = decoded_correlator(ens, 0, 4);
    const auto samples = sample_outcomes(lad, ladder_chain1_x(5), 20240611, 10000);
    const SampledEstimate est = decoded_correlator_sampled(lad, samples, 0, 4);
    MESSAGE("exact " << exact << " sampled " << est.mean << " +- " << est.standard_error);
    CHECK(est.shots == 10000);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.standard_error);
}

TEST_CASE("outcome QFI and the imprinter implementation") {
    const int L = 4;
    const PureState lad = ladder_ground(L);
    CHECK(outcome_qfi(lad, std::vector<int>(L, 1)) == doctest::Approx(qfi_pure(lad, chain2_sum_z(L))).epsilon(1e-12));

    const std::vector<int> s{1, -1, 1, -1};
    const std::vector<int> flips = outcome_flip_rungs(s);
    CHECK(flips == std::vector<int>{1, 2});
    PauliOperator X(2 * L);
    std::vector<std::pair<int, char>> xs;
    for (int j : flips) xs.emplace_back(ladder_site(j, 2), 'X');
    X.add(1.0, PauliString::from_sites(2 * L, xs));
    const PureState psi = random_state(2 * L, 13);
    const double theta = 0.41;
    const Vec flipped = apply_operator(X, psi);
    const Vec conj = apply_operator(X, evolve_phase(PureState(2 * L, flipped), chain2_sum_z(L), theta));
    const Vec direct = evolve_phase(psi, outcome_generator(L, s), theta).amplitudes();
    CHECK((conj - direct).norm() < 1e-12);
}

TEST_CASE("averaged QFI: enumeration and decoded double sum agree") {
    for (int L : {4, 5}) {
        const PureState lad = ladder_ground(L);
        for (double beta : {kInf, 0.5}) {
            const double a = averaged_qfi(enumerate_outcomes(lad, ladder_chain1_x(L), beta));
            const double b = averaged_qfi_decoded(lad, beta);
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
        }
    }
    const PureState lad = ladder_ground(5);
    CHECK(averaged_qfi(enumerate_outcomes(lad, ladder_chain1_x(5))) >= qfi_pure(lad, chain2_sum_z(5)) - 1e-9);
    CHECK_THROWS_AS(averaged_qfi_decoded(random_state(8, 2)), DomainError);
}

TEST_CASE("chain-1 deformation preserves the chain-2 spin-flip symmetry") {
    const PureState lad = ladder_ground(5);
    const double before = chain2_parity(lad);
    CHECK(std::abs(std::abs(before) - 1.0) < 1e-10);
    for (double beta : {0.3, 2.0, kInf}) {
        const PureState d = deform(lad, DeformationSpec::ladder_chain1(5, beta, {1, -1, 1, 1, -1}));
        CHECK(chain2_parity(d) == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("uniform outcome deformation builds long-range order on the ladder") {
    std::vector<double> betas;
    for (int k = 0; k <= 8; ++k) betas.push_back(0.25 * k);
    for (int L : {5, 6}) {
        const PureState lad = ladder_ground(L);
        const LroReport r = uniform_outcome_lro_check(lad, betas);
        CHECK(r.correlator.front() == doctest::Approx(chain2_zz(lad, 0, L - 1)).epsilon(1e-12));
        CHECK(r.correlator[8] > r.correlator[2]);
        CHECK(r.monotone);
        MESSAGE("L = " << L << ": beta = 0 -> " << r.correlator.front() << ", beta = 2 -> " << r.correlator.back()
                       << " (ratio " << r.correlator.back() / r.correlator.front() << ")");
        CHECK(r.threefold);
    }
}
