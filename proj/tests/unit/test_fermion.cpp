#include "critsense/fermion.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"
#include "critsense/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace critsense;

namespace {

ModelSpec tfim(int L, double J, double h) {
    ModelSpec s;
    s.L = L;
    s.J = J;
    s.h = h;
    return s;
}

double ed_zz(const PureState& psi, int L, int r) {
    PauliOperator zz(L);
    zz.add(1.0, {{0, 'Z'}, {r, 'Z'}});
    return expectation(psi, zz).real();
}

} // namespace

TEST_CASE("fermion and ED agree on energies and every correlator") {
    for (int L : {6, 8, 10})
        for (auto [J, h] : {std::pair{1.0, 1.0}, std::pair{1.0, 0.4}, std::pair{0.7, 1.9}}) {
            const GroundSolution g = solve_model(tfim(L, J, h));
            const FermionSolution f = solve_tfim_fermion(L, J, h);
            CHECK(f.energy == doctest::Approx(g.energy).epsilon(1e-10));
            const std::vector<double> zz = zz_correlators(f, L - 1);
            for (int r = 1; r < L; ++r) CHECK(std::abs(zz[static_cast<std::size_t>(r - 1)] - ed_zz(g.state, L, r)) < 1e-8);
        }
    const GroundSolution g = solve_model(tfim(12, 1.0, 1.0));
    const FermionSolution f = solve_tfim_fermion(12, 1.0, 1.0);
    for (int r = 1; r < 12; ++r) CHECK(std::abs(zz_correlator(f, r) - ed_zz(g.state, 12, r)) < 1e-8);
}

TEST_CASE("fermion solution invariants") {
    const FermionSolution f = solve_tfim_fermion(16, 1.0, 0.8);
    CHECK(f.epsilon.minCoeff() >= 0.0);
    CHECK((f.majorana + f.majorana.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f.parity == 1);
}

TEST_CASE("dispersion and ED gaps") {
    for (double q : {0.1, 1.0, 2.5}) CHECK(tfim_dispersion(1.0, 1.0, q) == doctest::Approx(4.0 * std::abs(std::sin(q / 2))));
    // lowest even-parity excitation: two quasiparticles at the smallest antiperiodic momenta
    for (int L : {8, 10, 12}) {
        const FermionSolution f = solve_tfim_fermion(L, 1.0, 1.0);
        const double two = f.epsilon[0] + f.epsilon[1];
        const double q = std::numbers::pi / L;
        CHECK(two == doctest::Approx(2.0 * tfim_dispersion(1.0, 1.0, q)).epsilon(1e-10));
    }
}

TEST_CASE("thermodynamic critical chain") {
    const FermionSolution t = solve_tfim_fermion_thermodynamic(1.0, 1.0);
    CHECK(t.thermodynamic);
    CHECK(t.energy == doctest::Approx(-4.0 / std::numbers::pi).epsilon(1e-9));
    // nearest-neighbour correlator equals the transverse magnetisation 2/pi at J = h
    CHECK(zz_correlator(t, 1) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-9));
    for (int d = -3; d <= 4; ++d)
        CHECK(std::abs(t.string_entry(d)) == doctest::Approx(2.0 / (std::numbers::pi * std::abs(2 * d - 1))).epsilon(1e-9));
    // ED sizes approach the thermodynamic value from above
    double prev = 2.0;
    for (int L : {8, 10, 12, 14}) {
        const double v = zz_correlator(solve_tfim_fermion(L, 1.0, 1.0), 1);
        CHECK(v < prev);
        CHECK(v > 2.0 / std::numbers::pi);
        prev = v;
    }
}

TEST_CASE("ordered and disordered limits") {
    const FermionSolution ferro = solve_tfim_fermion(32, 1.0, 0.01);
    for (int r : {1, 5, 16}) CHECK(zz_correlator(ferro, r) > 0.999);
    const FermionSolution para = solve_tfim_fermion(32, 1.0, 200.0);
    // <X_j> = <i a_j b_j> = Gamma(2j, 2j + 1)
    for (int j : {0, 7, 31}) CHECK(para.majorana(2 * j, 2 * j + 1) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(zz_correlator(para, 3)) < 1e-6);
}

TEST_CASE("energy is extensive") {
    // the critical finite-size correction falls off as 1/L
    double prev = 1.0, first = 0.0;
    for (int L : {8, 16, 32, 64}) {
        const double d = std::abs(solve_tfim_fermion(2 * L, 1.0, 1.0).energy / 2.0 - solve_tfim_fermion(L, 1.0, 1.0).energy);
        CHECK(d < prev);
        if (L == 8) first = d;
        prev = d;
    }
    CHECK(prev < first / 6.0);
}

TEST_CASE("correlators are real and reflection symmetric on periodic chains") {
    const FermionSolution f = solve_tfim_fermion(20, 1.0, 1.0);
    const std::vector<double> zz = zz_correlators(f, 19);
    for (int r = 1; r < 20; ++r) CHECK(zz[static_cast<std::size_t>(r - 1)] == doctest::Approx(zz[static_cast<std::size_t>(19 - r)]).epsilon(1e-10));
}

TEST_CASE("fast path matches the pivoted path") {
    for (const FermionSolution& f : {solve_tfim_fermion(64, 1.0, 1.0), solve_tfim_fermion(48, 1.0, 0.6),
                                     solve_tfim_fermion_thermodynamic(1.0, 1.0)}) {
        const std::vector<double> a = zz_correlators_serial(f, 40), b = zz_correlators_fast(f, 40),
                                  c = zz_correlators(f, 40);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-9));
            CHECK(c[k] == a[k]);
        }
    }
}

TEST_CASE("critical correlator decay exponent") {
    const FermionSolution t = solve_tfim_fermion_thermodynamic(1.0, 1.0);
    const std::vector<double> zz = zz_correlators(t, 128);
    std::vector<double> rs, vs;
    for (int r = 1; r <= 128; ++r) {
        rs.push_back(r);
        vs.push_back(zz[static_cast<std::size_t>(r - 1)]);
    }
    const PowerLawFit f = fit_power_law(rs, vs, std::pair{8.0, 128.0});
    MESSAGE("exponent " << -f.exponent);
    CHECK(-f.exponent == doctest::Approx(0.25).epsilon(0.02 / 0.25));
    CHECK(f.points == 121);
}

TEST_CASE("QFI scaling exponents") {
    const PowerLawFit crit = qfi_scaling_tfim({64, 128, 256, 512}, true);
    MESSAGE("critical exponent " << crit.exponent);
    CHECK(std::abs(crit.exponent - 1.75) <= 0.05);
    const PowerLawFit para = qfi_scaling_tfim({64, 128, 256, 512}, false);
    MESSAGE("paramagnet exponent " << para.exponent);
    CHECK(std::abs(para.exponent - 1.0) <= 0.05);
    CHECK_THROWS_AS(qfi_scaling_tfim({64, 128}, true), DomainError);
}

TEST_CASE("critical QFI grows with L") {
    double prev = 0.0;
    for (int L : {8, 12, 16, 24, 32, 48}) {
        const double q = qfi_tfim_fermion(L, 1.0, 1.0);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("power-law fitter") {
    std::vector<double> xs, ys;
    for (double x : {2.0, 3.0, 5.0, 8.0, 13.0}) {
        xs.push_back(x);
        ys.push_back(std::pow(x, 1.75));
    }
    const PowerLawFit f = fit_power_law(xs, ys);
    CHECK(f.exponent == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), DomainError);

    CounterRng rng(2024);
    std::vector<double> nx, ny;
    for (int k = 0; k < 40; ++k) {
        const double x = std::pow(10.0, 1.0 + 2.0 * k / 39.0);
        nx.push_back(x);
        ny.push_back(3.0 * std::pow(x, -0.6) * (1.0 + 0.01 * rng.normal()));
    }
    const PowerLawFit g = fit_power_law(nx, ny);
    CHECK(std::abs(g.exponent + 0.6) < 0.02);
    CHECK(g.r_squared <= 1.0);
    CHECK(g.r_squared >= 0.0);
}
