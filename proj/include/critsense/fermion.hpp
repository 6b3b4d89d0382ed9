#pragma once

#include "critsense/kernels.hpp"
#include "critsense/models.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace critsense {

/// Ising chain H = -J sum Z Z - h sum X in Majorana form, with
/// a_j = (prod_{i<j} X_i) Z_j and b_j = (prod_{i<j} X_i) Y_j, so that
/// X_j = i a_j b_j and Z_j Z_{j+1} = i b_j a_{j+1}. Periodic chains are
/// solved in the prod X = +1 sector (antiperiodic fermion momenta).
struct FermionSolution {
    int L = 0;  // 0 in the thermodynamic limit
    bool thermodynamic = false;
    double J = 1.0;
    double h = 1.0;
    Boundary boundary = Boundary::periodic;
    /// Single-particle energies (finite L), ascending.
    RVec epsilon;
    /// Majorana covariance Gamma_mn = <i [g_m, g_n] / 2> with g = (a_0, b_0, a_1, b_1, ...).
    RMat majorana;
    /// Ground energy (finite L) or energy per site (thermodynamic limit).
    double energy = 0.0;
    /// Fermion parity <prod X> of the solution (finite L).
    int parity = 1;

    /// <i b_j a_{j+d}> for the translation-invariant cases.
    double string_entry(int d) const;
};

FermionSolution solve_tfim_fermion(int L, double J, double h, Boundary boundary = Boundary::periodic);
FermionSolution solve_tfim_fermion_thermodynamic(double J, double h);

/// Dispersion 2 |h - J e^{iq}|.
double tfim_dispersion(double J, double h, double q);

/// <Z_0 Z_r> as the r x r determinant of G_{jk} = <i b_j a_{k+1}>.
/// Throws NumericError when the string block is ill conditioned.
double zz_correlator(const FermionSolution& sol, int r);
/// All <Z_0 Z_r> for r = 1..r_max, OpenMP over r.
std::vector<double> zz_correlators(const FermionSolution& sol, int r_max);
/// Serial reference for zz_correlators.
std::vector<double> zz_correlators_serial(const FermionSolution& sol, int r_max);
/// Leading principal minors of one unpivoted elimination (translation-invariant
/// solutions only). Checked against the pivoted path in the tests.
std::vector<double> zz_correlators_fast(const FermionSolution& sol, int r_max);

/// 4 sum_{ij} <Z_i Z_j>_c on a periodic chain from fermion correlators.
/// Correlators below 1e-12 end the sum (gapped chains).
double qfi_tfim_fermion(int L, double J, double h);

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::size_t points = 0;
};

/// Least squares of log y on log x inside the window (all points when absent).
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          std::optional<std::pair<double, double>> window = std::nullopt);

/// Fit of log F_Q vs log L for the periodic chain (J = h = 1 at criticality,
/// h = h_off otherwise). The sizes must span at least a factor of 4.
PowerLawFit qfi_scaling_tfim(const std::vector<int>& L_list, bool at_criticality, double h_off = 3.0);

} // namespace critsense
