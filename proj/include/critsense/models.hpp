#pragma once

#include "critsense/lanczos.hpp"
#include "critsense/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace critsense {

enum class ModelKind { tfim, xxz, rydberg, cluster_ladder };
enum class Boundary { periodic, open };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::tfim;
    int L = 8;
    double J = 1.0;
    double h = 1.0;
    double delta_xxz = 0.0;
    double omega = 1.0;
    double delta_ryd = 0.0;
    double V1 = 50.0;
    double V2 = 0.0;
    Boundary boundary = Boundary::periodic;
    /// Extra symmetry-preserving terms added verbatim (ladder hook).
    std::optional<PauliOperator> extra_terms;

    int n_qubits() const { return kind == ModelKind::cluster_ladder ? 2 * L : L; }
    /// Throws DomainError on invalid couplings.
    void validate() const;
    /// True for -1 < delta_xxz <= 1.
    bool xxz_critical_range() const { return delta_xxz > -1.0 && delta_xxz <= 1.0; }
};

/// Ladder qubit index of rung j and leg y in {1, 2}.
inline int ladder_site(int j, int y) { return 2 * j + (y - 1); }

PauliOperator build_hamiltonian(const ModelSpec& spec);

/// One eigenvalue constraint A|psi> = s|psi> with A a Pauli string.
struct SectorConstraint {
    PauliString op;
    int eigenvalue = 1;
};
using Sector = std::vector<SectorConstraint>;

struct GroundSolution {
    double energy = 0.0;
    PureState state;
    double gap = 0.0;
    double residual = 0.0;
    std::optional<int> parity;            // eigenvalue of the first sector constraint
    std::optional<cplx> momentum_phase;   // T eigenvalue when the state is translation invariant
};

struct GroundOptions {
    bool compute_gap = true;
    LanczosOptions lanczos;
    /// Dimension at or below which a dense eigensolver is used.
    std::size_t dense_dim = 256;
};

/// Lowest state of H in the sector; the gap is measured inside the same sector.
GroundSolution ground_state(const PauliOperator& H, const Sector& sector = {}, const GroundOptions& opts = {});

/// Default sector of each model: prod X = +1 for the Ising chain,
/// leg-wise prod X = +1 on the ladder, none otherwise.
Sector default_sector(const ModelSpec& spec);

/// Builds, solves and labels a model ground state.
GroundSolution solve_model(const ModelSpec& spec, const GroundOptions& opts = {});

/// K = pi / (2 (pi - arccos delta)); +inf at delta = -1 when allowed.
double luttinger_K(double delta, bool allow_infinite = false);

PureState ghz_state(int L);
PureState spin_coherent_state(int L);
/// e^{-i t (sum Z / 2)^2} |+>^L.
PureState oat_squeezed_state(int L, double twist_time);

struct OatOptimum {
    double twist_time;
    double squeezing;  // Wineland parameter at the optimum
    double qfi;        // QFI of the aligned probe for sum Z
    double rotation;   // angle about x aligning the anti-squeezed axis with z
};
/// Twist time minimising the squeezing parameter on a grid, refined by bisection.
OatOptimum oat_optimal_twist(int L, int grid = 400);
/// OAT state rotated about x so its largest transverse variance lies along z.
PureState oat_aligned_state(int L, double twist_time);

/// Ferromagnetic critical Ising ground state (J = h = 1, periodic, prod X = +1).
PureState critical_fm_state(int L);
/// Antiferromagnetic critical ground state obtained as prod_{odd j} X_j applied to the
/// ferromagnetic one; it pairs with the staggered imprinter.
PureState critical_afm_state(int L);

/// Rydberg order-parameter statistics of a ground state.
struct RydbergPoint {
    double detuning;
    double m2;          // <M^2>
    double m_abs;       // <|M|>
    double scaled;      // <M^2> / L^{7/4}
    double chi_conn;    // (<M^2> - <|M|>^2) / L
};
RydbergPoint rydberg_point(int L, double omega, double detuning, double V1, double V2);

struct RydbergCritical {
    double detuning;
    double bracket_width;
    std::vector<double> pair_crossings; // one per consecutive pair of sizes
};
/// Crossing of <M^2>/L^{7/4} for consecutive sizes, bracketed by bisection.
RydbergCritical locate_rydberg_critical_detuning(double omega, double V1, double V2, const std::vector<int>& L_list,
                                                 double scan_lo = 0.0, double scan_hi = 3.0, int scan_points = 31);

} // namespace critsense
