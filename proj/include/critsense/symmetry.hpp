#pragma once

#include "critsense/metrology.hpp"
#include "critsense/state.hpp"

#include <utility>
#include <vector>

namespace critsense {

enum class SymmetryKind { parity_x, parity_z, translation, reflection };
std::string to_string(SymmetryKind k);

/// Parity is stored as a Pauli string; translation and reflection as a site
/// permutation together with the swap sequence that builds it.
class SymmetryOperator {
public:
    static SymmetryOperator parity_x(int L);
    static SymmetryOperator parity_z(int L);
    /// Ordered product S_{0,1} S_{1,2} ... S_{L-2,L-1}; moves site j to j+1 (mod L).
    static SymmetryOperator translation(int L);
    /// Reflection about the bond (center, center+1): i -> 2 center + 1 - i.
    /// On periodic chains the map is taken mod L and each swapped pair is listed once.
    static SymmetryOperator reflection(int L, int center, bool periodic = true);

    SymmetryKind kind() const { return kind_; }
    int n_qubits() const { return L_; }
    int center() const { return center_; }
    bool is_hermitian() const { return kind_ != SymmetryKind::translation; }
    /// Set for reflections of odd open chains, where the staggered imprinter is not odd.
    bool non_anticommuting_flag() const { return flag_; }

    const std::vector<int>& permutation() const { return perm_; }
    const std::vector<std::pair<int, int>>& swaps() const { return swaps_; }

    Vec apply(const Vec& v) const;
    Vec apply_adjoint(const Vec& v) const;
    /// Dense matrix; throws CapacityError above the dense cap.
    Mat matrix() const;
    /// A O A^dag as a Pauli operator.
    PauliOperator conjugate(const PauliOperator& O) const;

private:
    SymmetryKind kind_ = SymmetryKind::parity_x;
    int L_ = 0;
    int center_ = -1;
    bool flag_ = false;
    PauliString string_{};
    std::vector<int> perm_;
    std::vector<std::pair<int, int>> swaps_;
};

/// {A, O} = 0, tested as A O A^dag = -O at the operator level.
bool anticommutes(const SymmetryOperator& A, const PauliOperator& O);

struct SymmetryEigen {
    bool is_eigenstate;
    double s;   // real part of <psi|A|psi>
    cplx value; // <psi|A|psi>
};
/// Eigenstate iff ||A psi - <A> psi|| < 1e-8.
SymmetryEigen symmetry_eigenvalue(const PureState& psi, const SymmetryOperator& A);

/// sum_j (-1)^j (n_{j+1} - n_j) on a periodic chain, n = (I - Z)/2.
PauliOperator rydberg_order_parameter(int L);

struct GateCount {
    int controlled_swaps = 0;
    int controlled_x = 0;
    int toffolis = 0;
};

struct HadamardTestResult {
    double p_plus = 0.0;
    double p_minus = 0.0;
    double re_T = 0.0;
    double im_T = 0.0;
    GateCount gates;
};

/// Exact ancilla + controlled-U simulation on the doubled state vector.
HadamardTestResult hadamard_test(const PureState& psi, const SymmetryOperator& U);
/// Controlled-gate budget: each controlled swap is three Toffolis.
GateCount hadamard_gate_count(const SymmetryOperator& U);

/// The two-outcome system POVM {(I +- (U + U^dag)/2)/2} realised by the Hadamard test.
std::vector<Effect> hadamard_povm(const SymmetryOperator& U);

/// Classical Fisher information of the Hadamard-test outcomes on e^{i theta O}|psi>.
double hadamard_fisher(const PureState& psi, const PauliOperator& O, const SymmetryOperator& U, double theta);

/// Expectation-vs-theta curves divided by the symmetry eigenvalue of the probe:
/// prod X on the ferromagnetic critical chain with sum Z, reflection and
/// translation on the antiferromagnetic one with the staggered imprinter.
struct SymmetryCurves {
    std::vector<double> theta;
    std::vector<double> parity;
    std::vector<double> reflection;
    std::vector<double> translation;
    double s_parity = 0.0;
    double s_reflection = 0.0;
    double s_translation = 0.0;
};
SymmetryCurves symmetry_curves(int L, const std::vector<double>& theta);
/// Largest pairwise |a - b| / max(|a|, |b|, floor) across the three curves.
double curve_collapse_deviation(const SymmetryCurves& c, double floor = 1e-3);

} // namespace critsense
