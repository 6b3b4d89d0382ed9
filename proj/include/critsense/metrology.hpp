#pragma once

#include "critsense/state.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace critsense {

enum class QfiMethod { pure_variance, mixed_spectral, formula_bitflip, lower_bound_Fn, outcome_averaged };
std::string to_string(QfiMethod m);

struct QfiReport {
    double value = 0.0;
    QfiMethod method = QfiMethod::mixed_spectral;
    double spectral_cutoff_used = 0.0;
    std::string route; // "dense", "support", "momentum_blocks"
};

/// 4 Var(O).
double qfi_pure(const PureState& psi, const PauliOperator& O);

/// Spectral QFI 2 sum (l_i - l_j)^2/(l_i + l_j) |<i|O|j>|^2 over pairs above the cutoff.
/// Low-rank inputs are reduced to their support; translation-invariant inputs
/// with a translation-invariant generator are split into momentum blocks.
QfiReport qfi_mixed(const MixedState& rho, const PauliOperator& O, double cutoff = 1e-12);
/// Reference route: full dense eigen-decomposition, no reductions.
QfiReport qfi_mixed_dense(const MixedState& rho, const PauliOperator& O, double cutoff = 1e-12);
/// Momentum-block route; throws DomainError if rho or O is not translation invariant.
QfiReport qfi_mixed_momentum(const MixedState& rho, const PauliOperator& O, double cutoff = 1e-12);

/// i[O, rho], the derivative of e^{i theta O} rho e^{-i theta O} at theta.
Mat unitary_family_derivative(const Mat& rho, const PauliOperator& O);

/// Symmetric logarithmic derivative on the support (pairs below the cutoff are zeroed).
Mat sld(const MixedState& rho, const Mat& drho, double cutoff = 1e-12);
/// theta I + L_theta / F_Q.
Mat optimal_observable(const MixedState& rho, const Mat& drho, double theta, double F_Q, double cutoff = 1e-12);

/// Linear map on state vectors (used for non-Pauli observables).
using StateMap = std::function<Vec(const Vec&)>;

enum class DerivativeMode { analytic, finite_difference };

struct PrecisionPoint {
    double theta = 0.0;
    double signal = 0.0;
    double variance = 0.0;
    double derivative = 0.0;
    double delta_theta = std::numeric_limits<double>::infinity();
};

/// sqrt(Var A) / |d<A>/dtheta| on e^{i theta O}|psi>; +inf when the slope is below 1e-14.
PrecisionPoint error_propagation(const PureState& psi, const PauliOperator& O, const PauliOperator& A, double theta,
                                 DerivativeMode mode = DerivativeMode::analytic, double h_fd = 1e-5);
/// Same for a Hermitian observable given as a state map.
PrecisionPoint error_propagation(const PureState& psi, const PauliOperator& O, const StateMap& A, double theta,
                                 DerivativeMode mode = DerivativeMode::analytic, double h_fd = 1e-5);
/// Heisenberg-picture form: mean from A_eff, second moment from A2_eff
/// (for example channel-conjugated observables).
PrecisionPoint error_propagation_heisenberg(const PureState& psi, const PauliOperator& O, const PauliOperator& A_eff,
                                            const PauliOperator& A2_eff, double theta);
/// Mixed probe: rho_theta = U rho U^dag.
PrecisionPoint error_propagation_mixed(const MixedState& rho, const PauliOperator& O, const PauliOperator& A,
                                       double theta);

/// Centred difference with Richardson extrapolation.
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

struct PrecisionCurve {
    std::vector<double> theta;
    std::vector<double> signal;
    std::vector<double> variance;
    std::vector<double> delta_theta;

    void validate() const;
};

PrecisionCurve precision_curve(const PureState& psi, const PauliOperator& O, const PauliOperator& A,
                               const std::vector<double>& grid);

/// POVM effect acting on state vectors.
struct Effect {
    StateMap apply;
    std::string label;
    /// Orthogonal projector: probabilities are taken as ||E psi||^2.
    bool projector = false;
};

/// theta -> state, with optional exact derivative d psi / d theta.
struct StateFamily {
    std::function<PureState(double)> state;
    std::function<Vec(double)> derivative;
};

/// Imprinting family e^{i theta O}|psi> with its exact derivative.
StateFamily imprint_family(const PureState& psi, const PauliOperator& O);

/// sum_k (dP_k)^2 / P_k over outcomes with P_k > 1e-14.
/// Throws DomainError when the effects are not positive or not complete.
double classical_fisher(const std::vector<Effect>& povm, const StateFamily& family, double theta,
                        double h_fd = 1e-5);
double classical_fisher(const std::vector<Mat>& povm, const Mat& rho, const Mat& drho);

/// {(I + A)/2, (I - A)/2} for an involutory Pauli operator A.
std::vector<Effect> parity_povm(const PauliOperator& A);

/// Probabilities (p_0, p_1) of a binary POVM.
std::vector<double> povm_probabilities(const std::vector<Effect>& povm, const PureState& psi);

/// F_0 ... F_{n_max}.
std::vector<double> fn_sequence(const MixedState& rho, const PauliOperator& O, int n_max);
/// 4 Tr(rho [rho, O] O) / Tr(rho^2).
double d2(const MixedState& rho, const PauliOperator& O);
/// n-th Jeffreys distance (n >= 2).
double jeffreys_n(const Mat& rho, const Mat& sigma, int n);

} // namespace critsense
