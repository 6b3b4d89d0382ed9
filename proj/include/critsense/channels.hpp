#pragma once

#include "critsense/metrology.hpp"
#include "critsense/state.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace critsense {

enum class ChannelKind { bitflip_x, dephase_z, zz, global_dephase };
std::string to_string(ChannelKind k);
ChannelKind channel_kind_from_string(const std::string& s);

struct ChannelSpec {
    ChannelKind kind = ChannelKind::dephase_z;
    double p = 0.0;
    double chi = 0.0;
    double t = 0.0;
    /// Sites (or bond left ends for zz) the channel acts on; all when empty.
    std::optional<std::vector<int>> site_mask;
    /// Gauss-Hermite nodes for the global kind.
    int quadrature_nodes = 64;

    void validate() const;
};

/// Sites or bonds the channel acts on for an n-qubit register. ZZ bonds are
/// periodic for n >= 3.
std::vector<int> channel_sites(const ChannelSpec& spec, int n);

/// Kraus Pauli of a per-site kind at site (or bond) j.
PauliString channel_pauli(const ChannelSpec& spec, int n, int j);

/// Channel action on an arbitrary operator (used for the Choi matrix).
Mat apply_channel_matrix(const Mat& rho, int n, const ChannelSpec& spec);
MixedState apply_channel(const MixedState& rho, const ChannelSpec& spec);

/// Choi matrix sum_{ij} |i><j| (x) E(|i><j|); throws CapacityError for n > 5.
Mat choi_matrix(const ChannelSpec& spec, int n);

/// Heisenberg-picture channel E* on a Pauli operator (per-site kinds only).
PauliOperator conjugate_channel(const PauliOperator& A, const ChannelSpec& spec);

/// Global dephasing in closed form: rho_ab exp(-chi (m_a - m_b)^2 / 4).
Mat global_dephase_exact(const Mat& rho, int n, double chi);

/// Gauss-Hermite nodes and weights for int e^{-x^2} f(x) dx (Golub-Welsch).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// 4 (1 - 2p)^2 <O^2> + 16 p (1 - p) L.
double bitflip_qfi_formula(int L, double p, double o2_pristine);

enum class CollectiveObservable { s_theta, s_theta_squared };
struct CollectiveAction {
    double a;
    double b;
};
/// E*[obs] = a obs + b I for local Z dephasing of a collective xy-plane spin.
CollectiveAction conjugate_collective_action(const ChannelSpec& spec, int L, CollectiveObservable obs);

/// (pi / sqrt(L)) sqrt(C_y + p (1 - p) / (1 - 2p)^2); DomainError for p >= 1/2.
double dephased_delta_theta_critical(int L, double p, double C_y);
/// e^{L |ln(1 - 2p)|} / L; DomainError for p >= 1/2.
double ghz_dephased_delta_theta(int L, double p);

/// Spin-measurement precision under local Z dephasing evaluated in the
/// Heisenberg picture on a pure probe, A = (1/2) sum Y, O = (1/2) sum Z.
PrecisionPoint dephased_spin_precision(const PureState& psi, double p, double theta);

/// (pi / (t sqrt L)) sqrt(e^{-2 chi} C_y + (e^{2 chi} - e^{-2 chi}) (C_x + C_y) / 2).
double global_dephasing_sensitivity(int L, double t, double chi, double C_x, double C_y);

/// Field sensitivity delta B at B = 0 for a pure probe under global dephasing,
/// measured with S_0 = (1/2) sum Y and the conjugate channel in closed form.
double global_dephasing_sensitivity_ed(const PureState& psi, double t, double chi);

/// Noise correlation C(tau) with chi(t) = int_0^t (t - tau) C(tau) dtau.
struct NoiseKernel {
    std::function<double(double)> C;

    double chi(double t) const;
    static NoiseKernel quasi_static(double sigma2);
    static NoiseKernel exponential(double sigma2, double tau_c);
};

struct ZzInvarianceReport {
    double qfi_before;
    double qfi_after;
    bool equal;
};
/// QFI for sum Z before and after the ZZ channel; equal within 1e-8.
ZzInvarianceReport zz_channel_invariance_check(const MixedState& rho, const PauliOperator& O, double p);

} // namespace critsense
