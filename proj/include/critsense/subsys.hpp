#pragma once

#include "critsense/fermion.hpp"
#include "critsense/metrology.hpp"
#include "critsense/state.hpp"

#include <optional>
#include <vector>

namespace critsense {

/// prod_{j = offset}^{offset + L_sub - 1} X_j.
PauliOperator subsystem_parity(int L, int L_sub, int offset = 0);
/// i gamma_{offset, alpha} gamma_{offset + L_sub, beta} with
/// gamma_{j,1} = X_j prod_{i<j} (-Z_i) and gamma_{j,2} = Y_j prod_{i<j} (-Z_i).
PauliOperator xxz_string_parity(int L, int L_sub, int alpha, int beta, int offset = 0);

/// Parity-type measurement on a contiguous region together with an imprinter
/// supported inside it and anticommuting with the measurement.
struct SubsystemProtocol {
    int L = 0;
    int L_sub = 0;
    int offset = 0;
    PauliOperator measurement;
    PauliOperator imprinter;

    void validate() const;
};

/// Ising protocol: prod X on the region, imprinter (1/2) sum Z on the region.
/// A negative offset centres the region.
SubsystemProtocol ising_subsystem_protocol(int L, int L_sub, int offset = -1);
/// XXZ protocol: Majorana string parity, imprinter (1/2) sum X strictly inside the string.
SubsystemProtocol xxz_subsystem_protocol(int L, int L_sub, int alpha, int beta, int offset = -1);

/// <psi| U^dag Pi U |psi> by explicit conjugation.
double parity_expectation_direct(const PureState& psi, const SubsystemProtocol& p, double theta);
/// <psi| Pi e^{2 i theta O} |psi>, using {Pi, O} = 0.
double parity_expectation_pullthrough(const PureState& psi, const SubsystemProtocol& p, double theta);

/// Signal, variance 1 - <Pi>^2 and delta theta over the grid (pull-through form).
PrecisionCurve parity_theta_curve(const PureState& psi, const SubsystemProtocol& p, const std::vector<double>& grid);

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct WindowReport {
    bool interior_minimum = false;
    bool has_window = false;
    double theta_l = 0.0;
    double theta_min = 0.0;
    double theta_r = 0.0;
    double delta_theta_min = 0.0;
    double sql_reference = 0.0;  // 1 / sqrt(2 L_sub)
};
/// Interior argmin of delta theta refined by a parabola through the neighbouring
/// grid points, and the crossings with the SQL reference around it.
WindowReport window_report(const PrecisionCurve& curve, int L_sub);

/// Sup distance between two rescaled curves <Pi> L_sub^{1/4} against
/// theta L_sub^{7/8}, compared on their common rescaled range.
double collapse_distance(const PrecisionCurve& a, int L_a, const PrecisionCurve& b, int L_b, int samples = 400);

struct XxzWindowRow {
    int L_sub;
    WindowReport report;
};
struct XxzWindowTable {
    double delta_xxz = 0.0;
    double K = 0.0;
    bool window_predicted = false;  // K >= 3/2
    double exp_delta_theta_min = 0.0;
    double exp_theta_l = 0.0;
    double exp_theta_min = 0.0;
    double exp_theta_r = 0.0;
    std::vector<XxzWindowRow> rows;
    /// Indicative finite-size fits of theta_min and delta_theta_min against L_sub.
    std::optional<PowerLawFit> fit_theta_min;
    std::optional<PowerLawFit> fit_delta_theta_min;
};
/// Measured windows of the (1,1) string parity on the periodic XXZ ground state of size L.
XxzWindowTable xxz_window_scaling(double delta_xxz, const std::vector<int>& L_sub_list, int L = 14,
                                  const std::vector<double>& grid = {});

/// mu_j = S_{1/2} ... S_{j-1/2} zeta_j with zeta_j = |0>(sqrt(1-n) <0| - sqrt(n) <1|).
class RydbergDisorderOperator {
public:
    RydbergDisorderOperator(int L, int j, double mean_occupation);

    Vec apply(const Vec& v) const;
    Vec apply_adjoint(const Vec& v) const;
    int site() const { return j_; }

private:
    int L_;
    int j_;
    double a_;
    double b_;
};

RydbergDisorderOperator rydberg_disorder_operator(int L, int j, double mean_occupation);

/// <n> averaged over sites.
double mean_occupation(const PureState& psi);

/// <psi_theta| mu_0^dag mu_{L_sub} |psi_theta> with psi_theta = e^{i theta O_sub} psi
/// and O_sub = (1/2) sum_{0<j<L_sub} (-1)^j (n_{j+1} - n_j).
std::vector<cplx> rydberg_disorder_curve(const PureState& psi, int L_sub, double mean_occ,
                                         const std::vector<double>& grid);

} // namespace critsense
