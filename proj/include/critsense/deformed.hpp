#pragma once

#include "critsense/state.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace critsense {

/// e^{beta sum_j s_j Gamma_j} with single-site Paulis Gamma_j on distinct sites.
/// beta = +inf selects the projector prod_j (I + s_j Gamma_j) / 2.
struct DeformationSpec {
    double beta = 0.0;
    std::vector<int> sites;
    std::vector<char> letters;  // one of X, Y, Z per site
    std::vector<int> outcomes;  // +1 or -1 per site

    void validate(int n) const;
    /// Gamma_j = letter on chain-1 sites of an L-rung ladder.
    static DeformationSpec ladder_chain1(int L, double beta, const std::vector<int>& s, char letter = 'X');
    /// Uniform letter and outcomes on every site of a chain.
    static DeformationSpec uniform(int n, double beta, char letter, int s = 1);
};

/// Normalised deformed state; throws NumericError when the state is annihilated.
PureState deform(const PureState& psi, const DeformationSpec& spec);

struct Outcome {
    std::vector<int> s;
    double probability = 0.0;
    PureState state;  // normalised post-measurement state; unset when probability is zero
};

/// Born ensemble of a (weak for finite beta) measurement of commuting involutory
/// Paulis with Kraus operators e^{beta s A} / sqrt(2 cosh 2 beta).
struct OutcomeEnsemble {
    std::vector<PauliString> measured;
    double beta = std::numeric_limits<double>::infinity();
    std::vector<Outcome> outcomes;

    double total_probability() const;
};

/// Exhaustive mode, m <= 16 measured operators.
OutcomeEnsemble enumerate_outcomes(const PureState& psi, const std::vector<PauliString>& ops,
                                   double beta = std::numeric_limits<double>::infinity());
/// Sequential Born-rule sampling with a counter-based generator.
std::vector<std::vector<int>> sample_outcomes(const PureState& psi, const std::vector<PauliString>& ops,
                                              std::uint64_t seed, int n_samples,
                                              double beta = std::numeric_limits<double>::infinity());

/// X on every chain-1 site of an L-rung ladder, in rung order.
std::vector<PauliString> ladder_chain1_x(int L);

/// sum_s p_s <Z_{j,2} Z_{k,2}>_s s_{j+1} ... s_k for j < k (rungs, zero based).
double decoded_correlator(const OutcomeEnsemble& ens, int j, int k);
/// Same quantity with the outcome signs replaced by inserted X_{i,1}
/// operators, tanh(2 beta)^{k-j} <Z_{j,2} Z_{k,2} prod_{i=j+1}^{k} X_{i,1}>.
double decoded_correlator_insertion(const PureState& psi, int j, int k,
                                    double beta = std::numeric_limits<double>::infinity());

struct SampledEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    int shots = 0;
};
SampledEstimate decoded_correlator_sampled(const PureState& psi, const std::vector<std::vector<int>>& samples, int j,
                                           int k, double beta = std::numeric_limits<double>::infinity());

/// sum_j (s_0 ... s_j) Z_{j,2} on an L-rung ladder.
PauliOperator outcome_generator(int L, const std::vector<int>& s);
/// Rungs whose chain-2 qubit is conjugated by X to realise the outcome imprinter.
std::vector<int> outcome_flip_rungs(const std::vector<int>& s);

/// 4 Var of the outcome generator on the post-measurement state.
double outcome_qfi(const PureState& post, const std::vector<int>& s);
/// sum_s p_s F_Q^s over the exhaustive ensemble.
double averaged_qfi(const OutcomeEnsemble& ens);
/// 4 sum_{jk} <Z_{j,2} Z_{k,2}>_d from the insertion route. The probe must be a
/// chain-2 parity eigenstate so that every outcome has <Z_{j,2}>_s = 0.
double averaged_qfi_decoded(const PureState& psi, double beta = std::numeric_limits<double>::infinity());

struct LroReport {
    std::vector<double> beta;
    std::vector<double> correlator;  // <Z_{0,2} Z_{L-1,2}> after uniform deformation
    bool monotone = false;
    bool threefold = false;          // last value exceeds 3x the beta = 0 value
};
LroReport uniform_outcome_lro_check(const PureState& ladder_state, const std::vector<double>& beta_list);

} // namespace critsense
