#pragma once

#include "critsense/kernels.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace critsense {

/// Normalized state vector over the 2^n computational basis.
class PureState {
public:
    PureState() = default;
    /// Validates the norm; pass normalize=true to rescale instead.
    PureState(int n, Vec amplitudes, bool normalize = false);

    static PureState basis(int n, std::uint64_t index);
    /// Product state with every qubit in a|0> + b|1>.
    static PureState product(int n, cplx a, cplx b);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    const Vec& amplitudes() const { return amp_; }
    cplx operator[](std::size_t i) const { return amp_[static_cast<Eigen::Index>(i)]; }

private:
    int n_ = 0;
    Vec amp_;
};

struct Spectrum {
    RVec values; // ascending
    Mat vectors; // columns
};

/// Density matrix with a lazily computed, thread-safe spectrum cache.
class MixedState {
public:
    MixedState() = default;
    /// Checks Hermiticity and unit trace; positivity is checked with the spectrum.
    MixedState(int n, Mat rho);
    static MixedState from_pure(const PureState& psi);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    const Mat& matrix() const { return rho_; }

    /// Eigen-decomposition; throws DomainError when an eigenvalue is below -psd_tol.
    const Spectrum& spectrum() const;
    bool has_spectrum() const;
    double purity() const;

private:
    struct Cache {
        std::once_flag once;
        Spectrum spec;
    };
    int n_ = 0;
    Mat rho_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

cplx expectation(const PureState& psi, const PauliOperator& op);
cplx expectation(const MixedState& rho, const PauliOperator& op);
/// Serial reference for the pure-state expectation.
cplx expectation_serial(const PureState& psi, const PauliOperator& op);

double variance(const PureState& psi, const PauliOperator& op);
double variance(const MixedState& rho, const PauliOperator& op);

/// e^{i theta O}|psi>. Diagonal and single-site generators avoid any
/// matrix exponential; other generators use a scaled Taylor series.
PureState evolve_phase(const PureState& psi, const PauliOperator& O, double theta);

Vec apply_operator(const PauliOperator& op, const PureState& psi);
PureState dephase_normalize(const Vec& v, int n);

MixedState partial_trace(const MixedState& rho, const std::vector<int>& kept_sites);
MixedState partial_trace(const PureState& psi, const std::vector<int>& kept_sites);

/// Haar-like random state from a seeded counter generator.
PureState random_state(int n, std::uint64_t seed);
/// Random full-rank density matrix (Ginibre construction).
MixedState random_mixed_state(int n, std::uint64_t seed, int rank = -1);

} // namespace critsense
