#pragma once

#include "critsense/pauli.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace critsense {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Terms grouped by X mask so the sparse action is a gather per group.
class CompiledOperator {
public:
    explicit CompiledOperator(const PauliOperator& op);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return std::size_t{1} << n_; }

    /// out = op * in, OpenMP-parallel over output rows.
    void apply(const Vec& in, Vec& out) const;
    /// Reference implementation: serial scatter over terms.
    void apply_serial(const Vec& in, Vec& out) const;

    /// Diagonal part evaluated on every basis state.
    RVec diagonal_real() const;

private:
    struct Group {
        std::uint64_t x;
        std::vector<std::uint64_t> zmasks;
        std::vector<cplx> coeffs; // coefficient times i^{#Y}
    };
    int n_ = 0;
    std::vector<Group> groups_;
    PauliOperator source_;
};

Vec apply(const PauliOperator& op, const Vec& v);
Vec apply_serial(const PauliOperator& op, const Vec& v);

/// Number of fixed reduction chunks; independent of the thread count so
/// parallel sums are bitwise reproducible.
inline constexpr int kReductionChunks = 64;

/// Deterministic parallel sum of f(i) for i in [0, n).
template <class T, class F>
T chunked_sum(std::size_t n, F&& f) {
    std::vector<T> partial(kReductionChunks, T{});
    const std::size_t chunk = (n + kReductionChunks - 1) / kReductionChunks;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < kReductionChunks; ++c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += f(i);
        partial[c] = acc;
    }
    T total{};
    for (const auto& p : partial) total += p;
    return total;
}

/// Dense matrix of the operator; throws CapacityError above the dense cap.
Mat to_matrix(const PauliOperator& op);

/// Real diagonal of a diagonal operator, without building a matrix.
RVec diagonal_values(const PauliOperator& op);

/// Moves the content of site j to site perm[j].
Vec permute_sites(const Vec& v, int n, const std::vector<int>& perm);
/// Cyclic shift by `shift` sites (content of j moves to j + shift).
Vec translate_sites(const Vec& v, int n, int shift = 1);

} // namespace critsense
