#pragma once

#include "critsense/kernels.hpp"

#include <functional>
#include <vector>

namespace critsense {

using LinearMap = std::function<void(const Vec&, Vec&)>;

struct LanczosOptions {
    int krylov_dim = 80;
    int max_restarts = 200;
    double tol = 1e-11;
    std::uint64_t seed = 0x5eedULL;
};

struct EigenPair {
    double value = 0.0;
    Vec vector;
    double residual = 0.0;
    int matvecs = 0;
};

/// Lowest eigenpair of a Hermitian map restricted to the range of `project`
/// and orthogonal to `deflate`. Full reorthogonalisation, explicit restarts.
EigenPair lanczos_lowest(const LinearMap& H, std::size_t dim, const LinearMap& project,
                         const std::vector<Vec>& deflate, const LanczosOptions& opts = {});

} // namespace critsense
