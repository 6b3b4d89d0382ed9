#include "critsense/lanczos.hpp"
#include "critsense/policy.hpp"
#include "critsense/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace critsense {

namespace {

void orthogonalize(Vec& v, const std::vector<Vec>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= b.dot(v) * b;
}

} // namespace

EigenPair lanczos_lowest(const LinearMap& H, std::size_t dim, const LinearMap& project,
                         const std::vector<Vec>& deflate, const LanczosOptions& opts) {
    const Eigen::Index n = static_cast<Eigen::Index>(dim);
    CounterRng rng(opts.seed);
    Vec start(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] = cplx(rng.normal(), rng.normal());

    auto prepare = [&](Vec& v) {
        if (project) {
            Vec tmp;
            project(v, tmp);
            v = tmp;
        }
        orthogonalize(v, deflate);
    };

    prepare(start);
    if (start.norm() < 1e-12)
        throw NumericError("qcore", "lanczos", "start vector vanishes in the requested subspace");
    start.normalize();

    EigenPair result;
    const int m_max = static_cast<int>(std::min<std::size_t>(opts.krylov_dim, dim));
    Vec w;
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        std::vector<Vec> Q{start};
        std::vector<double> alpha, beta;
        for (int j = 0; j < m_max; ++j) {
            H(Q[j], w);
            ++result.matvecs;
            prepare(w);
            const double a = Q[j].dot(w).real();
            alpha.push_back(a);
            orthogonalize(w, Q);
            const double b = w.norm();
            if (b < 1e-13 || j + 1 == m_max) break;
            beta.push_back(b);
            Q.push_back(w / b);
        }
        const int m = static_cast<int>(alpha.size());
        RMat T = RMat::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(T);
        const RVec y = es.eigenvectors().col(0);
        Vec ritz = Vec::Zero(n);
        for (int i = 0; i < m; ++i) ritz += y[i] * Q[i];
        prepare(ritz);
        ritz.normalize();

        H(ritz, w);
        ++result.matvecs;
        const double theta = ritz.dot(w).real();
        const double res = (w - theta * ritz).norm();
        result.value = theta;
        result.vector = ritz;
        result.residual = res;
        if (res < opts.tol * std::max(1.0, std::abs(theta)) || m < m_max) return result;
        start = ritz;
    }
    if (result.residual > 1e-8)
        throw NumericError("qcore", "lanczos", "eigensolver did not converge");
    return result;
}

} // namespace critsense
