#include "critsense/metrology.hpp"
#include "critsense/policy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace critsense {

namespace {

Mat generator_matrix_in_eigenbasis(const MixedState& rho, const PauliOperator& O) {
    const Spectrum& sp = rho.spectrum();
    CompiledOperator op(O);
    Mat OV(sp.vectors.rows(), sp.vectors.cols());
    Vec col;
    for (Eigen::Index c = 0; c < sp.vectors.cols(); ++c) {
        op.apply(sp.vectors.col(c), col);
        OV.col(c) = col;
    }
    return sp.vectors.adjoint() * OV;
}

double log_trace_product(const Mat& a, const Mat& b) {
    const double t = (a * b).trace().real();
    if (!(t > 0.0)) throw NumericError("metrology", "jeffreys_n", "non-positive trace in logarithm");
    return std::log(t);
}

Mat matrix_power(const Mat& m, int n) {
    Mat r = Mat::Identity(m.rows(), m.cols());
    for (int k = 0; k < n; ++k) r = (r * m).eval();
    return r;
}

} // namespace

std::vector<double> fn_sequence(const MixedState& rho, const PauliOperator& O, int n_max) {
    if (n_max < 0) throw DomainError("metrology", "fn_sequence", "n_max must be >= 0");
    if (rho.n_qubits() != O.n_qubits()) throw DomainError("metrology", "fn_sequence", "dimension mismatch");
    const Spectrum& sp = rho.spectrum();
    const Mat Ob = generator_matrix_in_eigenbasis(rho, O);
    const RVec& lam = sp.values;
    std::vector<double> F(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        for (Eigen::Index j = i + 1; j < lam.size(); ++j) {
            const double s = lam[i] + lam[j];
            if (s > 1.0 + 1e-10) throw NumericError("metrology", "fn_sequence", "eigenvalue pair sum exceeds one");
            const double diff = lam[i] - lam[j];
            const double base = 4.0 * diff * diff * std::norm(Ob(i, j));
            const double q = std::max(0.0, 1.0 - s);
            double w = 1.0, acc = 0.0;
            for (int l = 0; l <= n_max; ++l) {
                acc += w;
                F[l] += base * acc;
                w *= q;
            }
        }
    return F;
}

double d2(const MixedState& rho, const PauliOperator& O) {
    const double f0 = fn_sequence(rho, O, 0)[0];
    return f0 / rho.purity();
}

double jeffreys_n(const Mat& rho, const Mat& sigma, int n) {
    if (n < 2) throw DomainError("metrology", "jeffreys_n", "n must be >= 2");
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw DomainError("metrology", "jeffreys_n", "dimension mismatch");
    const Mat rn1 = matrix_power(rho, n - 1), sn1 = matrix_power(sigma, n - 1);
    return (log_trace_product(rn1, rho) + log_trace_product(sn1, sigma) - log_trace_product(rho, sn1) -
            log_trace_product(sigma, rn1)) /
           (n - 1);
}

} // namespace critsense
