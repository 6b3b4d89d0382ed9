#include "critsense/metrology.hpp"
#include "critsense/policy.hpp"

#include <cmath>

namespace critsense {

namespace {

constexpr double kMinSlope = 1e-14;

PrecisionPoint finish_variance(double theta, double mean, double variance, double slope) {
    PrecisionPoint p;
    p.theta = theta;
    p.signal = mean;
    p.variance = std::max(0.0, variance);
    p.derivative = slope;
    if (std::abs(slope) >= kMinSlope) p.delta_theta = std::sqrt(p.variance) / std::abs(slope);
    return p;
}

PrecisionPoint finish(double theta, double mean, double second, double slope) {
    return finish_variance(theta, mean, second - mean * mean, slope);
}

} // namespace

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

PrecisionPoint error_propagation(const PureState& psi, const PauliOperator& O, const StateMap& A, double theta,
                                 DerivativeMode mode, double h_fd) {
    const PureState st = evolve_phase(psi, O, theta);
    const Vec& v = st.amplitudes();
    const Vec Av = A(v);
    const double mean = v.dot(Av).real();
    // ||(A - <A>) psi||^2 keeps its digits when the variance is tiny
    const double var = (Av - mean * v).squaredNorm();
    double slope;
    if (mode == DerivativeMode::analytic) {
        // d<A>/dtheta = i <[A, O]> = -2 Im <A psi | O psi>
        slope = -2.0 * Av.dot(apply(O, v)).imag();
    } else {
        auto f = [&](double t) {
            const Vec w = evolve_phase(psi, O, t).amplitudes();
            return w.dot(A(w)).real();
        };
        slope = richardson_derivative(f, theta, h_fd);
    }
    return finish_variance(theta, mean, var, slope);
}

PrecisionPoint error_propagation(const PureState& psi, const PauliOperator& O, const PauliOperator& A, double theta,
                                 DerivativeMode mode, double h_fd) {
    if (!A.is_hermitian()) throw DomainError("metrology", "error_propagation", "observable is not Hermitian");
    const CompiledOperator op(A);
    StateMap map = [&op](const Vec& v) {
        Vec out;
        op.apply(v, out);
        return out;
    };
    return error_propagation(psi, O, map, theta, mode, h_fd);
}

PrecisionPoint error_propagation_heisenberg(const PureState& psi, const PauliOperator& O, const PauliOperator& A_eff,
                                            const PauliOperator& A2_eff, double theta) {
    const PureState st = evolve_phase(psi, O, theta);
    const Vec& v = st.amplitudes();
    const Vec Av = apply(A_eff, v);
    const double mean = v.dot(Av).real();
    const double second = expectation(st, A2_eff).real();
    const double slope = -2.0 * Av.dot(apply(O, v)).imag();
    return finish(theta, mean, second, slope);
}

PrecisionPoint error_propagation_mixed(const MixedState& rho, const PauliOperator& O, const PauliOperator& A,
                                       double theta) {
    if (!A.is_hermitian()) throw DomainError("metrology", "error_propagation", "observable is not Hermitian");
    const int n = rho.n_qubits();
    const Eigen::Index dim = static_cast<Eigen::Index>(rho.dim());
    Mat U(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        U.col(c) = evolve_phase(PureState::basis(n, static_cast<std::uint64_t>(c)), O, theta).amplitudes();
    Mat rt = U * rho.matrix() * U.adjoint();
    rt = 0.5 * (rt + rt.adjoint()).eval();
    const MixedState st(n, rt);
    const double mean = expectation(st, A).real();
    const double second = expectation(st, A * A).real();
    const PauliOperator comm = (A * O - O * A) * cplx(0.0, 1.0);
    const double slope = expectation(st, comm).real();
    return finish(theta, mean, second, slope);
}

void PrecisionCurve::validate() const {
    for (std::size_t i = 1; i < theta.size(); ++i)
        if (!(theta[i] > theta[i - 1])) throw DomainError("metrology", "precision_curve", "grid not increasing");
    for (double d : delta_theta)
        if (d < 0.0) throw DomainError("metrology", "precision_curve", "negative precision");
}

PrecisionCurve precision_curve(const PureState& psi, const PauliOperator& O, const PauliOperator& A,
                               const std::vector<double>& grid) {
    PrecisionCurve c;
    for (double t : grid) {
        const PrecisionPoint p = error_propagation(psi, O, A, t);
        c.theta.push_back(t);
        c.signal.push_back(p.signal);
        c.variance.push_back(p.variance);
        c.delta_theta.push_back(p.delta_theta);
    }
    c.validate();
    return c;
}

StateFamily imprint_family(const PureState& psi, const PauliOperator& O) {
    StateFamily f;
    f.state = [psi, O](double t) { return evolve_phase(psi, O, t); };
    f.derivative = [psi, O](double t) {
        const cplx I(0.0, 1.0);
        return Vec(I * apply(O, evolve_phase(psi, O, t).amplitudes()));
    };
    return f;
}

namespace {

void check_povm(const std::vector<Effect>& povm, int n) {
    if (povm.empty()) throw DomainError("metrology", "classical_fisher", "empty POVM");
    const Eigen::Index dim = Eigen::Index{1} << n;
    std::vector<Vec> probes;
    if (dim <= 64) {
        for (Eigen::Index b = 0; b < dim; ++b) probes.push_back(PureState::basis(n, b).amplitudes());
    }
    for (int r = 0; r < 3; ++r) probes.push_back(random_state(n, 0xC0FFEEULL + r).amplitudes());
    for (const auto& v : probes) {
        Vec sum = Vec::Zero(dim);
        for (const auto& e : povm) {
            const Vec ev = e.apply(v);
            if (v.dot(ev).real() < -1e-10) throw DomainError("metrology", "classical_fisher", "effect is not positive");
            sum += ev;
        }
        if ((sum - v).cwiseAbs().maxCoeff() > 1e-10)
            throw DomainError("metrology", "classical_fisher", "POVM effects do not sum to identity");
    }
}

} // namespace

double classical_fisher(const std::vector<Effect>& povm, const StateFamily& family, double theta, double h_fd) {
    const PureState st = family.state(theta);
    check_povm(povm, st.n_qubits());
    const Vec& v = st.amplitudes();
    double F = 0.0;
    for (const auto& e : povm) {
        const Vec ev = e.apply(v);
        const double p = e.projector ? ev.squaredNorm() : v.dot(ev).real();
        if (p <= 1e-14) continue;
        double dp;
        if (family.derivative) {
            dp = 2.0 * family.derivative(theta).dot(ev).real();
        } else {
            auto f = [&](double t) {
                const Vec w = family.state(t).amplitudes();
                return w.dot(e.apply(w)).real();
            };
            dp = richardson_derivative(f, theta, h_fd);
        }
        F += dp * dp / p;
    }
    return F;
}

double classical_fisher(const std::vector<Mat>& povm, const Mat& rho, const Mat& drho) {
    Mat sum = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& E : povm) sum += E;
    if ((sum - Mat::Identity(rho.rows(), rho.cols())).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("metrology", "classical_fisher", "POVM effects do not sum to identity");
    double F = 0.0;
    for (const auto& E : povm) {
        const double p = (rho * E).trace().real();
        if (p <= 1e-14) continue;
        const double dp = (drho * E).trace().real();
        F += dp * dp / p;
    }
    return F;
}

std::vector<Effect> parity_povm(const PauliOperator& A) {
    if (!A.is_hermitian()) throw DomainError("metrology", "parity_povm", "observable is not Hermitian");
    const auto op = std::make_shared<CompiledOperator>(A);
    auto make = [op](double sign) {
        return [op, sign](const Vec& v) {
            Vec out;
            op->apply(v, out);
            return Vec(0.5 * (v + sign * out));
        };
    };
    return {{make(+1.0), "+1", true}, {make(-1.0), "-1", true}};
}

std::vector<double> povm_probabilities(const std::vector<Effect>& povm, const PureState& psi) {
    std::vector<double> p;
    for (const auto& e : povm) {
        const Vec ev = e.apply(psi.amplitudes());
        p.push_back(e.projector ? ev.squaredNorm() : psi.amplitudes().dot(ev).real());
    }
    return p;
}

} // namespace critsense
