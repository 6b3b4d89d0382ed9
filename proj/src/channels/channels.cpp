#include "critsense/channels.hpp"
#include "critsense/policy.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <numbers>

namespace critsense {

std::string to_string(ChannelKind k) {
    switch (k) {
    case ChannelKind::bitflip_x: return "bitflip_x";
    case ChannelKind::dephase_z: return "dephase_z";
    case ChannelKind::zz: return "zz";
    case ChannelKind::global_dephase: return "global_dephase";
    }
    return "?";
}

ChannelKind channel_kind_from_string(const std::string& s) {
    if (s == "bitflip_x") return ChannelKind::bitflip_x;
    if (s == "dephase_z") return ChannelKind::dephase_z;
    if (s == "zz") return ChannelKind::zz;
    if (s == "global_dephase") return ChannelKind::global_dephase;
    throw DomainError("channels", "channel_kind_from_string", "unknown channel kind '" + s + "'");
}

void ChannelSpec::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("channels", "validate", "p must lie in [0, 1]");
    if (!(chi >= 0.0)) throw DomainError("channels", "validate", "chi must be >= 0");
    if (!(t >= 0.0)) throw DomainError("channels", "validate", "t must be >= 0");
    if (quadrature_nodes < 2) throw DomainError("channels", "validate", "need at least two quadrature nodes");
}

std::vector<int> channel_sites(const ChannelSpec& spec, int n) {
    std::vector<int> sites;
    if (spec.site_mask) {
        for (int j : *spec.site_mask) {
            if (j < 0 || j >= n) throw DomainError("channels", "channel_sites", "site mask out of range");
            sites.push_back(j);
        }
        return sites;
    }
    const int count = (spec.kind == ChannelKind::zz && n < 3) ? n - 1 : n;
    for (int j = 0; j < count; ++j) sites.push_back(j);
    return sites;
}

PauliString channel_pauli(const ChannelSpec& spec, int n, int j) {
    switch (spec.kind) {
    case ChannelKind::bitflip_x: return PauliString{site_bit(n, j), 0};
    case ChannelKind::dephase_z: return PauliString{0, site_bit(n, j)};
    case ChannelKind::zz: return PauliString{0, site_bit(n, j) | site_bit(n, (j + 1) % n)};
    case ChannelKind::global_dephase: break;
    }
    throw DomainError("channels", "channel_pauli", "global dephasing has no single Kraus Pauli");
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw DomainError("channels", "gauss_hermite", "n must be >= 1");
    RMat J = RMat::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<RMat> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
        nodes[k] = es.eigenvalues()[k];
        const double v0 = es.eigenvectors()(0, k);
        weights[k] = std::sqrt(std::numbers::pi) * v0 * v0;
    }
}

namespace {

RVec magnetisation(int n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    RVec m(dim);
    for (Eigen::Index b = 0; b < dim; ++b) m[b] = n - 2.0 * std::popcount(static_cast<std::uint64_t>(b));
    return m;
}

// rho -> (1 - p) rho + p P rho P for one Pauli string, in place.
void pauli_mix(Mat& rho, const PauliString& P, double p) {
    const Eigen::Index dim = rho.rows();
    if (P.x == 0) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index b = 0; b < dim; ++b) {
            const bool sb = std::popcount(static_cast<std::uint64_t>(b) & P.z) & 1;
            for (Eigen::Index a = 0; a < dim; ++a) {
                const bool sa = std::popcount(static_cast<std::uint64_t>(a) & P.z) & 1;
                if (sa != sb) rho(a, b) *= (1.0 - 2.0 * p);
            }
        }
        return;
    }
    // P rho P^dag: entry (a, b) picks up rho(a^x, b^x) with the phases of P
    const Mat src = rho;
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < dim; ++b) {
        const std::uint64_t bs = static_cast<std::uint64_t>(b) ^ P.x;
        const cplx pb = std::conj(P.phase(bs));
        for (Eigen::Index a = 0; a < dim; ++a) {
            const std::uint64_t as = static_cast<std::uint64_t>(a) ^ P.x;
            const cplx flipped = P.phase(as) * src(static_cast<Eigen::Index>(as), static_cast<Eigen::Index>(bs)) * pb;
            rho(a, b) = (1.0 - p) * src(a, b) + p * flipped;
        }
    }
}

} // namespace

Mat global_dephase_exact(const Mat& rho, int n, double chi) {
    const RVec m = magnetisation(n);
    Mat out = rho;
    for (Eigen::Index b = 0; b < rho.cols(); ++b)
        for (Eigen::Index a = 0; a < rho.rows(); ++a) {
            const double d = m[a] - m[b];
            out(a, b) *= std::exp(-chi * d * d / 4.0);
        }
    return out;
}

Mat apply_channel_matrix(const Mat& rho, int n, const ChannelSpec& spec) {
    spec.validate();
    if (n > policy().dense_cap) throw CapacityError("channels", "apply_channel", "L exceeds the dense cap");
    if (rho.rows() != (Eigen::Index{1} << n)) throw DomainError("channels", "apply_channel", "dimension mismatch");
    if (spec.kind == ChannelKind::global_dephase) {
        // average of e^{-i phi sum Z} rho e^{i phi sum Z} over phi ~ N(0, chi / 2)
        std::vector<double> x, w;
        gauss_hermite(spec.quadrature_nodes, x, w);
        const RVec m = magnetisation(n);
        Mat out = Mat::Zero(rho.rows(), rho.cols());
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double phi = std::sqrt(spec.chi) * x[k];
            const double wk = w[k] / std::sqrt(std::numbers::pi);
#pragma omp parallel for schedule(static)
            for (Eigen::Index b = 0; b < rho.cols(); ++b)
                for (Eigen::Index a = 0; a < rho.rows(); ++a)
                    out(a, b) += wk * std::polar(1.0, -phi * (m[a] - m[b])) * rho(a, b);
        }
        return out;
    }
    Mat out = rho;
    if (spec.p == 0.0) return out;
    for (int j : channel_sites(spec, n)) pauli_mix(out, channel_pauli(spec, n, j), spec.p);
    return out;
}

MixedState apply_channel(const MixedState& rho, const ChannelSpec& spec) {
    Mat out = apply_channel_matrix(rho.matrix(), rho.n_qubits(), spec);
    out = 0.5 * (out + out.adjoint()).eval();
    return MixedState(rho.n_qubits(), std::move(out));
}

Mat choi_matrix(const ChannelSpec& spec, int n) {
    if (n > 5) throw CapacityError("channels", "choi_matrix", "n must be <= 5");
    const Eigen::Index d = Eigen::Index{1} << n;
    Mat choi = Mat::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            choi.block(i * d, j * d, d, d) = apply_channel_matrix(e, n, spec);
        }
    return choi;
}

PauliOperator conjugate_channel(const PauliOperator& A, const ChannelSpec& spec) {
    spec.validate();
    if (spec.kind == ChannelKind::global_dephase)
        throw DomainError("channels", "conjugate_channel", "global dephasing is not Pauli-diagonal");
    const int n = A.n_qubits();
    const std::vector<int> sites = channel_sites(spec, n);
    PauliOperator out(n);
    for (const auto& t : A.terms()) {
        int flips = 0;
        for (int j : sites)
            if (!t.str.commutes_with(channel_pauli(spec, n, j))) ++flips;
        out.add(t.coeff * std::pow(1.0 - 2.0 * spec.p, flips), t.str);
    }
    return out;
}

double bitflip_qfi_formula(int L, double p, double o2_pristine) {
    const double q = 1.0 - 2.0 * p;
    return 4.0 * q * q * o2_pristine + 16.0 * p * (1.0 - p) * L;
}

CollectiveAction conjugate_collective_action(const ChannelSpec& spec, int L, CollectiveObservable obs) {
    if (spec.kind != ChannelKind::dephase_z)
        throw DomainError("channels", "conjugate_collective_action", "only local Z dephasing is supported");
    spec.validate();
    const double q = 1.0 - 2.0 * spec.p;
    if (obs == CollectiveObservable::s_theta) return {q, 0.0};
    return {q * q, spec.p * (1.0 - spec.p) * L};
}

double dephased_delta_theta_critical(int L, double p, double C_y) {
    if (!(p >= 0.0 && p < 0.5)) throw DomainError("channels", "dephased_delta_theta_critical", "p must lie in [0, 1/2)");
    if (!(C_y > 0.0)) throw DomainError("channels", "dephased_delta_theta_critical", "C_y must be positive");
    const double q = 1.0 - 2.0 * p;
    return std::numbers::pi / std::sqrt(double(L)) * std::sqrt(C_y + p * (1.0 - p) / (q * q));
}

double ghz_dephased_delta_theta(int L, double p) {
    if (!(p >= 0.0 && p < 0.5)) throw DomainError("channels", "ghz_dephased_delta_theta", "p must lie in [0, 1/2)");
    return std::exp(L * std::abs(std::log(1.0 - 2.0 * p))) / L;
}

PrecisionPoint dephased_spin_precision(const PureState& psi, double p, double theta) {
    const int L = psi.n_qubits();
    ChannelSpec spec;
    spec.kind = ChannelKind::dephase_z;
    spec.p = p;
    const PauliOperator Sy = PauliOperator::sum_single(L, 'Y', 0.5);
    const PauliOperator A_eff = conjugate_channel(Sy, spec);
    const PauliOperator A2_eff = conjugate_channel(Sy * Sy, spec);
    return error_propagation_heisenberg(psi, PauliOperator::sum_single(L, 'Z', 0.5), A_eff, A2_eff, theta);
}

double global_dephasing_sensitivity(int L, double t, double chi, double C_x, double C_y) {
    if (!(chi >= 0.0) || !(t > 0.0)) throw DomainError("channels", "global_dephasing_sensitivity", "need chi >= 0, t > 0");
    const double em = std::exp(-2.0 * chi), ep = std::exp(2.0 * chi);
    return std::numbers::pi / (t * std::sqrt(double(L))) * std::sqrt(em * C_y + 0.5 * (ep - em) * (C_x + C_y));
}

double global_dephasing_sensitivity_ed(const PureState& psi, double t, double chi) {
    if (!(chi >= 0.0) || !(t > 0.0))
        throw DomainError("channels", "global_dephasing_sensitivity_ed", "need chi >= 0, t > 0");
    const int L = psi.n_qubits();
    const PauliOperator Sx = PauliOperator::sum_single(L, 'X', 0.5);
    const PauliOperator Sy = PauliOperator::sum_single(L, 'Y', 0.5);
    const double mx = expectation(psi, Sx).real(), my = expectation(psi, Sy).real();
    const double sx2 = expectation(psi, Sx * Sx).real(), sy2 = expectation(psi, Sy * Sy).real();
    const double e1 = std::exp(-chi), e4 = std::exp(-4.0 * chi);
    const double var = e4 * sy2 + 0.5 * (1.0 - e4) * (sx2 + sy2) - e1 * e1 * my * my;
    // d<S_{theta - B t}>/dB = -t <S_x> for S_0 = (1/2) sum Y rotated by (1/2) sum Z
    const double slope = e1 * t * std::abs(mx);
    if (slope < 1e-14) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, var)) / slope;
}

ZzInvarianceReport zz_channel_invariance_check(const MixedState& rho, const PauliOperator& O, double p) {
    ChannelSpec spec;
    spec.kind = ChannelKind::zz;
    spec.p = p;
    const MixedState out = apply_channel(rho, spec);
    const double before = qfi_mixed(rho, O).value;
    const double after = qfi_mixed(out, O).value;
    const double scale = std::max(1.0, std::abs(before));
    return {before, after, std::abs(before - after) <= 1e-8 * scale};
}

} // namespace critsense
