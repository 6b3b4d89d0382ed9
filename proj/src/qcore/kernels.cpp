#include "critsense/kernels.hpp"
#include "critsense/policy.hpp"

#include <bit>
#include <map>

namespace critsense {

namespace {

cplx i_pow(int k) {
    static const cplx tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tab[k & 3];
}

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

void check_size(int n, const char* op) {
    if (n > policy().sparse_cap)
        throw CapacityError("qcore", op, "qubit count exceeds sparse cap");
}

} // namespace

CompiledOperator::CompiledOperator(const PauliOperator& op) : n_(op.n_qubits()), source_(op) {
    check_size(n_, "compile");
    std::map<std::uint64_t, std::size_t> index;
    for (const auto& t : op.terms()) {
        auto [it, inserted] = index.emplace(t.str.x, groups_.size());
        if (inserted) groups_.push_back({t.str.x, {}, {}});
        Group& g = groups_[it->second];
        g.zmasks.push_back(t.str.z);
        g.coeffs.push_back(t.coeff * i_pow(t.str.y_count()));
    }
}

void CompiledOperator::apply(const Vec& in, Vec& out) const {
    const std::int64_t dim = static_cast<std::int64_t>(this->dim());
    out.resize(dim);
#pragma omp parallel for schedule(static)
    for (std::int64_t a = 0; a < dim; ++a) {
        cplx acc = 0.0;
        for (const auto& g : groups_) {
            const std::uint64_t b = static_cast<std::uint64_t>(a) ^ g.x;
            cplx w = 0.0;
            for (std::size_t t = 0; t < g.zmasks.size(); ++t)
                w += g.coeffs[t] * parity_sign(b & g.zmasks[t]);
            acc += w * in[static_cast<std::int64_t>(b)];
        }
        out[a] = acc;
    }
}

void CompiledOperator::apply_serial(const Vec& in, Vec& out) const {
    const std::uint64_t dim = this->dim();
    out = Vec::Zero(static_cast<Eigen::Index>(dim));
    for (const auto& t : source_.terms()) {
        for (std::uint64_t b = 0; b < dim; ++b)
            out[static_cast<Eigen::Index>(b ^ t.str.x)] += t.coeff * t.str.phase(b) * in[static_cast<Eigen::Index>(b)];
    }
}

RVec CompiledOperator::diagonal_real() const {
    const std::int64_t dim = static_cast<std::int64_t>(this->dim());
    RVec d = RVec::Zero(dim);
    for (const auto& g : groups_) {
        if (g.x != 0) continue;
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < dim; ++b) {
            cplx w = 0.0;
            for (std::size_t t = 0; t < g.zmasks.size(); ++t)
                w += g.coeffs[t] * parity_sign(static_cast<std::uint64_t>(b) & g.zmasks[t]);
            d[b] += w.real();
        }
    }
    return d;
}

Vec apply(const PauliOperator& op, const Vec& v) {
    Vec out;
    CompiledOperator(op).apply(v, out);
    return out;
}

Vec apply_serial(const PauliOperator& op, const Vec& v) {
    Vec out;
    CompiledOperator(op).apply_serial(v, out);
    return out;
}

Mat to_matrix(const PauliOperator& op) {
    const int n = op.n_qubits();
    if (n > policy().dense_cap)
        throw CapacityError("qcore", "to_matrix", "qubit count exceeds dense cap");
    const std::uint64_t dim = std::uint64_t{1} << n;
    Mat m = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& t : op.terms())
        for (std::uint64_t b = 0; b < dim; ++b)
            m(static_cast<Eigen::Index>(b ^ t.str.x), static_cast<Eigen::Index>(b)) += t.coeff * t.str.phase(b);
    return m;
}

RVec diagonal_values(const PauliOperator& op) {
    if (!op.is_diagonal()) throw DomainError("qcore", "diagonal_values", "operator is not diagonal");
    return CompiledOperator(op).diagonal_real();
}

Vec permute_sites(const Vec& v, int n, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != n) throw DomainError("qcore", "permute_sites", "permutation size mismatch");
    const std::int64_t dim = std::int64_t{1} << n;
    std::vector<std::uint64_t> src_bit(n), dst_bit(n);
    for (int j = 0; j < n; ++j) {
        src_bit[j] = site_bit(n, j);
        dst_bit[j] = site_bit(n, perm[j]);
    }
    Vec out(dim);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < dim; ++b) {
        std::uint64_t t = 0;
        for (int j = 0; j < n; ++j)
            if (static_cast<std::uint64_t>(b) & src_bit[j]) t |= dst_bit[j];
        out[static_cast<Eigen::Index>(t)] = v[b];
    }
    return out;
}

Vec translate_sites(const Vec& v, int n, int shift) {
    std::vector<int> perm(n);
    for (int j = 0; j < n; ++j) perm[j] = ((j + shift) % n + n) % n;
    return permute_sites(v, n, perm);
}

} // namespace critsense
