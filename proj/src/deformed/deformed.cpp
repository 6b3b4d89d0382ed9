#include "critsense/deformed.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"
#include "critsense/rng.hpp"

#include <cmath>
#include <map>

namespace critsense {

namespace {

constexpr int kMaxExhaustive = 16;

Vec apply_string(const PauliString& P, const Vec& v) {
    Vec out(v.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < v.size(); ++b) {
        const std::uint64_t bb = static_cast<std::uint64_t>(b);
        out[static_cast<Eigen::Index>(bb ^ P.x)] = P.phase(bb) * v[b];
    }
    return out;
}

double beta_tanh(double beta) { return std::isinf(beta) ? 1.0 : std::tanh(beta); }

// Unnormalised (I + s t A) v with t = tanh(beta); the Kraus probability is |w|^2 / (2 (1 + t^2)).
Vec kraus_step(const PauliString& A, int s, double t, const Vec& v) { return v + (s * t) * apply_string(A, v); }

void check_commuting(const std::vector<PauliString>& ops) {
    for (std::size_t a = 0; a < ops.size(); ++a)
        for (std::size_t b = a + 1; b < ops.size(); ++b)
            if (!ops[a].commutes_with(ops[b]))
                throw DomainError("deformed", "enumerate_outcomes", "measured operators do not commute");
}

int ladder_rungs(const PureState& psi, const char* op) {
    if (psi.n_qubits() % 2) throw DomainError("deformed", op, "ladder state needs an even qubit count");
    return psi.n_qubits() / 2;
}

double sign_product(const std::vector<int>& s, int j, int k) {
    int p = 1;
    for (int i = j + 1; i <= k; ++i) p *= s[i];
    return p;
}

double zz_chain2(const PureState& psi, int j, int k) {
    const int n = psi.n_qubits();
    const PauliString zz{0, site_bit(n, ladder_site(j, 2)) | site_bit(n, ladder_site(k, 2))};
    return psi.amplitudes().dot(apply_string(zz, psi.amplitudes())).real();
}

} // namespace

void DeformationSpec::validate(int n) const {
    if (std::isnan(beta) || beta < 0.0) throw DomainError("deformed", "deform", "beta must be >= 0");
    if (letters.size() != sites.size() || outcomes.size() != sites.size())
        throw DomainError("deformed", "deform", "sites, letters and outcomes differ in length");
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 0 || sites[i] >= n) throw DomainError("deformed", "deform", "site out of range");
        if (seen[sites[i]]) throw DomainError("deformed", "deform", "repeated site");
        seen[sites[i]] = true;
        if (letters[i] != 'X' && letters[i] != 'Y' && letters[i] != 'Z')
            throw DomainError("deformed", "deform", "Gamma must be X, Y or Z");
        if (outcomes[i] != 1 && outcomes[i] != -1) throw DomainError("deformed", "deform", "outcomes must be +-1");
    }
}

DeformationSpec DeformationSpec::ladder_chain1(int L, double beta, const std::vector<int>& s, char letter) {
    if (static_cast<int>(s.size()) != L) throw DomainError("deformed", "ladder_chain1", "need one outcome per rung");
    DeformationSpec d;
    d.beta = beta;
    for (int j = 0; j < L; ++j) {
        d.sites.push_back(ladder_site(j, 1));
        d.letters.push_back(letter);
        d.outcomes.push_back(s[j]);
    }
    return d;
}

DeformationSpec DeformationSpec::uniform(int n, double beta, char letter, int s) {
    DeformationSpec d;
    d.beta = beta;
    for (int j = 0; j < n; ++j) {
        d.sites.push_back(j);
        d.letters.push_back(letter);
        d.outcomes.push_back(s);
    }
    return d;
}

PureState deform(const PureState& psi, const DeformationSpec& spec) {
    const int n = psi.n_qubits();
    spec.validate(n);
    if (spec.beta == 0.0) return psi;
    const double t = beta_tanh(spec.beta);
    Vec v = psi.amplitudes();
    for (std::size_t i = 0; i < spec.sites.size(); ++i) {
        const PauliString G = PauliString::from_sites(n, {{spec.sites[i], spec.letters[i]}});
        v = kraus_step(G, spec.outcomes[i], t, v);
        const double nv = v.norm();
        if (nv < 1e-14) throw NumericError("deformed", "deform", "deformation annihilates the state");
        v /= nv;
    }
    return PureState(n, std::move(v), true);
}

double OutcomeEnsemble::total_probability() const {
    double s = 0.0;
    for (const auto& o : outcomes) s += o.probability;
    return s;
}

OutcomeEnsemble enumerate_outcomes(const PureState& psi, const std::vector<PauliString>& ops, double beta) {
    const int m = static_cast<int>(ops.size());
    if (m > kMaxExhaustive) throw CapacityError("deformed", "enumerate_outcomes", "more than 16 measured operators");
    if (std::isnan(beta) || beta < 0.0) throw DomainError("deformed", "enumerate_outcomes", "beta must be >= 0");
    check_commuting(ops);
    const double t = beta_tanh(beta);
    OutcomeEnsemble ens;
    ens.measured = ops;
    ens.beta = beta;
    ens.outcomes.resize(std::size_t{1} << m);
    const int n = psi.n_qubits();
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < (std::int64_t{1} << m); ++idx) {
        Outcome o;
        Vec v = psi.amplitudes();
        for (int i = 0; i < m; ++i) {
            o.s.push_back((idx >> (m - 1 - i)) & 1 ? -1 : 1);
            v = kraus_step(ops[i], o.s.back(), t, v) / std::sqrt(2.0 * (1.0 + t * t));
        }
        o.probability = v.squaredNorm();
        if (o.probability > 1e-14) o.state = PureState(n, v / std::sqrt(o.probability));
        ens.outcomes[idx] = std::move(o);
    }
    return ens;
}

std::vector<std::vector<int>> sample_outcomes(const PureState& psi, const std::vector<PauliString>& ops,
                                              std::uint64_t seed, int n_samples, double beta) {
    if (n_samples < 0) throw DomainError("deformed", "sample_outcomes", "n_samples must be >= 0");
    check_commuting(ops);
    const double t = beta_tanh(beta);
    const double kraus_norm = 2.0 * (1.0 + t * t);
    // branch states are shared between shots through a prefix cache
    std::map<std::vector<int>, std::pair<Vec, double>> cache;
    std::vector<std::vector<int>> out;
    CounterRng rng(seed);
    for (int shot = 0; shot < n_samples; ++shot) {
        std::vector<int> s;
        Vec v = psi.amplitudes();
        for (const auto& A : ops) {
            std::vector<int> plus = s;
            plus.push_back(1);
            auto it = cache.find(plus);
            if (it == cache.end()) {
                Vec w = kraus_step(A, 1, t, v);
                const double p = w.squaredNorm() / kraus_norm;
                it = cache.emplace(plus, std::make_pair(std::move(w), p)).first;
            }
            const double p_plus = it->second.second;
            const int sign = rng.uniform() < p_plus ? 1 : -1;
            s.push_back(sign);
            auto jt = cache.find(s);
            if (jt == cache.end()) {
                Vec w = kraus_step(A, sign, t, v);
                const double p = w.squaredNorm() / kraus_norm;
                jt = cache.emplace(s, std::make_pair(std::move(w), p)).first;
            }
            v = jt->second.first / jt->second.first.norm();
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PauliString> ladder_chain1_x(int L) {
    std::vector<PauliString> ops;
    for (int j = 0; j < L; ++j) ops.push_back(PauliString::from_sites(2 * L, {{ladder_site(j, 1), 'X'}}));
    return ops;
}

double decoded_correlator(const OutcomeEnsemble& ens, int j, int k) {
    if (!(j < k)) throw DomainError("deformed", "decoded_correlator", "requires j < k");
    if (k >= static_cast<int>(ens.measured.size()))
        throw DomainError("deformed", "decoded_correlator", "rung index out of range");
    std::vector<double> terms(ens.outcomes.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ens.outcomes.size(); ++i) {
        const Outcome& o = ens.outcomes[i];
        if (o.probability <= 1e-14) continue;
        terms[i] = o.probability * zz_chain2(o.state, j, k) * sign_product(o.s, j, k);
    }
    double sum = 0.0;
    for (double x : terms) sum += x;
    return sum;
}

double decoded_correlator_insertion(const PureState& psi, int j, int k, double beta) {
    if (!(j < k)) throw DomainError("deformed", "decoded_correlator", "requires j < k");
    const int L = ladder_rungs(psi, "decoded_correlator");
    if (k >= L) throw DomainError("deformed", "decoded_correlator", "rung index out of range");
    const int n = psi.n_qubits();
    std::uint64_t x = 0;
    for (int i = j + 1; i <= k; ++i) x |= site_bit(n, ladder_site(i, 1));
    const PauliString P{x, site_bit(n, ladder_site(j, 2)) | site_bit(n, ladder_site(k, 2))};
    const double value = psi.amplitudes().dot(apply_string(P, psi.amplitudes())).real();
    return std::pow(beta_tanh(2.0 * beta), k - j) * value;
}

SampledEstimate decoded_correlator_sampled(const PureState& psi, const std::vector<std::vector<int>>& samples, int j,
                                           int k, double beta) {
    if (!(j < k)) throw DomainError("deformed", "decoded_correlator", "requires j < k");
    const int L = ladder_rungs(psi, "decoded_correlator");
    const std::vector<PauliString> ops = ladder_chain1_x(L);
    const double t = beta_tanh(beta);
    std::map<std::vector<int>, double> value;
    double sum = 0.0, sum2 = 0.0;
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != L) throw DomainError("deformed", "decoded_correlator", "sample length");
        auto it = value.find(s);
        if (it == value.end()) {
            Vec v = psi.amplitudes();
            for (int i = 0; i < L; ++i) v = kraus_step(ops[i], s[i], t, v);
            const PureState post(psi.n_qubits(), v, true);
            it = value.emplace(s, zz_chain2(post, j, k) * sign_product(s, j, k)).first;
        }
        sum += it->second;
        sum2 += it->second * it->second;
    }
    SampledEstimate e;
    e.shots = static_cast<int>(samples.size());
    if (e.shots == 0) return e;
    e.mean = sum / e.shots;
    const double var = e.shots > 1 ? (sum2 - e.shots * e.mean * e.mean) / (e.shots - 1) : 0.0;
    e.standard_error = std::sqrt(std::max(0.0, var) / e.shots);
    return e;
}

PauliOperator outcome_generator(int L, const std::vector<int>& s) {
    if (static_cast<int>(s.size()) != L) throw DomainError("deformed", "outcome_generator", "need one sign per rung");
    PauliOperator G(2 * L);
    int prefix = 1;
    for (int j = 0; j < L; ++j) {
        prefix *= s[j];
        G.add(double(prefix), {{ladder_site(j, 2), 'Z'}});
    }
    return G;
}

std::vector<int> outcome_flip_rungs(const std::vector<int>& s) {
    std::vector<int> rungs;
    int prefix = 1;
    for (std::size_t j = 0; j < s.size(); ++j) {
        prefix *= s[j];
        if (prefix < 0) rungs.push_back(static_cast<int>(j));
    }
    return rungs;
}

double outcome_qfi(const PureState& post, const std::vector<int>& s) {
    const int L = ladder_rungs(post, "outcome_qfi");
    return 4.0 * variance(post, outcome_generator(L, s));
}

double averaged_qfi(const OutcomeEnsemble& ens) {
    std::vector<double> terms(ens.outcomes.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ens.outcomes.size(); ++i) {
        const Outcome& o = ens.outcomes[i];
        if (o.probability > 1e-14) terms[i] = o.probability * outcome_qfi(o.state, o.s);
    }
    double sum = 0.0;
    for (double x : terms) sum += x;
    return sum;
}

double averaged_qfi_decoded(const PureState& psi, double beta) {
    const int L = ladder_rungs(psi, "averaged_qfi");
    const int n = psi.n_qubits();
    std::uint64_t x2 = 0;
    for (int j = 0; j < L; ++j) x2 |= site_bit(n, ladder_site(j, 2));
    const Vec& v = psi.amplitudes();
    const cplx par = v.dot(apply_string(PauliString{x2, 0}, v));
    if (std::abs(std::abs(par) - 1.0) > 1e-8)
        throw DomainError("deformed", "averaged_qfi", "probe is not a chain-2 parity eigenstate");
    double off = 0.0;
    for (int j = 0; j < L; ++j)
        for (int k = j + 1; k < L; ++k) off += decoded_correlator_insertion(psi, j, k, beta);
    return 4.0 * (L + 2.0 * off);
}

LroReport uniform_outcome_lro_check(const PureState& ladder_state, const std::vector<double>& beta_list) {
    const int L = ladder_rungs(ladder_state, "uniform_outcome_lro_check");
    if (beta_list.empty()) throw DomainError("deformed", "uniform_outcome_lro_check", "empty beta list");
    LroReport r;
    for (double b : beta_list) {
        const PureState d = deform(ladder_state, DeformationSpec::ladder_chain1(L, b, std::vector<int>(L, 1)));
        r.beta.push_back(b);
        r.correlator.push_back(zz_chain2(d, 0, L - 1));
    }
    r.monotone = true;
    for (std::size_t i = 1; i < r.correlator.size(); ++i)
        if (r.correlator[i] < r.correlator[i - 1] - 1e-12) r.monotone = false;
    r.threefold = r.correlator.back() > 3.0 * r.correlator.front();
    return r;
}

} // namespace critsense
