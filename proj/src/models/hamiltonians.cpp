#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace critsense {

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::tfim: return "tfim";
    case ModelKind::xxz: return "xxz";
    case ModelKind::rydberg: return "rydberg";
    case ModelKind::cluster_ladder: return "cluster_ladder";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "tfim") return ModelKind::tfim;
    if (s == "xxz") return ModelKind::xxz;
    if (s == "rydberg") return ModelKind::rydberg;
    if (s == "cluster_ladder") return ModelKind::cluster_ladder;
    throw DomainError("models", "model_kind", "unknown model kind '" + s + "'");
}

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "open") return Boundary::open;
    throw DomainError("models", "boundary", "unknown boundary '" + s + "'");
}

void ModelSpec::validate() const {
    const int minL = kind == ModelKind::rydberg ? 3 : 2;
    if (L < minL) throw DomainError("models", "validate", "L too small");
    if (n_qubits() > policy().sparse_cap) throw CapacityError("models", "validate", "system exceeds sparse cap");
    switch (kind) {
    case ModelKind::tfim:
        if (J == 0.0 || h == 0.0) throw DomainError("models", "validate", "tfim requires J != 0 and h != 0");
        break;
    case ModelKind::xxz:
        if (!std::isfinite(delta_xxz)) throw DomainError("models", "validate", "xxz anisotropy must be finite");
        break;
    case ModelKind::rydberg:
        if (!(V1 > 0.0)) throw DomainError("models", "validate", "rydberg requires V1 > 0");
        break;
    case ModelKind::cluster_ladder:
        break;
    }
    if (extra_terms && extra_terms->n_qubits() != n_qubits())
        throw DomainError("models", "validate", "extra terms act on the wrong register");
}

PauliOperator build_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    const int L = spec.L;
    const int n = spec.n_qubits();
    const bool pbc = spec.boundary == Boundary::periodic;
    const int bonds = pbc ? L : L - 1;
    PauliOperator H(n);

    switch (spec.kind) {
    case ModelKind::tfim:
        for (int j = 0; j < bonds; ++j) H.add(-spec.J, {{j, 'Z'}, {(j + 1) % L, 'Z'}});
        for (int j = 0; j < L; ++j) H.add(-spec.h, {{j, 'X'}});
        break;
    case ModelKind::xxz:
        for (int j = 0; j < bonds; ++j) {
            const int k = (j + 1) % L;
            H.add(1.0, {{j, 'X'}, {k, 'X'}});
            H.add(1.0, {{j, 'Y'}, {k, 'Y'}});
            H.add(spec.delta_xxz, {{j, 'Z'}, {k, 'Z'}});
        }
        H.prune();
        break;
    case ModelKind::rydberg: {
        // n_j = (I - Z_j) / 2, b_j + b_j^dag = X_j.
        auto nn = [&](int a, int b, double V) {
            H.add(V / 4.0, PauliString{});
            H.add(-V / 4.0, {{a, 'Z'}});
            H.add(-V / 4.0, {{b, 'Z'}});
            H.add(V / 4.0, {{a, 'Z'}, {b, 'Z'}});
        };
        for (int j = 0; j < L; ++j) {
            H.add(spec.omega / 2.0, {{j, 'X'}});
            H.add(-spec.delta_ryd / 2.0, PauliString{});
            H.add(spec.delta_ryd / 2.0, {{j, 'Z'}});
        }
        for (int j = 0; j < bonds; ++j) nn(j, (j + 1) % L, spec.V1);
        if (spec.V2 != 0.0) {
            const int bonds2 = pbc ? L : L - 2;
            for (int j = 0; j < bonds2; ++j) nn(j, (j + 2) % L, spec.V2);
        }
        H.prune();
        break;
    }
    case ModelKind::cluster_ladder:
        for (int j = 0; j + 1 < L; ++j) {
            const int a1 = ladder_site(j, 1), a2 = ladder_site(j, 2);
            const int b1 = ladder_site(j + 1, 1), b2 = ladder_site(j + 1, 2);
            H.add(-1.0, {{a1, 'Z'}, {a2, 'X'}, {b1, 'Z'}});
            H.add(-1.0, {{a2, 'Z'}, {b1, 'X'}, {b2, 'Z'}});
            H.add(-1.0, {{a2, 'Z'}, {a1, 'X'}, {b2, 'Z'}});
            H.add(-1.0, {{a1, 'Z'}, {b2, 'X'}, {b1, 'Z'}});
        }
        break;
    }
    if (spec.extra_terms) H.add(*spec.extra_terms);
    return H;
}

double luttinger_K(double delta, bool allow_infinite) {
    if (delta == -1.0 && allow_infinite) return std::numeric_limits<double>::infinity();
    if (!(delta > -1.0 && delta <= 1.0))
        throw DomainError("models", "luttinger_K", "anisotropy outside (-1, 1]");
    return std::numbers::pi / (2.0 * (std::numbers::pi - std::acos(delta)));
}

} // namespace critsense
