#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace critsense {

using cplx = std::complex<double>;

/// Pauli string on up to 64 qubits, stored as X and Z bit masks.
/// Site j lives on bit (n-1-j): site 0 is the most significant bit.
/// A Y letter sets both masks; the string denotes the plain tensor product
/// of letters, so P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>.
struct PauliString {
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    static PauliString from_letters(int n, const std::string& letters);
    static PauliString from_sites(int n, std::initializer_list<std::pair<int, char>> sites);
    static PauliString from_sites(int n, const std::vector<std::pair<int, char>>& sites);

    char letter(int n, int site) const;
    std::string letters(int n) const;
    int weight() const;
    int y_count() const;
    bool is_diagonal() const { return x == 0; }
    bool commutes_with(const PauliString& o) const;

    /// Phase picked up acting on basis state b (target state is b ^ x).
    cplx phase(std::uint64_t b) const;

    bool operator==(const PauliString& o) const { return x == o.x && z == o.z; }
    bool operator<(const PauliString& o) const { return x != o.x ? x < o.x : z < o.z; }
};

/// Product a*b as (phase, string).
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

std::uint64_t site_bit(int n, int site);

struct PauliTerm {
    cplx coeff;
    PauliString str;
};

/// Weighted sum of Pauli strings with merged duplicates.
class PauliOperator {
public:
    PauliOperator() = default;
    explicit PauliOperator(int n) : n_(n) {}

    static PauliOperator identity(int n, cplx c = 1.0);
    static PauliOperator single(int n, int site, char letter, cplx c = 1.0);
    static PauliOperator sum_single(int n, char letter, cplx c = 1.0);
    static PauliOperator staggered_single(int n, char letter, cplx c = 1.0);

    PauliOperator& add(cplx c, const PauliString& s);
    PauliOperator& add(cplx c, const std::string& letters);
    PauliOperator& add(cplx c, std::initializer_list<std::pair<int, char>> sites);
    PauliOperator& add(const PauliOperator& o, cplx scale = 1.0);

    int n_qubits() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    /// Drops terms with |coeff| <= tol.
    PauliOperator& prune(double tol = 0.0);

    bool is_hermitian(double tol = -1.0) const;
    bool is_diagonal() const;
    /// True when every term acts on at most one site.
    bool is_single_site_sum() const;
    PauliOperator adjoint() const;
    bool commutes_with(const PauliString& s) const;

    PauliOperator operator+(const PauliOperator& o) const;
    PauliOperator operator-(const PauliOperator& o) const;
    PauliOperator operator*(const PauliOperator& o) const;
    PauliOperator operator*(cplx c) const;

    /// Translates every string by `shift` sites on a ring.
    PauliOperator translated(int shift) const;
    std::string to_string() const;

private:
    void merge(cplx c, const PauliString& s);

    int n_ = 0;
    std::vector<PauliTerm> terms_;
};

inline PauliOperator operator*(cplx c, const PauliOperator& o) { return o * c; }

} // namespace critsense
