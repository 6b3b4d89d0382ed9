#include "critsense/pauli.hpp"
#include "critsense/policy.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace critsense {

namespace {

NumericPolicy g_policy;

cplx i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

void check_site(int n, int site) {
    if (n < 1 || n > 64 || site < 0 || site >= n)
        throw DomainError("qcore", "pauli", "site index out of range");
}

} // namespace

const NumericPolicy& policy() { return g_policy; }
void set_policy(const NumericPolicy& p) { g_policy = p; }

std::uint64_t site_bit(int n, int site) {
    check_site(n, site);
    return std::uint64_t{1} << (n - 1 - site);
}

PauliString PauliString::from_letters(int n, const std::string& letters) {
    if (static_cast<int>(letters.size()) != n)
        throw DomainError("qcore", "pauli", "letter string length mismatch");
    PauliString s;
    for (int j = 0; j < n; ++j) {
        const std::uint64_t b = site_bit(n, j);
        switch (letters[j]) {
        case 'I': break;
        case 'X': s.x |= b; break;
        case 'Y': s.x |= b; s.z |= b; break;
        case 'Z': s.z |= b; break;
        default: throw DomainError("qcore", "pauli", std::string("bad letter ") + letters[j]);
        }
    }
    return s;
}

PauliString PauliString::from_sites(int n, std::initializer_list<std::pair<int, char>> sites) {
    return from_sites(n, std::vector<std::pair<int, char>>(sites));
}

PauliString PauliString::from_sites(int n, const std::vector<std::pair<int, char>>& sites) {
    std::string letters(n, 'I');
    cplx phase = 1.0;
    PauliString acc;
    for (auto [site, letter] : sites) {
        check_site(n, site);
        std::string one(n, 'I');
        one[site] = letter;
        auto [ph, s] = multiply(acc, from_letters(n, one));
        phase *= ph;
        acc = s;
    }
    if (std::abs(phase - cplx(1.0)) > 1e-14)
        throw DomainError("qcore", "pauli", "repeated sites must multiply to a phase-free string");
    return acc;
}

char PauliString::letter(int n, int site) const {
    const std::uint64_t b = site_bit(n, site);
    const bool bx = x & b, bz = z & b;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
}

std::string PauliString::letters(int n) const {
    std::string s(n, 'I');
    for (int j = 0; j < n; ++j) s[j] = letter(n, j);
    return s;
}

int PauliString::weight() const { return std::popcount(x | z); }
int PauliString::y_count() const { return std::popcount(x & z); }

bool PauliString::commutes_with(const PauliString& o) const {
    return ((std::popcount(x & o.z) + std::popcount(z & o.x)) & 1) == 0;
}

cplx PauliString::phase(std::uint64_t b) const {
    const double sign = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    return i_pow(y_count()) * sign;
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
    // P = i^{y} X^x Z^z;  Z^{z1} X^{x2} = (-1)^{|z1&x2|} X^{x2} Z^{z1}.
    PauliString r{a.x ^ b.x, a.z ^ b.z};
    const int k = a.y_count() + b.y_count() - r.y_count();
    const double sign = (std::popcount(a.z & b.x) & 1) ? -1.0 : 1.0;
    return {i_pow(k) * sign, r};
}

PauliOperator PauliOperator::identity(int n, cplx c) {
    PauliOperator o(n);
    o.add(c, PauliString{});
    return o;
}

PauliOperator PauliOperator::single(int n, int site, char letter, cplx c) {
    PauliOperator o(n);
    o.add(c, {{site, letter}});
    return o;
}

PauliOperator PauliOperator::sum_single(int n, char letter, cplx c) {
    PauliOperator o(n);
    for (int j = 0; j < n; ++j) o.add(c, {{j, letter}});
    return o;
}

PauliOperator PauliOperator::staggered_single(int n, char letter, cplx c) {
    PauliOperator o(n);
    for (int j = 0; j < n; ++j) o.add((j % 2 ? -1.0 : 1.0) * c, {{j, letter}});
    return o;
}

void PauliOperator::merge(cplx c, const PauliString& s) {
    for (auto& t : terms_) {
        if (t.str == s) {
            t.coeff += c;
            return;
        }
    }
    terms_.push_back({c, s});
}

PauliOperator& PauliOperator::add(cplx c, const PauliString& s) {
    merge(c, s);
    return *this;
}

PauliOperator& PauliOperator::add(cplx c, const std::string& letters) {
    merge(c, PauliString::from_letters(n_, letters));
    return *this;
}

PauliOperator& PauliOperator::add(cplx c, std::initializer_list<std::pair<int, char>> sites) {
    merge(c, PauliString::from_sites(n_, sites));
    return *this;
}

PauliOperator& PauliOperator::add(const PauliOperator& o, cplx scale) {
    if (o.n_ != n_) throw DomainError("qcore", "pauli", "qubit count mismatch");
    for (const auto& t : o.terms_) merge(scale * t.coeff, t.str);
    return *this;
}

PauliOperator& PauliOperator::prune(double tol) {
    std::erase_if(terms_, [tol](const PauliTerm& t) { return std::abs(t.coeff) <= tol; });
    return *this;
}

bool PauliOperator::is_hermitian(double tol) const {
    if (tol < 0) tol = policy().operator_hermitian_tol;
    // Distinct Pauli strings are linearly independent, so Hermiticity is
    // equivalent to every merged coefficient being real.
    return std::all_of(terms_.begin(), terms_.end(),
                       [tol](const PauliTerm& t) { return std::abs(t.coeff.imag()) <= tol; });
}

bool PauliOperator::is_diagonal() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.str.is_diagonal(); });
}

bool PauliOperator::is_single_site_sum() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.str.weight() <= 1; });
}

PauliOperator PauliOperator::adjoint() const {
    PauliOperator o(n_);
    for (const auto& t : terms_) o.terms_.push_back({std::conj(t.coeff), t.str});
    return o;
}

bool PauliOperator::commutes_with(const PauliString& s) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&s](const PauliTerm& t) { return t.str.commutes_with(s); });
}

PauliOperator PauliOperator::operator+(const PauliOperator& o) const {
    PauliOperator r = *this;
    r.add(o);
    return r;
}

PauliOperator PauliOperator::operator-(const PauliOperator& o) const {
    PauliOperator r = *this;
    r.add(o, -1.0);
    return r;
}

PauliOperator PauliOperator::operator*(const PauliOperator& o) const {
    if (o.n_ != n_) throw DomainError("qcore", "pauli", "qubit count mismatch");
    std::map<PauliString, cplx> acc;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            auto [ph, s] = multiply(a.str, b.str);
            acc[s] += a.coeff * b.coeff * ph;
        }
    PauliOperator r(n_);
    for (const auto& [s, c] : acc) r.terms_.push_back({c, s});
    return r;
}

PauliOperator PauliOperator::operator*(cplx c) const {
    PauliOperator r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

PauliOperator PauliOperator::translated(int shift) const {
    PauliOperator r(n_);
    for (const auto& t : terms_) {
        std::string src = t.str.letters(n_), dst(n_, 'I');
        for (int j = 0; j < n_; ++j) dst[((j + shift) % n_ + n_) % n_] = src[j];
        r.merge(t.coeff, PauliString::from_letters(n_, dst));
    }
    return r;
}

std::string PauliOperator::to_string() const {
    std::ostringstream os;
    for (const auto& t : terms_) os << "(" << t.coeff.real() << "," << t.coeff.imag() << ")" << t.str.letters(n_) << " ";
    return os.str();
}

} // namespace critsense
