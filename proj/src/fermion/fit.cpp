#include "critsense/fermion.hpp"
#include "critsense/policy.hpp"

#include <algorithm>
#include <cmath>

namespace critsense {

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          std::optional<std::pair<double, double>> window) {
    if (xs.size() != ys.size()) throw DomainError("fermion", "fit_power_law", "xs and ys differ in length");
    std::vector<double> lx, ly;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (window && (xs[i] < window->first || xs[i] > window->second)) continue;
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fermion", "fit_power_law", "non-positive data");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
        lo = std::min(lo, xs[i]);
        hi = std::max(hi, xs[i]);
    }
    if (lx.size() < 3) throw DomainError("fermion", "fit_power_law", "need at least three points");
    if (!(hi > lo)) throw DomainError("fermion", "fit_power_law", "degenerate window");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    PowerLawFit f;
    f.exponent = sxy / sxx;
    f.prefactor = std::exp(my - f.exponent * mx);
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (my + f.exponent * (lx[i] - mx));
        ssr += e * e;
    }
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    f.window = {lo, hi};
    f.points = lx.size();
    return f;
}

PowerLawFit qfi_scaling_tfim(const std::vector<int>& L_list, bool at_criticality, double h_off) {
    if (L_list.size() < 3) throw DomainError("fermion", "qfi_scaling_tfim", "need at least three sizes");
    const auto [mn, mx] = std::minmax_element(L_list.begin(), L_list.end());
    if (*mx < 4 * *mn) throw DomainError("fermion", "qfi_scaling_tfim", "fit window too small");
    const double h = at_criticality ? 1.0 : h_off;
    std::vector<double> xs, ys;
    for (int L : L_list) {
        xs.push_back(L);
        ys.push_back(qfi_tfim_fermion(L, 1.0, h));
    }
    return fit_power_law(xs, ys);
}

} // namespace critsense
