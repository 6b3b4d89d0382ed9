#include "critsense/channels.hpp"
#include "critsense/policy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace critsense {

double NoiseKernel::chi(double t) const {
    if (!(t >= 0.0)) throw DomainError("channels", "NoiseKernel::chi", "t must be >= 0");
    if (!C) throw DomainError("channels", "NoiseKernel::chi", "correlation function not set");
    if (t == 0.0) return 0.0;
    auto f = [&](double tau) { return (t - tau) * C(tau); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-12, &err);
    if (!std::isfinite(v)) throw NumericError("channels", "NoiseKernel::chi", "quadrature did not converge");
    return v;
}

NoiseKernel NoiseKernel::quasi_static(double sigma2) {
    if (!(sigma2 >= 0.0)) throw DomainError("channels", "NoiseKernel", "variance must be >= 0");
    return {[sigma2](double) { return sigma2; }};
}

NoiseKernel NoiseKernel::exponential(double sigma2, double tau_c) {
    if (!(sigma2 >= 0.0) || !(tau_c > 0.0)) throw DomainError("channels", "NoiseKernel", "invalid kernel parameters");
    return {[sigma2, tau_c](double tau) { return sigma2 * std::exp(-tau / tau_c); }};
}

} // namespace critsense
