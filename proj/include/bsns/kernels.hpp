#pragma once

#include <bsns/specfun.hpp>

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>

namespace bsns {

namespace detail {
inline void check_time(double t)
{
    if (t == 0.0 || !std::isfinite(t))
        throw std::domain_error("kernel evaluated at t = 0");
}
inline double sgn(double t) { return t > 0 ? 1.0 : -1.0; }
} // namespace detail

// S_a(z, zeta, t)
inline std::complex<double> kernel_sa(double a, double z, double zeta, double t)
{
    detail::check_time(t);
    if (!(a > -1.0))
        throw std::domain_error("kernel_sa: a > -1");
    const double beta = 0.5 * (a + 1.0), nu = 0.5 * (a - 1.0), at = std::fabs(t);
    double mod = std::pow(2.0 * at, -beta) * specfun::bessel_j_scaled(nu, z * zeta / (2.0 * at));
    double ph = -detail::sgn(t) * beta * specfun::pi / 2.0 + (z * z + zeta * zeta) / (4.0 * t);
    return std::polar(1.0, ph) * mod;
}

// constant 2^{-a}/Gamma((a+1)/2) of the boundary kernel
inline double boundary_constant(double a) { return std::pow(2.0, -a) / specfun::gamma_fn(0.5 * (a + 1.0)); }

// S_a(z, 0, t)
inline std::complex<double> kernel_sa_boundary(double a, double z, double t)
{
    detail::check_time(t);
    if (!(a > -1.0))
        throw std::domain_error("kernel_sa_boundary: a > -1");
    const double beta = 0.5 * (a + 1.0);
    double mod = boundary_constant(a) * std::pow(std::fabs(t), -beta);
    double ph = -detail::sgn(t) * beta * specfun::pi / 2.0 + z * z / (4.0 * t);
    return std::polar(mod, ph);
}

inline double dist2(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("point dimensions differ");
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        s += (x[i] - y[i]) * (x[i] - y[i]);
    return s;
}

// S(x, y, t) = (4 pi i t)^{-d/2} e^{i|x-y|^2/4t}, principal branch
inline std::complex<double> kernel_free(int d, std::span<const double> x, std::span<const double> y, double t)
{
    detail::check_time(t);
    if ((int)x.size() != d)
        throw std::invalid_argument("kernel_free: point dimension must equal d");
    double mod = std::pow(4.0 * specfun::pi * std::fabs(t), -0.5 * d);
    double ph = -detail::sgn(t) * d * specfun::pi / 4.0 + dist2(x, y) / (4.0 * t);
    return std::polar(mod, ph);
}

inline std::complex<double> kernel_full(double a, int d, std::span<const double> x, double z,
                                        std::span<const double> y, double zeta, double t)
{
    return kernel_sa(a, z, zeta, t) * kernel_free(d, x, y, t);
}

// S_a(X, (y, 0), t)
inline std::complex<double> kernel_full_boundary(double a, int d, std::span<const double> x, double z,
                                                 std::span<const double> y, double t)
{
    return kernel_sa_boundary(a, z, t) * kernel_free(d, x, y, t);
}

// modulus constant of the boundary full kernel: 1/(2^{d+a} pi^{d/2} Gamma((a+1)/2))
inline double full_boundary_constant(double a, int d)
{
    return 1.0 / (std::pow(2.0, d + a) * std::pow(specfun::pi, 0.5 * d) * specfun::gamma_fn(0.5 * (a + 1.0)));
}

} // namespace bsns
