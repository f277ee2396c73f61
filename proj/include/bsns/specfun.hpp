#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bsns::specfun {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double max_bessel_arg = 1e6;

namespace detail {

inline void check_order(double nu)
{
    if (!(nu > -1.0))
        throw std::domain_error("bessel order must satisfy nu > -1");
}

// series/asymptotic switch point
inline double crossover(double nu) { return 14.0 + nu * nu; }

// sum_k (-x^2/4)^k / (k! Gamma(k+nu+1)), in long double
inline long double series_sum(double nu, double x)
{
    const long double q = -0.25L * (long double)x * (long double)x;
    long double term = 1.0L / std::tgamma((long double)nu + 1.0L);
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= q / ((long double)k * ((long double)k + nu));
        sum += term;
        if (std::fabs(term) < 1e-21L * std::fabs(sum) && k > 2 && (long double)k > -q / 4)
            break;
    }
    return sum;
}

inline double bessel_j_series(double nu, double x)
{
    if (x == 0.0)
        return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    long double half = 0.5L * (long double)x;
    return (double)(std::pow(half, (long double)nu) * series_sum(nu, x));
}

// Hankel expansion, truncated at the smallest term
inline double bessel_j_asymptotic(double nu, double x)
{
    const double mu = 4.0 * nu * nu;
    double P = 0.0, Q = 0.0;
    double ak = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        if (k > 0)
            ak *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        double mag = std::fabs(ak);
        if (mag > prev && k > 8)
            break;
        int s = (k / 2) % 2 == 0 ? 1 : -1;
        if (k % 2 == 0)
            P += s * ak;
        else
            Q += s * ak;
        if (mag < 1e-17 || ak == 0.0)
            break;
        prev = mag;
    }
    double w = x - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * x)) * (P * std::cos(w) - Q * std::sin(w));
}

} // namespace detail

inline double gamma_fn(double x)
{
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("gamma pole at nonpositive integer");
    return std::tgamma(x);
}

inline double bessel_j(double nu, double x)
{
    detail::check_order(nu);
    if (!(x >= 0.0))
        throw std::domain_error("bessel argument must be nonnegative");
    if (x > max_bessel_arg)
        throw std::overflow_error("bessel argument beyond supported range");
    if (x <= detail::crossover(nu))
        return detail::bessel_j_series(nu, x);
    return detail::bessel_j_asymptotic(nu, x);
}

// x^{-nu} J_nu(x), finite at 0
inline double bessel_j_scaled(double nu, double x)
{
    detail::check_order(nu);
    if (!(x >= 0.0))
        throw std::domain_error("bessel argument must be nonnegative");
    if (x > max_bessel_arg)
        throw std::overflow_error("bessel argument beyond supported range");
    if (x <= detail::crossover(nu))
        return (double)(std::pow(2.0L, -(long double)nu) * detail::series_sum(nu, x));
    return std::pow(x, -nu) * detail::bessel_j_asymptotic(nu, x);
}

inline std::vector<double> bessel_zeros(double nu, int n)
{
    detail::check_order(nu);
    if (n < 1)
        throw std::domain_error("need at least one zero");
    std::vector<double> out;
    out.reserve(n);
    // the scaled form has the same positive zeros and no singularity at 0
    auto f = [nu](double x) { return bessel_j_scaled(nu, x); };
    double lo = 1e-6, flo = f(lo);
    const double step = 0.1;
    while ((int)out.size() < n) {
        double hi = lo + step, fhi = f(hi);
        if (flo == 0.0) {
            out.push_back(lo);
            lo += 1e-3;
            flo = f(lo);
            continue;
        }
        if (flo * fhi > 0.0) {
            lo = hi;
            flo = fhi;
            continue;
        }
        // safeguarded Newton on J_nu inside [lo, hi]
        double a = lo, b = hi, fa = flo;
        double x = 0.5 * (a + b);
        for (int it = 0; it < 100; ++it) {
            double jx = bessel_j(nu, x);
            double dj = (nu / x) * jx - bessel_j(nu + 1.0, x);
            double fx = std::pow(x, -nu) * jx;
            if (fx * fa > 0.0) {
                a = x;
                fa = fx;
            } else {
                b = x;
            }
            double xn = dj != 0.0 ? x - jx / dj : 0.5 * (a + b);
            if (!(xn > a && xn < b))
                xn = 0.5 * (a + b);
            if (std::fabs(xn - x) < 1e-15 * x) {
                x = xn;
                break;
            }
            x = xn;
        }
        out.push_back(x);
        lo = hi;
        flo = fhi;
    }
    return out;
}

// McMahon estimate of the k-th zero, used as a sanity reference
inline double mcmahon_zero(double nu, int k)
{
    double mu = 4.0 * nu * nu;
    double b = (k + 0.5 * nu - 0.25) * pi;
    double e = 8.0 * b;
    return b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
}

// int_0^inf y^{mu-1} e^{i b y} dy
inline std::complex<double> oscillatory_gamma(double mu, double b)
{
    if (!(mu > 0.0 && mu < 1.0) || b == 0.0 || !std::isfinite(b))
        throw std::domain_error("oscillatory_gamma needs 0 < mu < 1 and b != 0");
    std::complex<double> v = std::polar(gamma_fn(mu) * std::pow(std::fabs(b), -mu), mu * pi / 2);
    return b > 0 ? v : std::conj(v);
}

} // namespace bsns::specfun
