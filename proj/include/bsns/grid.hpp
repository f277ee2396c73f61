#pragma once

#include <bsns/errors.hpp>
#include <bsns/quadrature.hpp>
#include <bsns/specfun.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace bsns {

using cplx = std::complex<double>;

enum class RadialScheme { bessel_collocation, gauss_jacobi, trapezoid };

inline std::string to_string(RadialScheme s)
{
    switch (s) {
    case RadialScheme::bessel_collocation: return "bessel_collocation";
    case RadialScheme::gauss_jacobi: return "gauss_jacobi";
    case RadialScheme::trapezoid: return "trapezoid";
    }
    return "?";
}

inline RadialScheme scheme_from_string(const std::string& s)
{
    if (s == "bessel_collocation")
        return RadialScheme::bessel_collocation;
    if (s == "gauss_jacobi")
        return RadialScheme::gauss_jacobi;
    if (s == "trapezoid")
        return RadialScheme::trapezoid;
    throw config_error("unknown radial scheme: " + s);
}

// sum_k w_k f(z_k) ~ int_0^Zmax f(z) z^a dz
struct WeightedRadialGrid {
    double a = 0.0;
    double Zmax = 0.0;
    RadialScheme scheme = RadialScheme::bessel_collocation;
    std::vector<double> z, w;
    // collocation only: j_{nu,N+1}
    double jlast = 0.0;

    size_t size() const { return z.size(); }
    double nu() const { return 0.5 * (a - 1.0); }
    bool same(const WeightedRadialGrid& o) const
    {
        return a == o.a && Zmax == o.Zmax && scheme == o.scheme && z.size() == o.z.size();
    }
};

inline WeightedRadialGrid build_radial_grid(double a, double Zmax, int Nz, RadialScheme scheme)
{
    if (!(a > -1.0))
        throw config_error("radial grid: a must exceed -1");
    if (!(Zmax > 0.0) || !std::isfinite(Zmax))
        throw config_error("radial grid: Zmax must be positive");
    if (Nz < 8)
        throw config_error("radial grid: Nz must be at least 8");
    WeightedRadialGrid g;
    g.a = a;
    g.Zmax = Zmax;
    g.scheme = scheme;
    g.z.resize(Nz);
    g.w.resize(Nz);
    switch (scheme) {
    case RadialScheme::bessel_collocation: {
        double nu = g.nu();
        auto j = specfun::bessel_zeros(nu, Nz + 1);
        g.jlast = j[Nz];
        double K = g.jlast / Zmax;
        for (int k = 0; k < Nz; ++k) {
            g.z[k] = j[k] / K;
            double jp = specfun::bessel_j(nu + 1.0, j[k]);
            g.w[k] = 2.0 * std::pow(g.z[k], a - 1.0) / (K * K * jp * jp);
        }
        break;
    }
    case RadialScheme::gauss_jacobi: {
        auto r = quad::gauss_jacobi(Nz, 0.0, a);
        double sc = std::pow(0.5 * Zmax, a + 1.0);
        for (int k = 0; k < Nz; ++k) {
            g.z[k] = 0.5 * Zmax * (1.0 + r.x[k]);
            g.w[k] = sc * r.w[k];
        }
        break;
    }
    case RadialScheme::trapezoid: {
        // cell midpoints, weights are the exact cell integrals of z^a
        double h = Zmax / Nz;
        for (int k = 0; k < Nz; ++k) {
            g.z[k] = (k + 0.5) * h;
            double lo = k * h, hi = lo + h;
            g.w[k] = (std::pow(hi, a + 1.0) - std::pow(lo, a + 1.0)) / (a + 1.0);
        }
        break;
    }
    }
    return g;
}

// Zmax for which the collocation frequency grid coincides with the z grid
inline double self_dual_zmax(double a, int Nz)
{
    return std::sqrt(specfun::bessel_zeros(0.5 * (a - 1.0), Nz + 1)[Nz]);
}

struct CartesianGrid {
    int d = 1;
    double Xmax = 1.0;
    int Nx = 8;

    size_t points() const
    {
        size_t p = 1;
        for (int i = 0; i < d; ++i)
            p *= (size_t)Nx;
        return p;
    }
    double h() const { return 2.0 * Xmax / Nx; }
    double cell() const { return std::pow(h(), d); }
    double node(int i) const { return -Xmax + i * h(); }
    // frequency of FFT index m, spacing 1/(2 Xmax)
    double freq(int m) const { return (m < Nx / 2 ? m : m - Nx) / (2.0 * Xmax); }
    // coordinate along axis ax of the flat index p (axis 0 fastest)
    int index(size_t p, int ax) const
    {
        for (int i = 0; i < ax; ++i)
            p /= (size_t)Nx;
        return (int)(p % (size_t)Nx);
    }
    bool same(const CartesianGrid& o) const { return d == o.d && Xmax == o.Xmax && Nx == o.Nx; }
};

inline CartesianGrid make_cartesian(int d, double Xmax, int Nx)
{
    if (d < 1)
        throw config_error("cartesian grid: d must be positive");
    if (!(Xmax > 0.0))
        throw config_error("cartesian grid: Xmax must be positive");
    if (Nx < 2 || (Nx & (Nx - 1)) != 0)
        throw config_error("cartesian grid: Nx must be a power of two");
    return CartesianGrid{d, Xmax, Nx};
}

struct TimeGrid {
    double T = 1.0;
    int Nt = 1;

    double dt() const { return T / Nt; }
    double node(int j) const { return j == Nt ? T : j * dt(); }
    size_t count() const { return (size_t)Nt + 1; }
    // trapezoid weights
    double weight(int j) const { return (j == 0 || j == Nt) ? 0.5 * dt() : dt(); }
    bool same(const TimeGrid& o) const { return T == o.T && Nt == o.Nt; }
};

inline TimeGrid make_time(double T, int Nt)
{
    if (!(T > 0.0))
        throw config_error("time grid: T must be positive");
    if (Nt < 1)
        throw config_error("time grid: Nt must be positive");
    return TimeGrid{T, Nt};
}

// values (x fastest, then z); trace holds the z = 0 layer when available
struct HalfSpaceField {
    double a = 0.0;
    CartesianGrid xg;
    WeightedRadialGrid zg;
    std::vector<cplx> v;
    std::vector<cplx> trace;

    HalfSpaceField() = default;
    HalfSpaceField(const CartesianGrid& x, const WeightedRadialGrid& z)
        : a(z.a), xg(x), zg(z), v(x.points() * z.size(), cplx(0.0))
    {
    }
    size_t nx() const { return xg.points(); }
    size_t nz() const { return zg.size(); }
    cplx& operator()(size_t ix, size_t iz) { return v[ix + nx() * iz]; }
    cplx operator()(size_t ix, size_t iz) const { return v[ix + nx() * iz]; }
    bool has_trace() const { return !trace.empty(); }
};

// values (x fastest, then z, then t over Nt+1 nodes)
struct SpaceTimeField {
    double a = 0.0;
    CartesianGrid xg;
    WeightedRadialGrid zg;
    TimeGrid tg;
    std::vector<cplx> v;
    std::vector<cplx> trace; // x fastest, then t

    SpaceTimeField() = default;
    SpaceTimeField(const CartesianGrid& x, const WeightedRadialGrid& z, const TimeGrid& t)
        : a(z.a), xg(x), zg(z), tg(t), v(x.points() * z.size() * t.count(), cplx(0.0))
    {
    }
    size_t nx() const { return xg.points(); }
    size_t nz() const { return zg.size(); }
    size_t nt() const { return tg.count(); }
    size_t slice() const { return nx() * nz(); }
    cplx& operator()(size_t ix, size_t iz, size_t it) { return v[ix + nx() * (iz + nz() * it)]; }
    cplx operator()(size_t ix, size_t iz, size_t it) const { return v[ix + nx() * (iz + nz() * it)]; }
    cplx* slice_ptr(size_t it) { return v.data() + slice() * it; }
    const cplx* slice_ptr(size_t it) const { return v.data() + slice() * it; }
    bool has_trace() const { return !trace.empty(); }

    HalfSpaceField at(size_t it) const
    {
        HalfSpaceField f(xg, zg);
        std::copy(slice_ptr(it), slice_ptr(it) + slice(), f.v.begin());
        if (has_trace())
            f.trace.assign(trace.begin() + nx() * it, trace.begin() + nx() * (it + 1));
        return f;
    }
    void set(size_t it, const HalfSpaceField& f)
    {
        std::copy(f.v.begin(), f.v.end(), slice_ptr(it));
        if (f.has_trace()) {
            if (trace.empty())
                trace.assign(nx() * nt(), cplx(0.0));
            std::copy(f.trace.begin(), f.trace.end(), trace.begin() + nx() * it);
        }
    }
};

// values (x fastest, then t)
struct BoundaryTrace {
    CartesianGrid xg;
    TimeGrid tg;
    std::vector<cplx> v;

    BoundaryTrace() = default;
    BoundaryTrace(const CartesianGrid& x, const TimeGrid& t) : xg(x), tg(t), v(x.points() * t.count(), cplx(0.0)) {}
    size_t nx() const { return xg.points(); }
    size_t nt() const { return tg.count(); }
    cplx& operator()(size_t ix, size_t it) { return v[ix + nx() * it]; }
    cplx operator()(size_t ix, size_t it) const { return v[ix + nx() * it]; }
};

inline void check_same(const CartesianGrid& a, const CartesianGrid& b)
{
    if (!a.same(b))
        throw grid_mismatch("x grids differ");
}
inline void check_same(const WeightedRadialGrid& a, const WeightedRadialGrid& b)
{
    if (!a.same(b))
        throw grid_mismatch("z grids differ");
}
inline void check_same(const TimeGrid& a, const TimeGrid& b)
{
    if (!a.same(b))
        throw grid_mismatch("t grids differ");
}

} // namespace bsns
