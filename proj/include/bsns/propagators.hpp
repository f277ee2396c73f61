#pragma once

#include <bsns/fourier.hpp>
#include <bsns/grid.hpp>
#include <bsns/hankel.hpp>
#include <bsns/kernels.hpp>
#include <bsns/parallel.hpp>
#include <bsns/quadrature.hpp>
#include <bsns/transforms.hpp>

#include <functional>
#include <memory>
#include <vector>

namespace bsns {

// Spectral coordinates of an (x, z) slice: raw DFT in x, Hankel in z.
// Symbol of the generator: Lambda(xi, kappa) = 4 pi^2 |xi|^2 + kappa^2.
class SpectralContext {
public:
    SpectralContext(const CartesianGrid& xg, const WeightedRadialGrid& zg)
        : xg_(xg), zg_(zg), H_(hankel_for(zg)), xi2_(freq_sq(xg))
    {
        const auto& k = H_->frequencies();
        kap2_.resize(k.size());
        for (size_t m = 0; m < k.size(); ++m)
            kap2_[m] = k[m] * k[m];
        for (auto& v : xi2_)
            v *= 4.0 * specfun::pi * specfun::pi;
        H_->synthesis_row(0.0, row0_);
    }

    const CartesianGrid& xgrid() const { return xg_; }
    const WeightedRadialGrid& zgrid() const { return zg_; }
    const HankelTransform& hankel() const { return *H_; }
    size_t nx() const { return xg_.points(); }
    size_t nz() const { return zg_.size(); }
    // 4 pi^2 |xi|^2 per flat x-frequency index
    const std::vector<double>& xsym() const { return xi2_; }
    const std::vector<double>& zsym() const { return kap2_; }

    void to_spectral(cplx* s) const
    {
        dft_x(xg_, s, nz(), Direction::forward);
        H_->forward(s, nx());
    }
    void from_spectral(cplx* s) const
    {
        H_->inverse(s, nx());
        inverse_x(s, nz());
    }
    void inverse_x(cplx* s, size_t blocks) const
    {
        dft_x(xg_, s, blocks, Direction::inverse);
        const double c = 1.0 / (double)nx();
        for (size_t p = 0; p < nx() * blocks; ++p)
            s[p] *= c;
    }
    // z = 0 layer (in x-frequency) of a spectral slice
    void trace_spectral(const cplx* s, cplx* out) const
    {
        for (size_t ix = 0; ix < nx(); ++ix)
            out[ix] = 0.0;
        for (size_t m = 0; m < nz(); ++m) {
            const cplx* col = s + nx() * m;
            for (size_t ix = 0; ix < nx(); ++ix)
                out[ix] += row0_[m] * col[ix];
        }
    }
    // multiply by e^{-i t Lambda}
    void evolve(cplx* s, double t) const
    {
        if (t == 0.0)
            return;
        std::vector<cplx> ex(nx());
        for (size_t ix = 0; ix < nx(); ++ix)
            ex[ix] = std::polar(1.0, -t * xi2_[ix]);
        for (size_t m = 0; m < nz(); ++m) {
            cplx ez = std::polar(1.0, -t * kap2_[m]);
            cplx* col = s + nx() * m;
            for (size_t ix = 0; ix < nx(); ++ix)
                col[ix] *= ex[ix] * ez;
        }
    }

    // spectral slice -> physical field with its z = 0 layer
    HalfSpaceField synthesize(std::vector<cplx> s) const
    {
        HalfSpaceField f(xg_, zg_);
        f.trace.assign(nx(), cplx(0.0));
        trace_spectral(s.data(), f.trace.data());
        inverse_x(f.trace.data(), 1);
        from_spectral(s.data());
        f.v = std::move(s);
        return f;
    }

private:
    CartesianGrid xg_;
    WeightedRadialGrid zg_;
    std::shared_ptr<const HankelTransform> H_;
    std::vector<double> xi2_, kap2_, row0_;
};

// S_a(t) phi through the Hankel diagonalization
inline std::vector<cplx> propagate_z(double a, const WeightedRadialGrid& g, double t, std::vector<cplx> phi)
{
    check_grid_order(a, g);
    if (phi.size() != g.size())
        throw grid_mismatch("propagate_z: size mismatch");
    if (t == 0.0)
        return phi;
    auto H = hankel_for(g);
    H->forward(phi.data(), 1);
    const auto& k = H->frequencies();
    for (size_t m = 0; m < k.size(); ++m)
        phi[m] *= std::polar(1.0, -t * k[m] * k[m]);
    H->inverse(phi.data(), 1);
    return phi;
}

// value at z = 0 of S_a(t) phi
inline cplx propagate_z_trace(double a, const WeightedRadialGrid& g, double t, std::vector<cplx> phi)
{
    check_grid_order(a, g);
    auto H = hankel_for(g);
    H->forward(phi.data(), 1);
    std::vector<double> row;
    H->synthesis_row(0.0, row);
    const auto& k = H->frequencies();
    cplx s = 0.0;
    for (size_t m = 0; m < k.size(); ++m)
        s += row[m] * std::polar(1.0, -t * k[m] * k[m]) * phi[m];
    return s;
}

struct KernelQuadrature {
    double zcut = 16.0;  // datum assumed negligible beyond
    double panel = 0.05; // composite panel width
    int order = 16;      // points per panel
};

// Direct quadrature of  int_0^inf S_a(z, zeta, t) phi(zeta) zeta^a dzeta  at each target z.
// Oracle path; phi is a callable so the quadrature is independent of any grid.
inline std::vector<cplx> propagate_z_kernel(double a, double t, const std::function<cplx(double)>& phi,
                                            const std::vector<double>& targets, KernelQuadrature q = {})
{
    if (t == 0.0)
        throw std::domain_error("propagate_z_kernel: t = 0");
    const auto& gl = quad::legendre_cached(q.order);
    const quad::Rule gj = quad::gauss_jacobi(q.order, 0.0, a);
    std::vector<double> nodes, wts;
    int np = (int)std::ceil(q.zcut / q.panel);
    double h = q.zcut / np;
    for (int p = 0; p < np; ++p) {
        double lo = p * h;
        if (p == 0) {
            // zeta^a handled by the Jacobi weight
            double sc = std::pow(0.5 * h, a + 1.0);
            for (int i = 0; i < q.order; ++i) {
                nodes.push_back(0.5 * h * (1.0 + gj.x[i]));
                wts.push_back(sc * gj.w[i]);
            }
        } else {
            for (int i = 0; i < q.order; ++i) {
                double zz = lo + 0.5 * h * (1.0 + gl.x[i]);
                nodes.push_back(zz);
                wts.push_back(0.5 * h * gl.w[i] * std::pow(zz, a));
            }
        }
    }
    std::vector<cplx> fv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        fv[i] = phi(nodes[i]) * wts[i];
    std::vector<cplx> out(targets.size());
    parallel_for(targets.size(), [&](size_t k) {
        cplx s = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i)
            s += kernel_sa(a, targets[k], nodes[i], t) * fv[i];
        out[k] = s;
    });
    return out;
}

// S(t) f = F^{-1} e^{-4 pi^2 i t |xi|^2} F f on a Cartesian grid (blocks of points())
inline std::vector<cplx> propagate_x(const CartesianGrid& g, double t, std::vector<cplx> f)
{
    const size_t np = g.points();
    if (f.size() % np != 0)
        throw grid_mismatch("propagate_x: size is not a multiple of the grid");
    if (t == 0.0)
        return f;
    size_t blocks = f.size() / np;
    auto xi2 = freq_sq(g);
    dft_x(g, f.data(), blocks, Direction::forward);
    for (size_t b = 0; b < blocks; ++b)
        for (size_t p = 0; p < np; ++p)
            f[b * np + p] *= std::polar(1.0 / (double)np, -4.0 * specfun::pi * specfun::pi * t * xi2[p]);
    dft_x(g, f.data(), blocks, Direction::inverse);
    return f;
}

// full propagator S_a(t) = S(t) (x) S_a(t); output carries its z = 0 layer
inline HalfSpaceField propagate(double t, const HalfSpaceField& u0)
{
    SpectralContext ctx(u0.xg, u0.zg);
    std::vector<cplx> s = u0.v;
    ctx.to_spectral(s.data());
    ctx.evolve(s.data(), t);
    return ctx.synthesize(std::move(s));
}

// T_a F = sum_j w_j S_a(-t_j) F(., t_j)  (trapezoid in t)
inline HalfSpaceField adjoint_T(const SpaceTimeField& F)
{
    SpectralContext ctx(F.xg, F.zg);
    const size_t sl = F.slice();
    std::vector<cplx> acc(sl, cplx(0.0)), s(sl);
    for (size_t j = 0; j < F.nt(); ++j) {
        std::copy(F.slice_ptr(j), F.slice_ptr(j) + sl, s.begin());
        ctx.to_spectral(s.data());
        ctx.evolve(s.data(), -F.tg.node((int)j));
        double w = F.tg.weight((int)j);
        for (size_t p = 0; p < sl; ++p)
            acc[p] += w * s[p];
    }
    return ctx.synthesize(std::move(acc));
}

inline void check_field(double a, int d, const CartesianGrid& xg, const WeightedRadialGrid& zg)
{
    check_grid_order(a, zg);
    if (xg.d != d)
        throw grid_mismatch("x grid dimension differs from d");
}

inline HalfSpaceField propagate(double a, int d, double t, const HalfSpaceField& u0)
{
    check_field(a, d, u0.xg, u0.zg);
    return propagate(t, u0);
}

inline HalfSpaceField adjoint_T(double a, int d, const SpaceTimeField& F)
{
    check_field(a, d, F.xg, F.zg);
    return adjoint_T(F);
}

inline double l2a_norm(const HalfSpaceField& f)
{
    double s = 0.0;
    const double c = f.xg.cell();
    for (size_t iz = 0; iz < f.nz(); ++iz)
        for (size_t ix = 0; ix < f.nx(); ++ix)
            s += c * f.zg.w[iz] * std::norm(f(ix, iz));
    return std::sqrt(s);
}

inline cplx l2a_inner(const HalfSpaceField& f, const HalfSpaceField& g)
{
    cplx s = 0.0;
    const double c = f.xg.cell();
    for (size_t iz = 0; iz < f.nz(); ++iz)
        for (size_t ix = 0; ix < f.nx(); ++ix)
            s += c * f.zg.w[iz] * f(ix, iz) * std::conj(g(ix, iz));
    return s;
}

} // namespace bsns
