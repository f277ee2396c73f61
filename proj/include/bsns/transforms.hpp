#pragma once

#include <bsns/fourier.hpp>
#include <bsns/grid.hpp>
#include <bsns/hankel.hpp>

#include <vector>

namespace bsns {

inline void check_grid_order(double a, const WeightedRadialGrid& g)
{
    if (a != g.a)
        throw grid_mismatch("grid was built for a different a");
}

// returns values at the frequency nodes kappa_m = s z_m (s = 1 on a self-dual grid)
inline std::vector<double> hankel_frequencies(const WeightedRadialGrid& g) { return hankel_for(g)->frequencies(); }

inline std::vector<cplx> hankel_forward(double a, const WeightedRadialGrid& g, std::vector<cplx> phi)
{
    check_grid_order(a, g);
    if (phi.size() != g.size())
        throw grid_mismatch("hankel_forward: size mismatch");
    hankel_for(g)->forward(phi.data(), 1);
    return phi;
}

inline std::vector<cplx> hankel_inverse(double a, const WeightedRadialGrid& g, std::vector<cplx> phi)
{
    check_grid_order(a, g);
    if (phi.size() != g.size())
        throw grid_mismatch("hankel_inverse: size mismatch");
    hankel_for(g)->inverse(phi.data(), 1);
    return phi;
}

// (xi, kappa, tau) samples of the Fourier-Hankel transform
struct SpectralField {
    CartesianGrid xg;
    std::vector<double> kappa, kappa_w;
    std::vector<double> tau;
    double dtau = 0.0;
    std::vector<cplx> v; // xi fastest, then kappa, then tau

    size_t nx() const { return xg.points(); }
    size_t nk() const { return kappa.size(); }
    cplx operator()(size_t ix, size_t ik, size_t it) const { return v[ix + nx() * (ik + nk() * it)]; }
};

// x- and z-transform of every time slice, in place
inline void space_forward(SpaceTimeField& U)
{
    auto H = hankel_for(U.zg);
    fourier_x_inplace(U.xg, U.v.data(), U.nz() * U.nt(), Direction::forward);
    for (size_t it = 0; it < U.nt(); ++it)
        H->forward(U.slice_ptr(it), U.nx());
}

// tau_n = n/T, n in [-Nt/2, Nt/2); t-integral by the trapezoid rule on [0,T].
// Exactly Plancherel when U(., 0) = U(., T).
inline SpectralField fourier_hankel(const SpaceTimeField& U)
{
    SpaceTimeField W = U;
    W.trace.clear();
    space_forward(W);
    auto H = hankel_for(U.zg);
    SpectralField S;
    S.xg = U.xg;
    S.kappa = H->frequencies();
    S.kappa_w.resize(S.kappa.size());
    for (size_t m = 0; m < S.kappa.size(); ++m)
        S.kappa_w[m] = H->freq_weight(m);
    const int Nt = U.tg.Nt;
    const double T = U.tg.T;
    S.dtau = 1.0 / T;
    for (int n = -Nt / 2; n < Nt - Nt / 2; ++n)
        S.tau.push_back(n / T);
    const size_t sl = W.slice();
    S.v.assign(sl * S.tau.size(), cplx(0.0));
    for (size_t n = 0; n < S.tau.size(); ++n) {
        cplx* out = S.v.data() + sl * n;
        for (int j = 0; j <= Nt; ++j) {
            double t = U.tg.node(j);
            cplx e = std::polar(U.tg.weight(j), -2.0 * specfun::pi * S.tau[n] * t);
            const cplx* in = W.slice_ptr(j);
            for (size_t p = 0; p < sl; ++p)
                out[p] += e * in[p];
        }
    }
    return S;
}

} // namespace bsns
