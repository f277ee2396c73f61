#pragma once

#include <fftw3.h>

#include <bsns/grid.hpp>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace bsns {

enum class Direction { forward, inverse };

namespace detail {

inline std::mutex& fftw_mutex()
{
    static std::mutex m;
    return m;
}

// plans are created once per shape and executed with the new-array interface
inline fftw_plan fftw_plan_for(int d, int n, size_t howmany, int sign)
{
    static std::map<std::tuple<int, int, size_t, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lk(fftw_mutex());
    auto key = std::make_tuple(d, n, howmany, sign);
    auto it = plans.find(key);
    if (it != plans.end())
        return it->second;
    std::vector<int> dims(d, n);
    size_t dist = 1;
    for (int i = 0; i < d; ++i)
        dist *= (size_t)n;
    std::vector<fftw_complex> buf(dist * howmany);
    fftw_plan p = fftw_plan_many_dft(d, dims.data(), (int)howmany, buf.data(), nullptr, 1, (int)dist, buf.data(),
                                     nullptr, 1, (int)dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
}

} // namespace detail

// unnormalized DFT over the x block of each of `howmany` consecutive blocks
inline void dft_x(const CartesianGrid& g, cplx* data, size_t howmany, Direction dir)
{
    if (howmany == 0)
        return;
    fftw_plan p = detail::fftw_plan_for(g.d, g.Nx, howmany, dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* f = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, f, f);
}

// |xi|^2 of each flat frequency index
inline std::vector<double> freq_sq(const CartesianGrid& g)
{
    std::vector<double> out(g.points());
    for (size_t p = 0; p < out.size(); ++p) {
        double s = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            double f = g.freq(g.index(p, ax));
            s += f * f;
        }
        out[p] = s;
    }
    return out;
}

// continuous transform  U^(xi) = int e^{-2 pi i xi.x} U dx  (and its inverse),
// sampled at xi_m = m/(2Xmax) in FFT order
inline void fourier_x_inplace(const CartesianGrid& g, cplx* data, size_t howmany, Direction dir)
{
    const size_t np = g.points();
    std::vector<double> sgn(np);
    for (size_t p = 0; p < np; ++p) {
        int par = 0;
        for (int ax = 0; ax < g.d; ++ax)
            par += g.index(p, ax);
        sgn[p] = (par % 2 == 0) ? 1.0 : -1.0;
    }
    if (dir == Direction::forward) {
        dft_x(g, data, howmany, dir);
        const double c = g.cell();
        for (size_t b = 0; b < howmany; ++b)
            for (size_t p = 0; p < np; ++p)
                data[b * np + p] *= c * sgn[p];
    } else {
        const double c = 1.0 / (g.cell() * (double)np);
        for (size_t b = 0; b < howmany; ++b)
            for (size_t p = 0; p < np; ++p)
                data[b * np + p] *= c * sgn[p];
        dft_x(g, data, howmany, dir);
    }
}

inline HalfSpaceField fourier_x(const HalfSpaceField& f, Direction dir)
{
    HalfSpaceField out = f;
    fourier_x_inplace(f.xg, out.v.data(), f.nz(), dir);
    if (out.has_trace())
        fourier_x_inplace(f.xg, out.trace.data(), 1, dir);
    return out;
}

inline SpaceTimeField fourier_x(const SpaceTimeField& f, Direction dir)
{
    SpaceTimeField out = f;
    fourier_x_inplace(f.xg, out.v.data(), f.nz() * f.nt(), dir);
    if (out.has_trace())
        fourier_x_inplace(f.xg, out.trace.data(), f.nt(), dir);
    return out;
}

inline BoundaryTrace fourier_x(const BoundaryTrace& f, Direction dir)
{
    BoundaryTrace out = f;
    fourier_x_inplace(f.xg, out.v.data(), f.nt(), dir);
    return out;
}

} // namespace bsns
