#pragma once

#include <bsns/norms.hpp>
#include <bsns/propagators.hpp>

#include <functional>
#include <map>

namespace bsns {

namespace detail {

inline void check_space(const SpaceTimeField& F)
{
    if (F.v.size() != F.slice() * F.nt())
        throw grid_mismatch("space-time field size does not match its grids");
}

// raw x-DFT of every time slice, then Hankel: spectral copy of F
inline std::vector<cplx> spectral_slices(const SpectralContext& ctx, const SpaceTimeField& F)
{
    std::vector<cplx> s = F.v;
    const size_t sl = F.slice();
    parallel_for(F.nt(), [&](size_t j) { ctx.to_spectral(s.data() + sl * j); });
    return s;
}

} // namespace detail

// T*_a u0 on the time grid: propagate(t_j, u0) with z = 0 layer
inline SpaceTimeField op_Tstar(double a, int d, const HalfSpaceField& u0, const TimeGrid& tg)
{
    check_field(a, d, u0.xg, u0.zg);
    SpectralContext ctx(u0.xg, u0.zg);
    std::vector<cplx> s0 = u0.v;
    ctx.to_spectral(s0.data());
    SpaceTimeField U(u0.xg, u0.zg, tg);
    U.trace.assign(U.nx() * U.nt(), cplx(0.0));
    parallel_for(U.nt(), [&](size_t j) {
        if (j == 0) {
            U.set(0, u0);
            if (!u0.has_trace()) {
                auto f = ctx.synthesize(s0);
                std::copy(f.trace.begin(), f.trace.end(), U.trace.begin());
            }
            return;
        }
        std::vector<cplx> s = s0;
        ctx.evolve(s.data(), tg.node((int)j));
        U.set(j, ctx.synthesize(std::move(s)));
    });
    return U;
}

namespace detail {

// h int_0^1 e^{th u} du and h int_0^1 u e^{th u} du, th = c h
inline std::pair<cplx, cplx> exp_moments(cplx th, double h)
{
    if (std::abs(th) < 0.5) {
        cplx i0 = 0.0, i1 = 0.0, p = 1.0;
        double f = 1.0;
        for (int k = 0; k < 30; ++k) {
            if (k > 0) {
                p *= th;
                f *= k;
            }
            i0 += p / (f * (k + 1));
            i1 += p / (f * (k + 2));
        }
        return {h * i0, h * i1};
    }
    cplx e = std::exp(th);
    return {h * (e - 1.0) / th, h * (e * (th - 1.0) + 1.0) / (th * th)};
}

} // namespace detail

// D_a F(t_j) = int_0^{t_j} S_a(t_j - tau) F(tau) dtau. F is taken piecewise linear in tau and
// each step is integrated exactly in spectral variables.
inline SpaceTimeField op_D(double a, int d, const SpaceTimeField& F)
{
    check_field(a, d, F.xg, F.zg);
    detail::check_space(F);
    SpectralContext ctx(F.xg, F.zg);
    auto Fs = detail::spectral_slices(ctx, F);
    const size_t nx = F.nx(), nz = F.nz(), sl = F.slice();
    const double h = F.tg.dt();
    std::vector<cplx> Ds(sl * F.nt(), cplx(0.0));
    parallel_for(nz, [&](size_t m) {
        for (size_t ix = 0; ix < nx; ++ix) {
            double lam = ctx.xsym()[ix] + ctx.zsym()[m];
            cplx th(0.0, -lam * h);
            auto [i0, i1] = detail::exp_moments(th, h);
            cplx prop = std::exp(th), w_old = i1, w_new = i0 - i1;
            size_t p = ix + nx * m;
            for (size_t j = 0; j + 1 < F.nt(); ++j)
                Ds[p + sl * (j + 1)] = prop * Ds[p + sl * j] + w_old * Fs[p + sl * j] + w_new * Fs[p + sl * (j + 1)];
        }
    });
    SpaceTimeField U(F.xg, F.zg, F.tg);
    U.trace.assign(nx * U.nt(), cplx(0.0));
    parallel_for(U.nt(), [&](size_t j) {
        std::vector<cplx> s(Ds.begin() + sl * j, Ds.begin() + sl * (j + 1));
        U.set(j, ctx.synthesize(std::move(s)));
    });
    return U;
}

namespace detail {

struct CellPair {
    cplx A, B; // weights of the far (s1) and near (s0) endpoint values
};

// int_U^inf u^{e} e^{i(w u - kap/u)} du, along u = U + i y
inline cplx ray_tail(double e, double w, double kap, double U)
{
    const double c = U / (1.0 + w * U), h = 0.1;
    cplx sum = 0.0;
    for (int k = -60; k <= 60; ++k) {
        double t = k * h;
        double ex = 0.5 * specfun::pi * std::sinh(t);
        if (ex > 600.0)
            break;
        double y = c * std::exp(ex);
        if (w * y > 745.0)
            break;
        double dy = y * 0.5 * specfun::pi * std::cosh(t);
        cplx u(U, y);
        sum += std::pow(u, e) * std::exp(cplx(0.0, 1.0) * (w * u - kap / u)) * dy;
    }
    return cplx(0.0, h) * sum;
}

inline constexpr double hard_variation = 100.0;

// int_{s0}^{s1} g(s) (s1-s)/dt ds and int g(s) (s-s0)/dt ds, g = s^{-beta} e^{i(w/s - kap s)}
inline CellPair cell_pair(double beta, double w, double kap, double s0, double s1)
{
    const double dt = s1 - s0;
    CellPair out{0.0, 0.0};
    if (s0 == 0.0 && w == 0.0) {
        int n = 20 + (int)(0.75 * kap * dt);
        const auto& r = quad::jacobi_left_cached(n, beta);
        double sc = std::pow(0.5 * dt, 1.0 - beta);
        for (int i = 0; i < n; ++i) {
            double v = 0.5 * (1.0 + r.x[i]);
            cplx g = sc * r.w[i] * std::polar(1.0, -kap * v * dt);
            out.B += g * (1.0 - v);
            out.A += g * v;
        }
        return out;
    }
    double var = s0 > 0.0 ? w * (1.0 / s0 - 1.0 / s1) : inf;
    if (var > hard_variation) {
        double U1 = 1.0 / s1;
        cplx G0 = ray_tail(beta - 2.0, w, kap, U1), G1 = ray_tail(beta - 3.0, w, kap, U1);
        if (s0 > 0.0) {
            G0 -= ray_tail(beta - 2.0, w, kap, 1.0 / s0);
            G1 -= ray_tail(beta - 3.0, w, kap, 1.0 / s0);
        }
        out.A = (G1 - s0 * G0) / dt;
        out.B = (s1 * G0 - G1) / dt;
        return out;
    }
    int n = std::min(2000, 20 + (int)(0.75 * (var + kap * dt)));
    const auto& r = quad::legendre_cached(n);
    for (int i = 0; i < n; ++i) {
        double v = 0.5 * (1.0 + r.x[i]), s = s0 + v * dt;
        cplx g = 0.5 * dt * r.w[i] * std::pow(s, -beta) * std::polar(1.0, w / s - kap * s);
        out.B += g * (1.0 - v);
        out.A += g * v;
    }
    return out;
}

// cell weights for every distinct 4 pi^2|xi|^2, every layer (0 = boundary, then z nodes), every step
struct ThetaTables {
    std::vector<double> kappa;      // distinct x symbols
    std::vector<size_t> kindex;     // x-frequency -> kappa slot
    size_t layers = 0, steps = 0;
    std::vector<CellPair> cells;    // [kappa][layer][n]
    const CellPair& at(size_t k, size_t l, size_t n) const { return cells[(k * layers + l) * steps + n]; }
};

inline ThetaTables theta_tables(double a, const SpectralContext& ctx, const TimeGrid& tg)
{
    ThetaTables T;
    std::map<double, size_t> slot;
    T.kindex.resize(ctx.nx());
    for (size_t ix = 0; ix < ctx.nx(); ++ix) {
        double k = ctx.xsym()[ix];
        auto it = slot.find(k);
        if (it == slot.end()) {
            it = slot.emplace(k, T.kappa.size()).first;
            T.kappa.push_back(k);
        }
        T.kindex[ix] = it->second;
    }
    T.layers = ctx.nz() + 1;
    T.steps = (size_t)tg.Nt;
    T.cells.resize(T.kappa.size() * T.layers * T.steps);
    const double beta = 0.5 * (a + 1.0), dt = tg.dt();
    parallel_for(T.kappa.size() * T.layers, [&](size_t kl) {
        size_t k = kl / T.layers, l = kl % T.layers;
        double z = l == 0 ? 0.0 : ctx.zgrid().z[l - 1];
        for (size_t n = 0; n < T.steps; ++n)
            T.cells[kl * T.steps + n] = cell_pair(beta, 0.25 * z * z, T.kappa[k], n * dt, (n + 1) * dt);
    });
    return T;
}

// -i S_a(z, 0, s) = P s^{-beta} e^{i z^2/4s}
inline cplx theta_prefactor(double a)
{
    double beta = 0.5 * (a + 1.0);
    return cplx(0.0, -1.0) * std::polar(boundary_constant(a), -beta * specfun::pi / 2.0);
}

inline void check_theta_order(double a)
{
    if (!(a > -1.0 && a < 1.0))
        throw config_error("boundary operators need -1 < a < 1");
}

} // namespace detail

// Theta*_a Phi(X, t) = -i int_0^t S_a(z, 0, t - tau) [S(t - tau) Phi(tau)](x) dtau.
// The sign makes lim z^a dU/dz = +Phi. Phi is taken piecewise linear in tau; each cell
// integral is done against the exact kernel (Gauss rules, or a complex ray for the
// oscillatory cells next to tau = t). z = 0 is evaluated from the boundary kernel.
// The cell tables depend only on the grids, so repeated applications reuse them.
class BoundaryOperator {
public:
    BoundaryOperator(double a, int d, const CartesianGrid& xg, const WeightedRadialGrid& zg, const TimeGrid& tg)
        : a_(a), ctx_(xg, zg), tg_(tg)
    {
        detail::check_theta_order(a);
        check_grid_order(a, zg);
        if (xg.d != d)
            throw grid_mismatch("Theta*: x grid dimension differs from d");
        tab_ = detail::theta_tables(a, ctx_, tg);
        P_ = detail::theta_prefactor(a);
    }

    SpaceTimeField apply(const BoundaryTrace& Phi) const
    {
        check_same(Phi.xg, ctx_.xgrid());
        check_same(Phi.tg, tg_);
        const auto& zg = ctx_.zgrid();
        const size_t nx = Phi.nx(), nt = Phi.nt(), nz = zg.size();
        std::vector<cplx> ph = Phi.v;
        dft_x(Phi.xg, ph.data(), nt, Direction::forward);
        SpaceTimeField U(Phi.xg, zg, Phi.tg);
        U.trace.assign(nx * nt, cplx(0.0));
        parallel_for(nz + 1, [&](size_t l) {
            for (size_t ix = 0; ix < nx; ++ix) {
                size_t k = tab_.kindex[ix];
                for (size_t j = 1; j < nt; ++j) {
                    cplx s = tab_.at(k, l, j - 1).A * ph[ix];
                    for (size_t m = 0; m < j; ++m) {
                        cplx w = tab_.at(k, l, m).B + (m >= 1 ? tab_.at(k, l, m - 1).A : cplx(0.0));
                        s += w * ph[ix + nx * (j - m)];
                    }
                    cplx v = P_ * s;
                    if (l == 0)
                        U.trace[ix + nx * j] = v;
                    else
                        U(ix, l - 1, j) = v;
                }
            }
        });
        ctx_.inverse_x(U.v.data(), nz * nt);
        ctx_.inverse_x(U.trace.data(), nt);
        return U;
    }

    double a() const { return a_; }

private:
    double a_;
    SpectralContext ctx_;
    TimeGrid tg_;
    detail::ThetaTables tab_;
    cplx P_;
};

inline SpaceTimeField op_Thetastar(double a, int d, const BoundaryTrace& Phi, const WeightedRadialGrid& zg)
{
    return BoundaryOperator(a, d, Phi.xg, zg, Phi.tg).apply(Phi);
}

// Theta_a V(y, tau) = i int_tau^T [S_a(tau - sigma) V(sigma)](y, 0) dsigma, V piecewise linear
// in sigma. Adjoint of op_Thetastar for the L^2 pairings on the grids.
inline BoundaryTrace op_Theta(double a, int d, const SpaceTimeField& V)
{
    detail::check_theta_order(a);
    check_field(a, d, V.xg, V.zg);
    detail::check_space(V);
    SpectralContext ctx(V.xg, V.zg);
    const size_t nx = V.nx(), nt = V.nt(), nz = V.nz(), N = nt - 1;
    std::vector<cplx> vh = V.v;
    dft_x(V.xg, vh.data(), nz * nt, Direction::forward);
    auto tab = detail::theta_tables(a, ctx, V.tg);
    const cplx P = std::conj(detail::theta_prefactor(a));
    BoundaryTrace out(V.xg, V.tg);
    parallel_for(nx, [&](size_t ix) {
        size_t k = tab.kindex[ix];
        for (size_t j = 0; j < N; ++j) {
            cplx s = 0.0;
            for (size_t iz = 0; iz < nz; ++iz) {
                cplx sz = 0.0;
                for (size_t m = 0; m <= N - j; ++m) {
                    cplx w = (m < N - j ? tab.at(k, iz + 1, m).B : cplx(0.0)) +
                             (m >= 1 ? tab.at(k, iz + 1, m - 1).A : cplx(0.0));
                    sz += std::conj(w) * vh[ix + nx * (iz + nz * (j + m))];
                }
                s += V.zg.w[iz] * sz;
            }
            out(ix, j) = P * s;
        }
    });
    ctx.inverse_x(out.v.data(), nt);
    return out;
}

inline bool is_zero(const std::vector<cplx>& v)
{
    return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx(0.0); });
}

// U = T*_a u0 + D_a F + Theta*_a Phi
inline SpaceTimeField solve_linear(double a, int d, const HalfSpaceField& u0, const SpaceTimeField& F,
                                   const BoundaryTrace& Phi)
{
    check_same(u0.xg, F.xg);
    check_same(u0.zg, F.zg);
    check_same(F.xg, Phi.xg);
    check_same(F.tg, Phi.tg);
    SpaceTimeField U = op_Tstar(a, d, u0, F.tg);
    auto add = [&](const SpaceTimeField& W) {
        for (size_t p = 0; p < U.v.size(); ++p)
            U.v[p] += W.v[p];
        for (size_t p = 0; p < U.trace.size(); ++p)
            U.trace[p] += W.trace[p];
    };
    if (!is_zero(F.v))
        add(op_D(a, d, F));
    if (!is_zero(Phi.v))
        add(op_Thetastar(a, d, Phi, F.zg));
    return U;
}

struct TraceResult {
    BoundaryTrace trace;
    std::vector<double> z;       // z nodes
    std::vector<double> profile; // z -> ||U(., z, .) - U(., 0, .)||_{L^q_t L^r_x}
};

inline TraceResult boundary_trace(const SpaceTimeField& U, double q = 2.0, double r = 2.0)
{
    TraceResult out{BoundaryTrace(U.xg, U.tg), U.zg.z, {}};
    const size_t nx = U.nx(), nt = U.nt();
    if (U.has_trace()) {
        out.trace.v = U.trace;
    } else {
        // z = 0 by spectral synthesis
        SpectralContext ctx(U.xg, U.zg);
        auto s = detail::spectral_slices(ctx, U);
        for (size_t j = 0; j < nt; ++j)
            ctx.trace_spectral(s.data() + U.slice() * j, out.trace.v.data() + nx * j);
        ctx.inverse_x(out.trace.v.data(), nt);
    }
    MixedNormSpec spec;
    spec.q = q;
    spec.r = r;
    BoundaryTrace diff(U.xg, U.tg);
    for (size_t iz = 0; iz < U.nz(); ++iz) {
        for (size_t j = 0; j < nt; ++j)
            for (size_t ix = 0; ix < nx; ++ix)
                diff(ix, j) = U(ix, iz, j) - out.trace(ix, j);
        out.profile.push_back(trace_norm(diff, spec));
    }
    return out;
}

struct NeumannResidual {
    std::vector<double> z;                    // the layers used (smallest first)
    std::vector<std::vector<double>> layers;  // per layer, per t: ||flux - Phi||_{L^{r'}_x}
    const std::vector<double>& profile() const { return layers.front(); }
};

// z^a dU/dz at the smallest layers from (1-a)(U(z) - U(0))/z^{1-a}, compared with Phi in L^{r'}_x
inline NeumannResidual neumann_residual(double a, const SpaceTimeField& U, const BoundaryTrace& Phi, double rp = 2.0)
{
    check_grid_order(a, U.zg);
    check_same(U.xg, Phi.xg);
    check_same(U.tg, Phi.tg);
    if (!(a < 1.0))
        throw config_error("neumann_residual: a < 1");
    size_t below = 0;
    while (below < U.nz() && U.zg.z[below] < 0.1)
        ++below;
    if (below < 3)
        throw config_error("neumann_residual: need at least 3 z layers below 0.1");
    BoundaryTrace tr = U.has_trace() ? BoundaryTrace(U.xg, U.tg) : boundary_trace(U).trace;
    if (U.has_trace())
        tr.v = U.trace;
    NeumannResidual out;
    const size_t nx = U.nx();
    std::vector<cplx> buf(nx);
    for (size_t iz = 0; iz < 3; ++iz) {
        double z = U.zg.z[iz];
        out.z.push_back(z);
        std::vector<double> prof;
        for (size_t j = 0; j < U.nt(); ++j) {
            for (size_t ix = 0; ix < nx; ++ix)
                buf[ix] = (1.0 - a) * (U(ix, iz, j) - tr(ix, j)) / std::pow(z, 1.0 - a) - Phi(ix, j);
            prof.push_back(detail::x_norm(buf.data(), nx, U.xg.cell(), rp));
        }
        out.layers.push_back(prof);
    }
    return out;
}

// smooth cutoff equal to 1 on [0, 1] and 0 beyond 2
inline double cutoff_h(double z)
{
    if (z <= 1.0)
        return 1.0;
    if (z >= 2.0)
        return 0.0;
    auto f = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
    double s = z - 1.0;
    return f(1.0 - s) / (f(1.0 - s) + f(s));
}

// u0 = f + z^{1-a}/(1-a) h(z): weighted Neumann flux 1 at t = 0, 0 afterwards
inline HalfSpaceField fixture_datum(double a, const CartesianGrid& xg, const WeightedRadialGrid& zg,
                                    const std::function<cplx(std::span<const double>, double)>& f)
{
    if (!(a > -1.0 && a < 1.0))
        throw config_error("fixture datum needs -1 < a < 1");
    check_grid_order(a, zg);
    HalfSpaceField u(xg, zg);
    std::vector<double> x(xg.d);
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            for (int k = 0; k < xg.d; ++k)
                x[k] = xg.node(xg.index(ix, k));
            double z = zg.z[iz];
            u(ix, iz) = f(x, z) + std::pow(z, 1.0 - a) / (1.0 - a) * cutoff_h(z);
        }
    u.trace.resize(u.nx());
    for (size_t ix = 0; ix < u.nx(); ++ix) {
        for (int k = 0; k < xg.d; ++k)
            x[k] = xg.node(xg.index(ix, k));
        u.trace[ix] = f(x, 0.0);
    }
    return u;
}

inline HalfSpaceField fixture_datum(double a, const CartesianGrid& xg, const WeightedRadialGrid& zg)
{
    return fixture_datum(a, xg, zg, [](std::span<const double> x, double z) {
        double r2 = z * z;
        for (double v : x)
            r2 += v * v;
        return cplx(std::exp(-r2 / 4.0));
    });
}

} // namespace bsns
