#pragma once

#include <bsns/duhamel.hpp>
#include <bsns/norms.hpp>
#include <bsns/propagators.hpp>

#include <memory>
#include <random>

namespace bsns {

// grids shared by the ensemble checks
struct GridSpec {
    double Xmax = 8.0;
    int Nx = 32;
    double Zmax = 8.0;
    int Nz = 32;
    double T = 1.0;
    int Nt = 24;
    RadialScheme scheme = RadialScheme::bessel_collocation;

    CartesianGrid x(int d) const { return make_cartesian(d, Xmax, Nx); }
    WeightedRadialGrid z(double a) const { return build_radial_grid(a, Zmax, Nz, scheme); }
    TimeGrid t() const { return make_time(T, Nt); }
};

namespace detail {

inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo * (1 - 1e-12) || t[i] > hi * (1 + 1e-12))
            continue;
        double X = std::log(t[i]), Y = std::log(y[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++n;
    }
    if (n < 2)
        throw config_error("slope fit needs two points");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> log_times(double t0, double t1, int n)
{
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i)
        t[i] = n == 1 ? t0 : t0 * std::pow(t1 / t0, (double)i / (n - 1));
    return t;
}

inline cplx pair_st(const SpaceTimeField& U, const SpaceTimeField& V)
{
    cplx s = 0;
    for (size_t j = 0; j < U.nt(); ++j)
        s += U.tg.weight((int)j) * l2a_inner(U.at(j), V.at(j));
    return s;
}

inline cplx pair_b(const BoundaryTrace& P, const BoundaryTrace& Q)
{
    cplx s = 0;
    for (size_t j = 0; j < P.nt(); ++j)
        for (size_t ix = 0; ix < P.nx(); ++ix)
            s += P.tg.weight((int)j) * P.xg.cell() * P(ix, j) * std::conj(Q(ix, j));
    return s;
}

inline double norm_L1_L2a(const SpaceTimeField& F)
{
    double s = 0;
    for (size_t j = 0; j < F.nt(); ++j)
        s += F.tg.weight((int)j) * l2a_norm(F.at(j));
    return s;
}

inline double sup_L2a(const SpaceTimeField& U)
{
    double m = 0;
    for (size_t j = 0; j < U.nt(); ++j)
        m = std::max(m, l2a_norm(U.at(j)));
    return m;
}

// F(., z, .) times w(z); the trace layer gets w at z -> 0 (passed in)
inline SpaceTimeField z_weighted(const SpaceTimeField& F, const std::function<double(double)>& w, double w0)
{
    SpaceTimeField G = F;
    for (size_t j = 0; j < F.nt(); ++j)
        for (size_t iz = 0; iz < F.nz(); ++iz) {
            double c = w(F.zg.z[iz]);
            for (size_t ix = 0; ix < F.nx(); ++ix)
                G(ix, iz, j) *= c;
        }
    for (auto& v : G.trace)
        v *= w0;
    return G;
}

// L^q_t of the joint L^r(dx z^a dz) norm
inline double joint_norm(const SpaceTimeField& F, double q, double r)
{
    std::vector<double> g(F.nt()), w(F.nt());
    const double c = F.xg.cell();
    for (size_t j = 0; j < F.nt(); ++j) {
        w[j] = F.tg.weight((int)j);
        double s = 0;
        for (size_t iz = 0; iz < F.nz(); ++iz) {
            double sz = 0;
            for (size_t ix = 0; ix < F.nx(); ++ix)
                sz += std::pow(std::abs(F(ix, iz, j)), r);
            s += F.zg.w[iz] * c * sz;
        }
        g[j] = std::pow(s, 1.0 / r);
    }
    return lp_norm(g, w, q);
}

// seeded building blocks: Gaussian times a low-degree polynomial in each variable
struct Bump {
    cplx amp;
    double x0, wx, z0, wz, kx, b1, b2, om, c1;

    static Bump draw(std::mt19937_64& g)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Bump b;
        b.amp = std::polar(0.5 + u(g), 2 * specfun::pi * u(g));
        b.x0 = 4 * u(g) - 2;
        b.wx = 0.7 + 0.8 * u(g);
        b.z0 = 0.5 * u(g);
        b.wz = 0.7 + 0.8 * u(g);
        b.kx = 2 * u(g) - 1;
        b.b1 = u(g) - 0.5;
        b.b2 = u(g) - 0.5;
        b.om = 4 * u(g) - 2;
        b.c1 = u(g) - 0.5;
        return b;
    }
    cplx space(double x, double z) const
    {
        double X = (x - x0) / wx, Z = (z - z0) / wz;
        return amp * std::exp(-X * X - Z * Z) * (1.0 + b1 * X + b2 * Z * Z) * std::polar(1.0, kx * x);
    }
    cplx edge(double x) const
    {
        double X = (x - x0) / wx;
        return amp * std::exp(-X * X) * (1.0 + b1 * X) * std::polar(1.0, kx * x);
    }
    cplx time(double t) const { return (1.0 + c1 * t) * std::polar(1.0, om * t); }
};

// first coordinate only enters the bump; further axes get a plain Gaussian
inline double x_rest(const CartesianGrid& xg, size_t ix)
{
    double s = 0;
    for (int k = 1; k < xg.d; ++k) {
        double x = xg.node(xg.index(ix, k));
        s += x * x;
    }
    return std::exp(-s);
}

} // namespace detail

// ---------------------------------------------------------------- dispersive rates

// phi(z) = exp(-(z - c)^2 / w^2) exp(i theta z)
struct RadialGaussian {
    double w = 1.0, c = 0.0, theta = 0.0;
    cplx operator()(double z) const
    {
        double s = (z - c) / w;
        return std::exp(-s * s) * std::polar(1.0, theta * z);
    }
};

// widths in [0.6, 1], centres in [0, 0.3], phases in [0, 0.5]
inline std::vector<RadialGaussian> dispersive_family(int n, uint64_t seed)
{
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RadialGaussian> f(n);
    for (auto& m : f) {
        m.w = 0.6 + 0.4 * u(g);
        m.c = 0.3 * u(g);
        m.theta = 0.5 * u(g);
    }
    return f;
}

struct DispersiveConfig {
    double t0 = 1.0, t1 = 16.0;
    int nt = 13;
    double Zmax = 160.0;
    int Nz = 256;
};

struct DispersiveResult {
    double a = 0, rate = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> sup;   // per member, per t (k-weighted when a < 0)
    std::vector<double> slopes;             // per member
    double worst_rel = 0;                   // a >= 0: max |slope / rate - 1|
    std::vector<std::vector<double>> ratio; // a < 0: envelope ratio per member, per t
    double spread = 0;                      // a < 0: max over members of max/min over t
    double tail_slope = 0;                  // a < 0: max |log-slope of the ratio| on [t1/4, t1]
};

inline DispersiveResult dispersive_fit(double a, const std::vector<RadialGaussian>& family,
                                       const DispersiveConfig& cfg = {})
{
    if (!(a > -1.0))
        throw config_error("dispersive_fit: a > -1");
    if (family.empty())
        throw config_error("dispersive_fit: degenerate family (empty)");
    if (!(cfg.t0 > 0.0 && cfg.t1 > cfg.t0) || cfg.nt < 3)
        throw config_error("dispersive_fit: bad t-range");
    // beyond t ~ Zmax/8 the discrete spectrum starts to recur
    if (cfg.Zmax < 8.0 * cfg.t1)
        throw config_error("dispersive_fit: t-range exceeds grid validity (need Zmax >= 8 t1)");
    auto zg = build_radial_grid(a, cfg.Zmax, cfg.Nz, RadialScheme::bessel_collocation);
    const bool anom = a < 0.0;
    const double beta = 0.5 * (a + 1.0);
    DispersiveResult out;
    out.a = a;
    out.rate = -beta;
    out.t = detail::log_times(cfg.t0, cfg.t1, cfg.nt);
    const size_t nm = family.size();
    out.sup.assign(nm, std::vector<double>(out.t.size()));
    out.slopes.assign(nm, 0.0);
    std::vector<double> l1(nm, 0.0);
    for (size_t m = 0; m < nm; ++m) {
        if (!(family[m].w > 0.0))
            throw config_error("dispersive_fit: degenerate family (zero width)");
        for (size_t k = 0; k < zg.size(); ++k)
            l1[m] += zg.w[k] * std::abs(family[m](zg.z[k])) / (anom ? weight_k(a, zg.z[k]) : 1.0);
        if (!(l1[m] > 0.0))
            throw config_error("dispersive_fit: degenerate family (zero datum)");
    }
    parallel_for(nm, [&](size_t m) {
        std::vector<cplx> phi(zg.size());
        for (size_t k = 0; k < zg.size(); ++k)
            phi[k] = family[m](zg.z[k]);
        for (size_t i = 0; i < out.t.size(); ++i) {
            auto u = propagate_z(a, zg, out.t[i], phi);
            double s = std::abs(propagate_z_trace(a, zg, out.t[i], phi));
            for (size_t k = 0; k < zg.size(); ++k)
                s = std::max(s, std::abs(u[k]) * (anom ? weight_k(a, zg.z[k]) : 1.0));
            out.sup[m][i] = s;
        }
        out.slopes[m] = detail::loglog_slope(out.t, out.sup[m], cfg.t0, cfg.t1);
    });
    if (!anom) {
        for (double s : out.slopes)
            out.worst_rel = std::max(out.worst_rel, std::fabs(s / out.rate - 1.0));
        return out;
    }
    out.ratio.assign(nm, std::vector<double>(out.t.size()));
    for (size_t m = 0; m < nm; ++m) {
        for (size_t i = 0; i < out.t.size(); ++i) {
            double t = out.t[i];
            out.ratio[m][i] = out.sup[m][i] / ((std::pow(t, -beta) + std::pow(t, -0.5)) * l1[m]);
        }
        auto [lo, hi] = std::minmax_element(out.ratio[m].begin(), out.ratio[m].end());
        out.spread = std::max(out.spread, *hi / *lo);
        out.tail_slope =
            std::max(out.tail_slope, std::fabs(detail::loglog_slope(out.t, out.ratio[m], cfg.t1 / 4, cfg.t1)));
    }
    return out;
}

// ---------------------------------------------------------------- Strichartz ratios

struct StrichartzConfig {
    double a = 0.0;
    int d = 1;
    double q = 3, r = 3;
    double q_inf = inf; // anomalous only; 0 or inf means "solve from the a >= 0 relation"
    int n = 16;
    uint64_t seed = 1;
    bool with_u0 = true, with_F = true, with_Phi = true;
    GridSpec grid{12.0, 32, 12.0, 40, 2.0, 24};
};

struct StrichartzSample {
    double lhs1 = 0, rhs1 = 0; // energy estimate
    double lhs2 = 0, rhs2 = 0; // mixed-norm estimate
    double u0 = 0;             // ||u0||_{L^2_a}
    double ratio1() const { return rhs1 > 0 ? lhs1 / rhs1 : 0.0; }
    double ratio2() const { return rhs2 > 0 ? lhs2 / rhs2 : 0.0; }
};

struct StrichartzResult {
    double q = 0, r = 0, q_inf = inf;
    std::vector<StrichartzSample> samples;
    double max1 = 0, max2 = 0;
};

inline void check_strichartz(StrichartzConfig& c)
{
    if (c.n < 1)
        throw config_error("strichartz_ratio: empty ensemble");
    if (!(c.a > -1.0 && c.a < 1.0))
        throw config_error("strichartz_ratio: needs -1 < a < 1");
    if (c.a >= 0.0) {
        auto A = is_admissible(c.a, c.d, c.q, c.r, inf, Regime::nonneg_a);
        if (!A.admissible || !(c.q > 2.0))
            throw config_error("strichartz_ratio: inadmissible exponents");
        return;
    }
    if (!(c.q_inf > 0.0) || std::isinf(c.q_inf))
        c.q_inf = solve_q(c.a, c.d, c.r, Regime::nonneg_a);
    auto A = is_admissible(c.a, c.d, c.q, c.r, inf, Regime::anomalous_a);
    auto B = is_admissible(c.a, c.d, c.q_inf, c.r, inf, Regime::nonneg_a);
    if (!A.admissible || !B.admissible || !(c.q > 2.0) || !(c.q_inf > c.q))
        throw config_error("strichartz_ratio: inadmissible exponents");
}

// both estimates of the regime for every member:
//   a >= 0: sup_t ||U||_{L^2_a} and ||U||_{L^inf_z L^q_t L^r_x}, against
//           ||u0|| + ||F||_{L^1_t L^2_a} + ||Phi||_{L^q' L^r'}   and
//           ||u0|| + ||F||_{L^1_z L^q'_t L^r'_x} + ||Phi||_{L^q' L^r'}
//   a < 0:  the second pair becomes ||U k||_{L^inf_z (L^q + L^q_inf)_t L^r_x} against
//           ||u0|| + ||F / k||_{L^1_z (L^q' cap L^q_inf')_t L^r'_x} + ||Phi||_{L^q_inf' L^r'}
inline StrichartzResult strichartz_ratio(StrichartzConfig c)
{
    check_strichartz(c);
    const bool anom = c.a < 0.0;
    auto xg = c.grid.x(c.d);
    auto zg = c.grid.z(c.a);
    auto tg = c.grid.t();
    std::mt19937_64 g(c.seed);
    struct Member {
        detail::Bump u, f, p;
    };
    std::vector<Member> mem(c.n);
    for (auto& m : mem) {
        m.u = detail::Bump::draw(g);
        m.f = detail::Bump::draw(g);
        m.p = detail::Bump::draw(g);
    }
    std::shared_ptr<BoundaryOperator> B;
    if (c.with_Phi)
        B = std::make_shared<BoundaryOperator>(c.a, c.d, xg, zg, tg);
    const double qp = conjugate_exponent(c.q), rp = conjugate_exponent(c.r);
    const double qip = anom ? conjugate_exponent(c.q_inf) : qp;
    auto kw = [&](double z) { return weight_k(c.a, z); };
    StrichartzResult out;
    out.q = c.q;
    out.r = c.r;
    out.q_inf = anom ? c.q_inf : inf;
    out.samples.resize(c.n);
    parallel_for((size_t)c.n, [&](size_t i) {
        const auto& m = mem[i];
        HalfSpaceField u0(xg, zg);
        SpaceTimeField F(xg, zg, tg);
        BoundaryTrace Phi(xg, tg);
        for (size_t iz = 0; iz < zg.size(); ++iz)
            for (size_t ix = 0; ix < u0.nx(); ++ix) {
                double x = xg.node(xg.index(ix, 0)), z = zg.z[iz], xr = detail::x_rest(xg, ix);
                if (c.with_u0)
                    u0(ix, iz) = m.u.space(x, z) * xr;
                if (c.with_F) {
                    cplx s = m.f.space(x, z) * xr * cutoff_h(z / 1.5);
                    for (size_t j = 0; j < tg.count(); ++j)
                        F(ix, iz, j) = s * m.f.time(tg.node((int)j));
                }
            }
        if (c.with_Phi)
            for (size_t j = 0; j < tg.count(); ++j)
                for (size_t ix = 0; ix < Phi.nx(); ++ix)
                    Phi(ix, j) = m.p.edge(xg.node(xg.index(ix, 0))) * detail::x_rest(xg, ix) * m.p.time(tg.node((int)j));

        SpaceTimeField U = op_Tstar(c.a, c.d, u0, tg);
        auto add = [&](const SpaceTimeField& W) {
            for (size_t p = 0; p < U.v.size(); ++p)
                U.v[p] += W.v[p];
            for (size_t p = 0; p < U.trace.size(); ++p)
                U.trace[p] += W.trace[p];
        };
        if (c.with_F)
            add(op_D(c.a, c.d, F));
        if (c.with_Phi)
            add(B->apply(Phi));

        StrichartzSample s;
        s.u0 = l2a_norm(u0);
        s.lhs1 = detail::sup_L2a(U);
        MixedNormSpec phs;
        phs.q = qip;
        phs.r = rp;
        double phi_n = c.with_Phi ? trace_norm(Phi, phs) : 0.0;
        s.rhs1 = s.u0 + detail::norm_L1_L2a(F) + phi_n;
        MixedNormSpec ls;
        ls.m = inf;
        ls.q = c.q;
        ls.r = c.r;
        MixedNormSpec fs;
        fs.m = 1;
        fs.q = qp;
        fs.r = rp;
        if (!anom) {
            s.lhs2 = mixed_norm(U, ls);
            s.rhs2 = s.u0 + (c.with_F ? mixed_norm(F, fs) : 0.0) + phi_n;
        } else {
            ls.kind = TimeNorm::sum;
            ls.q2 = c.q_inf;
            s.lhs2 = mixed_norm(detail::z_weighted(U, kw, 1.0), ls);
            fs.kind = TimeNorm::intersection;
            fs.q2 = qip;
            double fn = 0.0;
            if (c.with_F)
                fn = mixed_norm(detail::z_weighted(F, [&](double z) { return 1.0 / kw(z); }, 1.0), fs);
            s.rhs2 = s.u0 + fn + phi_n;
        }
        out.samples[i] = s;
    });
    for (const auto& s : out.samples) {
        out.max1 = std::max(out.max1, s.ratio1());
        out.max2 = std::max(out.max2, s.ratio2());
    }
    return out;
}

// max ratio over n members against the same seed doubled
struct StrichartzStability {
    StrichartzResult small, large;
    double drift1 = 0, drift2 = 0; // |max(2n)/max(n) - 1|
};

inline StrichartzStability strichartz_stability(StrichartzConfig c)
{
    StrichartzStability s;
    c.n *= 2;
    s.large = strichartz_ratio(c);
    // members are drawn in sequence, so the first n of 2n are the n-member ensemble
    s.small = s.large;
    s.small.samples.resize(c.n / 2);
    s.small.max1 = s.small.max2 = 0;
    for (const auto& m : s.small.samples) {
        s.small.max1 = std::max(s.small.max1, m.ratio1());
        s.small.max2 = std::max(s.small.max2, m.ratio2());
    }
    s.drift1 = std::fabs(s.large.max1 / s.small.max1 - 1.0);
    s.drift2 = std::fabs(s.large.max2 / s.small.max2 - 1.0);
    return s;
}

// ---------------------------------------------------------------- scaling

struct ScalingConfig {
    double a = 0.0;
    int d = 1;
    double q = 3, r = 3, m = inf;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    GridSpec grid{24.0, 256, 24.0, 160, 1.0, 64};
};

struct ScalingResult {
    std::vector<double> lambda, lhs, rhs, ratio;
    double spread = 0;   // max/min - 1
    double slope = 0;    // d log(ratio) / d log(lambda)
    double residual = 0; // 2/q + d/r + (a+1)/m - (d+a+1)/2
    bool monotone = false;
};

// ||S(t) u0(lam .)||_{L^m_z L^q_t L^r_x} over t in [0, T/lam^2], divided by ||u0(lam .)||_{L^2_a}.
// The window scales with lam so that the continuum ratio is lam^{-residual}.
inline ScalingResult scaling_invariance(const ScalingConfig& c)
{
    if (!(c.a >= 0.0))
        throw config_error("scaling_invariance: a >= 0");
    if (c.lambdas.empty())
        throw config_error("scaling_invariance: empty lambda list");
    auto xg = c.grid.x(c.d);
    auto zg = c.grid.z(c.a);
    ScalingResult out;
    out.residual = 2 * inv(c.q) + c.d * inv(c.r) + (c.a + 1) * inv(c.m) - 0.5 * (c.d + c.a + 1);
    for (double lam : c.lambdas) {
        if (!(lam > 0.0))
            throw config_error("scaling_invariance: lambda > 0");
        HalfSpaceField u(xg, zg);
        for (size_t iz = 0; iz < u.nz(); ++iz)
            for (size_t ix = 0; ix < u.nx(); ++ix) {
                double x = lam * xg.node(xg.index(ix, 0)), z = lam * zg.z[iz];
                double r2 = x * x + z * z;
                for (int k = 1; k < c.d; ++k) {
                    double y = lam * xg.node(xg.index(ix, k));
                    r2 += y * y;
                }
                u(ix, iz) = std::exp(-r2 / 2) * (1.0 + 0.3 * x) * std::polar(1.0, 0.5 * x);
            }
        auto tg = make_time(c.grid.T / (lam * lam), c.grid.Nt);
        auto U = op_Tstar(c.a, c.d, u, tg);
        MixedNormSpec s;
        s.m = c.m;
        s.q = c.q;
        s.r = c.r;
        out.lambda.push_back(lam);
        out.lhs.push_back(mixed_norm(U, s));
        out.rhs.push_back(l2a_norm(u));
        out.ratio.push_back(out.lhs.back() / out.rhs.back());
    }
    auto [lo, hi] = std::minmax_element(out.ratio.begin(), out.ratio.end());
    out.spread = *hi / *lo - 1.0;
    if (out.lambda.size() >= 2) {
        out.slope = detail::loglog_slope(out.lambda, out.ratio, 0.0, inf);
        // sort by lambda and look for a strict trend
        std::vector<size_t> idx(out.lambda.size());
        for (size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return out.lambda[i] < out.lambda[j]; });
        bool up = true, down = true;
        for (size_t k = 1; k < idx.size(); ++k) {
            up = up && out.ratio[idx[k]] > out.ratio[idx[k - 1]];
            down = down && out.ratio[idx[k]] < out.ratio[idx[k - 1]];
        }
        out.monotone = up || down;
    }
    return out;
}

// ---------------------------------------------------------------- kernel self-correlation

struct SelfCorrelationRow {
    double delta = 0, t = 0; // delta = tau - sigma
    cplx numeric, closed;
    double rel = 0;
};

// 2^{-a}/Gamma(beta) e^{i beta pi/2 sgn(delta)} |delta|^{-beta}
inline cplx selfcorrelation_closed_form(double a, double delta)
{
    const double beta = 0.5 * (a + 1.0);
    return boundary_constant(a) * std::pow(std::fabs(delta), -beta) *
           std::polar(1.0, detail::sgn(delta) * beta * specfun::pi / 2);
}

namespace detail {

// int_0^inf S_a(z,0,s1) conj S_a(z,0,s2) z^a dz with n nodes per panel
inline cplx selfcorrelation_integral(double a, double s1, double s2, int n)
{
    const double C = boundary_constant(a), beta = 0.5 * (a + 1.0);
    const double c = (1.0 / s1 - 1.0 / s2) / 4.0;
    const double L = 1.0 / std::sqrt(std::fabs(c));
    auto f = [&](double z) { return kernel_sa(a, z, 0.0, s1) * std::conj(kernel_sa(a, z, 0.0, s2)); };
    cplx s = 0.0;
    // [0, L]: Gauss-Jacobi for z^a
    auto gj = quad::gauss_jacobi(n, 0.0, a);
    double sc = std::pow(0.5 * L, a + 1.0);
    for (int i = 0; i < n; ++i)
        s += sc * gj.w[i] * f(0.5 * L * (1.0 + gj.x[i]));
    // [L, 2L]: Gauss-Legendre
    const auto& gl = quad::legendre_cached(n);
    for (int i = 0; i < n; ++i) {
        double z = 1.5 * L + 0.5 * L * gl.x[i];
        s += 0.5 * L * gl.w[i] * f(z) * std::pow(z, a);
    }
    // tail along z = 2L + r e^{i phi}, phi = sgn(c) pi/4, where e^{i c z^2} decays
    const double Z0 = 2.0 * L;
    const cplx dir = std::polar(1.0, sgn(c) * specfun::pi / 4);
    const double amp = C * C * std::pow(s1 * s2, -beta);
    // |c| (sqrt2 Z0 R + R^2) = 40
    const double R = (-std::sqrt(2.0) * Z0 + std::sqrt(2.0 * Z0 * Z0 + 160.0 / std::fabs(c))) / 2.0;
    const int panels = std::max(1, (int)std::ceil(R / L));
    const double h = R / panels;
    for (int k = 0; k < panels; ++k)
        for (int i = 0; i < n; ++i) {
            double r = h * k + 0.5 * h * (1.0 + gl.x[i]);
            cplx z = Z0 + r * dir;
            s += 0.5 * h * gl.w[i] * dir * amp * std::exp(cplx(0.0, c) * z * z) * std::pow(z, a);
        }
    return s;
}

} // namespace detail

inline std::vector<SelfCorrelationRow> kernel_selfcorrelation_check(double a, const std::vector<double>& deltas,
                                                                    const std::vector<double>& t_after = {1.0, 2.5})
{
    if (!(a > -1.0 && a < 1.0))
        throw config_error("kernel_selfcorrelation_check: -1 < a < 1");
    std::vector<SelfCorrelationRow> out;
    for (double delta : deltas) {
        if (delta == 0.0 || !std::isfinite(delta))
            throw config_error("kernel_selfcorrelation_check: tau = sigma diverges");
        for (double te : t_after) {
            if (!(te > 0.0))
                throw config_error("kernel_selfcorrelation_check: t must exceed tau and sigma");
            // sigma = 0, tau = delta, t beyond both
            double t = std::max(0.0, delta) + te;
            double s1 = t - delta, s2 = t;
            cplx I = detail::selfcorrelation_integral(a, s1, s2, 48);
            cplx J = detail::selfcorrelation_integral(a, s1, s2, 64);
            if (std::abs(I - J) > 1e-8 * std::abs(J))
                throw numerical_failure("kernel_selfcorrelation_check: quadrature did not converge");
            SelfCorrelationRow row;
            row.delta = delta;
            row.t = t;
            row.numeric = J;
            row.closed = selfcorrelation_closed_form(a, delta);
            row.rel = std::abs(J - row.closed) / std::abs(row.closed);
            out.push_back(row);
        }
    }
    return out;
}

// ---------------------------------------------------------------- trace continuity

struct TraceConfig {
    double a = 0.0;
    int d = 1;
    double q = 3, r = 3;
    int n = 4;
    uint64_t seed = 1;
    bool rough = false; // random phase per (x, t) node
    GridSpec grid{8.0, 32, 4.0, 128, 1.0, 32}; // first z node near 0.016 (a = 0)
};

struct TraceProfile {
    std::vector<double> z, profile; // the 5 smallest z nodes
    double trace_norm = 0;
    bool decreasing = false;
    double end_ratio = 0; // profile at the smallest node / trace norm
};

inline std::vector<TraceProfile> trace_continuity_profile(const TraceConfig& c)
{
    if (!(c.a > -1.0 && c.a < 1.0))
        throw config_error("trace_continuity_profile: -1 < a < 1");
    auto A = is_admissible(c.a, c.d, c.q, c.r, inf);
    if (!A.admissible || !(c.q > 2.0))
        throw config_error("trace_continuity_profile: needs admissible (q, r, inf) with q > 2");
    if (c.grid.Nz < 5)
        throw config_error("trace_continuity_profile: needs 5 z nodes");
    auto xg = c.grid.x(c.d);
    auto zg = c.grid.z(c.a);
    auto tg = c.grid.t();
    BoundaryOperator B(c.a, c.d, xg, zg, tg);
    std::mt19937_64 g(c.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TraceProfile> out;
    for (int k = 0; k < c.n; ++k) {
        auto b = detail::Bump::draw(g);
        BoundaryTrace Phi(xg, tg);
        for (size_t j = 0; j < tg.count(); ++j)
            for (size_t ix = 0; ix < Phi.nx(); ++ix) {
                cplx v = b.edge(xg.node(xg.index(ix, 0))) * detail::x_rest(xg, ix) * b.time(tg.node((int)j));
                if (c.rough)
                    v *= std::polar(1.0, 2 * specfun::pi * u(g));
                Phi(ix, j) = v;
            }
        auto U = B.apply(Phi);
        auto tr = boundary_trace(U, c.q, c.r);
        TraceProfile p;
        MixedNormSpec s;
        s.q = c.q;
        s.r = c.r;
        p.trace_norm = trace_norm(tr.trace, s);
        p.z.assign(tr.z.begin(), tr.z.begin() + 5);
        p.profile.assign(tr.profile.begin(), tr.profile.begin() + 5);
        p.decreasing = true;
        // decreasing toward z = 0
        for (size_t i = 1; i < 5; ++i)
            p.decreasing = p.decreasing && p.profile[i - 1] < p.profile[i];
        p.end_ratio = p.trace_norm > 0 ? p.profile[0] / p.trace_norm : 0.0;
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------- restriction

struct RestrictionConfig {
    double a = 0.0;
    int d = 1;
    double q = 0, r = 0; // 0: diagonal q = r = 2(d+a+3)/(d+a+1)
    int n = 8;
    uint64_t seed = 1;
    GridSpec grid{8.0, 32, 8.0, 32, 2.0, 32};
};

struct RestrictionSample {
    double physical = 0; // ||T F||_{L^2_a}
    double spectral = 0; // L^2 norm of the restriction to the paraboloid
    double data = 0;     // ||F||_{L^q'_t L^r'_a}
    double plancherel() const { return physical > 0 ? std::fabs(physical - spectral) / physical : 0.0; }
    double ratio() const { return data > 0 ? physical / data : 0.0; }
};

struct RestrictionResult {
    double q = 0, r = 0, qp = 0;
    std::vector<RestrictionSample> samples;
    double max_ratio = 0, max_plancherel = 0;
};

inline RestrictionSample restriction_sample(const SpaceTimeField& F, double qp, double rp)
{
    RestrictionSample s;
    s.physical = l2a_norm(adjoint_T(F));
    // F~(xi, kappa, tau) = sum_j w_j e^{-2 pi i tau t_j} F^(xi, kappa, t_j) at tau = -Lambda / (2 pi)
    SpectralContext ctx(F.xg, F.zg);
    auto sl = detail::spectral_slices(ctx, F);
    const size_t nx = F.nx(), nz = F.nz();
    const auto& H = ctx.hankel();
    double acc = 0.0;
    for (size_t m = 0; m < nz; ++m)
        for (size_t ix = 0; ix < nx; ++ix) {
            double tau = -(ctx.xsym()[ix] + ctx.zsym()[m]) / (2 * specfun::pi);
            cplx v = 0.0;
            for (size_t j = 0; j < F.nt(); ++j) {
                double t = F.tg.node((int)j);
                v += F.tg.weight((int)j) * std::polar(1.0, -2 * specfun::pi * tau * t) * sl[ix + nx * (m + nz * j)];
            }
            acc += H.freq_weight(m) * std::norm(v);
        }
    // raw DFT: sum |f|^2 cell = cell / N sum |f^|^2
    s.spectral = std::sqrt(acc * F.xg.cell() / (double)nx);
    s.data = detail::joint_norm(F, qp, rp);
    return s;
}

inline RestrictionResult restriction_check(const RestrictionConfig& c)
{
    if (!(c.a >= 0.0))
        throw config_error("restriction_check: a >= 0");
    RestrictionResult out;
    const double D = c.d + c.a + 1;
    out.q = c.q > 0 ? c.q : 2 * (D + 2) / D;
    out.r = c.r > 0 ? c.r : out.q;
    if (!(out.q > 2.0 && out.r > 2.0) || std::fabs(2 / out.q - D * (0.5 - 1 / out.r)) > 1e-12)
        throw config_error("restriction_check: inadmissible exponents");
    out.qp = conjugate_exponent(out.q);
    const double rp = conjugate_exponent(out.r);
    auto xg = c.grid.x(c.d);
    auto zg = c.grid.z(c.a);
    auto tg = c.grid.t();
    std::mt19937_64 g(c.seed);
    std::vector<detail::Bump> bumps(c.n);
    for (auto& b : bumps)
        b = detail::Bump::draw(g);
    out.samples.resize(c.n);
    parallel_for((size_t)c.n, [&](size_t i) {
        SpaceTimeField F(xg, zg, tg);
        for (size_t j = 0; j < tg.count(); ++j) {
            double t = tg.node((int)j), env = std::pow(std::sin(specfun::pi * t / tg.T), 2);
            for (size_t iz = 0; iz < zg.size(); ++iz)
                for (size_t ix = 0; ix < F.nx(); ++ix)
                    F(ix, iz, j) = env * bumps[i].space(xg.node(xg.index(ix, 0)), zg.z[iz]) * detail::x_rest(xg, ix) *
                                   bumps[i].time(t);
        }
        out.samples[i] = restriction_sample(F, out.qp, rp);
    });
    for (const auto& s : out.samples) {
        out.max_ratio = std::max(out.max_ratio, s.ratio());
        out.max_plancherel = std::max(out.max_plancherel, s.plancherel());
    }
    return out;
}

// ---------------------------------------------------------------- duality

struct DualityRow {
    double theta_rel = 0; // |<Theta* Phi, V> - <Phi, Theta V>| / |<Theta* Phi, V>|
    double tstar_rel = 0; // |<T* u0, F> - <u0, T F>| / |<T* u0, F>|
};

inline std::vector<DualityRow> duality_check(double a, int d = 1, int n = 8, uint64_t seed = 1,
                                             GridSpec grid = {8.0, 32, 8.0, 32, 1.0, 24})
{
    if (n < 1)
        throw config_error("duality_check: empty ensemble");
    auto xg = grid.x(d);
    auto zg = grid.z(a);
    auto tg = grid.t();
    BoundaryOperator B(a, d, xg, zg, tg);
    std::mt19937_64 g(seed);
    std::vector<DualityRow> out(n);
    for (int k = 0; k < n; ++k) {
        auto bp = detail::Bump::draw(g), bv = detail::Bump::draw(g), bu = detail::Bump::draw(g);
        BoundaryTrace Phi(xg, tg);
        SpaceTimeField V(xg, zg, tg);
        HalfSpaceField u0(xg, zg);
        // sin^2 envelopes keep the time integrands smooth at both ends
        for (size_t j = 0; j < tg.count(); ++j) {
            double t = tg.node((int)j), env = std::pow(std::sin(specfun::pi * t / tg.T), 2);
            for (size_t ix = 0; ix < Phi.nx(); ++ix) {
                double x = xg.node(xg.index(ix, 0)), xr = detail::x_rest(xg, ix);
                Phi(ix, j) = env * bp.edge(x) * xr * bp.time(t);
                for (size_t iz = 0; iz < zg.size(); ++iz)
                    V(ix, iz, j) = env * bv.space(x, zg.z[iz]) * xr * bv.time(t);
            }
        }
        for (size_t iz = 0; iz < zg.size(); ++iz)
            for (size_t ix = 0; ix < u0.nx(); ++ix)
                u0(ix, iz) = bu.space(xg.node(xg.index(ix, 0)), zg.z[iz]) * detail::x_rest(xg, ix);
        cplx l = detail::pair_st(B.apply(Phi), V), r = detail::pair_b(Phi, op_Theta(a, d, V));
        out[k].theta_rel = std::abs(l - r) / std::abs(l);
        cplx l2 = detail::pair_st(op_Tstar(a, d, u0, tg), V), r2 = l2a_inner(u0, adjoint_T(a, d, V));
        out[k].tstar_rel = std::abs(l2 - r2) / std::abs(l2);
    }
    return out;
}

} // namespace bsns
