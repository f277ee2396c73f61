#pragma once

#include <bsns/duhamel.hpp>
#include <bsns/norms.hpp>

#include <memory>
#include <optional>

namespace bsns {

// boundary problem with lim z^a dU/dz = -mu |U|^{p-1} U at z = 0
struct NonlinearProblem {
    double a = 0.0;
    int d = 1;
    cplx mu = 0.0;
    double p = 2.0;
    HalfSpaceField u0;
    SpaceTimeField F; // carries the grids and [0, T]
    // X-norm exponents, r = p + 1; q_inf only in the anomalous regime
    double q = 3.0, r = 3.0, q_inf = inf;
    double ceiling = 1e6; // X-norm divergence threshold

    double T() const { return F.tg.T; }
    bool anomalous() const { return a < 0.0; }
};

// r = p + 1 and q from the admissibility relation(s); F = 0 on the given grids
inline NonlinearProblem make_problem(double a, int d, cplx mu, double p, const HalfSpaceField& u0,
                                     const TimeGrid& tg)
{
    NonlinearProblem P;
    P.a = a;
    P.d = d;
    P.mu = mu;
    P.p = p;
    P.u0 = u0;
    P.F = SpaceTimeField(u0.xg, u0.zg, tg);
    P.r = p + 1.0;
    if (!(a > -1.0 && a < 1.0))
        throw config_error("nonlinear problem: -1 < a < 1");
    if (!(p > 1.0) || p > critical_p(a, d) + 1e-12)
        throw config_error("nonlinear problem: need 1 < p <= p_c");
    try {
        P.q = solve_q(a, d, P.r);
        if (a < 0.0)
            P.q_inf = solve_q(a, d, P.r, Regime::nonneg_a);
    } catch (const std::domain_error& e) {
        throw config_error(std::string("nonlinear problem: ") + e.what());
    }
    return P;
}

inline void validate(const NonlinearProblem& P)
{
    if (!(P.a > -1.0 && P.a < 1.0))
        throw config_error("nonlinear problem: -1 < a < 1");
    if (!(P.p > 1.0))
        throw config_error("nonlinear problem: p > 1");
    if (!(P.q > 2.0))
        throw config_error("nonlinear problem: q > 2");
    check_field(P.a, P.d, P.u0.xg, P.u0.zg);
    check_same(P.u0.xg, P.F.xg);
    check_same(P.u0.zg, P.F.zg);
}

namespace detail {

inline double k_weight(double a, double z) { return a < 0.0 ? weight_k(a, z) : 1.0; }

// sup_t ||U||_{L^2_a} + sup_z ||U k||_{L^q_t L^r_x}, z = 0 layer included
inline double x_space_norm(const SpaceTimeField& U, double q, double r)
{
    const size_t nx = U.nx(), nz = U.nz();
    double mass = 0.0;
    for (size_t j = 0; j < U.nt(); ++j) {
        double s = 0.0;
        for (size_t iz = 0; iz < nz; ++iz) {
            double ws = U.zg.w[iz] * U.xg.cell();
            for (size_t ix = 0; ix < nx; ++ix)
                s += ws * std::norm(U(ix, iz, j));
        }
        mass = std::max(mass, std::sqrt(s));
    }
    MixedNormSpec spec;
    spec.q = q;
    spec.r = r;
    auto tw = time_weights(U.tg, spec);
    std::vector<double> g(U.nt());
    double bulk = 0.0;
    for (size_t iz = 0; iz < nz; ++iz) {
        double k = k_weight(U.a, U.zg.z[iz]);
        for (size_t j = 0; j < U.nt(); ++j)
            g[j] = k * x_norm(&U.v[nx * (iz + nz * j)], nx, U.xg.cell(), r);
        bulk = std::max(bulk, lp_norm(g, tw, q));
    }
    if (U.has_trace()) {
        for (size_t j = 0; j < U.nt(); ++j)
            g[j] = x_norm(&U.trace[nx * j], nx, U.xg.cell(), r);
        bulk = std::max(bulk, lp_norm(g, tw, q));
    }
    return mass + bulk;
}

inline SpaceTimeField difference(const SpaceTimeField& A, const SpaceTimeField& B)
{
    SpaceTimeField D = A;
    for (size_t p = 0; p < D.v.size(); ++p)
        D.v[p] -= B.v[p];
    if (!B.has_trace())
        D.trace.clear();
    for (size_t p = 0; p < D.trace.size(); ++p)
        D.trace[p] -= B.trace[p];
    return D;
}

} // namespace detail

struct SolveDiagnostics {
    int iterations = 0;
    bool converged = false;
    std::vector<double> differences; // ||U_{n+1} - U_n||_X
    std::vector<double> contraction; // successive ratios of the differences
    std::vector<double> mass;        // ||U(t)||^2_{L^2_a}
    std::vector<double> boundary;    // int |U(x,0,t)|^{p+1} dx
    double residual = 0.0;           // ||Lambda(U) - U||_X of the returned U
};

struct picard_failure : non_convergence {
    SolveDiagnostics diag;
    picard_failure(const std::string& m, SolveDiagnostics d) : non_convergence(m), diag(std::move(d)) {}
};

inline std::vector<double> mass_profile(const SpaceTimeField& U)
{
    std::vector<double> m(U.nt(), 0.0);
    for (size_t j = 0; j < U.nt(); ++j)
        for (size_t iz = 0; iz < U.nz(); ++iz) {
            double ws = U.zg.w[iz] * U.xg.cell();
            for (size_t ix = 0; ix < U.nx(); ++ix)
                m[j] += ws * std::norm(U(ix, iz, j));
        }
    return m;
}

// int |U(x, 0, t)|^e dx per time node
inline std::vector<double> boundary_integral(const SpaceTimeField& U, double e)
{
    BoundaryTrace tr = boundary_trace(U).trace;
    std::vector<double> b(U.nt(), 0.0);
    for (size_t j = 0; j < U.nt(); ++j)
        for (size_t ix = 0; ix < U.nx(); ++ix)
            b[j] += U.xg.cell() * std::pow(std::abs(tr(ix, j)), e);
    return b;
}

// U -> T*_a u0 + D_a F + Theta*_a(-mu |U|^{p-1} U(., 0, .))
class MildMap {
public:
    explicit MildMap(const NonlinearProblem& P) : mu_(P.mu), p_(P.p), q_(P.q), r_(P.r)
    {
        validate(P);
        BoundaryTrace zero(P.F.xg, P.F.tg);
        linear_ = solve_linear(P.a, P.d, P.u0, P.F, zero);
        if (P.mu != cplx(0.0))
            B_ = std::make_shared<const BoundaryOperator>(P.a, P.d, P.F.xg, P.F.zg, P.F.tg);
    }

    // data scaled by lam: the linear part scales exactly, the cell tables are shared
    MildMap scaled(double lam) const
    {
        MildMap m = *this;
        for (auto& v : m.linear_.v)
            v *= lam;
        for (auto& v : m.linear_.trace)
            v *= lam;
        return m;
    }

    const SpaceTimeField& linear_part() const { return linear_; }

    SpaceTimeField operator()(const SpaceTimeField& U) const
    {
        if (!B_)
            return linear_;
        BoundaryTrace Phi = boundary_trace(U).trace;
        for (auto& v : Phi.v)
            v = -mu_ * std::pow(std::abs(v), p_ - 1.0) * v;
        SpaceTimeField out = B_->apply(Phi);
        for (size_t p = 0; p < out.v.size(); ++p)
            out.v[p] += linear_.v[p];
        for (size_t p = 0; p < out.trace.size(); ++p)
            out.trace[p] += linear_.trace[p];
        return out;
    }

    double norm(const SpaceTimeField& U) const { return detail::x_space_norm(U, q_, r_); }

private:
    cplx mu_;
    double p_, q_, r_;
    SpaceTimeField linear_;
    std::shared_ptr<const BoundaryOperator> B_;
};

struct PicardResult {
    SpaceTimeField U;
    SolveDiagnostics diag;
};

// fixed-point iteration; never throws on non-convergence (diag.converged says)
inline PicardResult picard_iterate(const MildMap& L, const NonlinearProblem& P, double tol, int max_iter,
                                   const std::optional<SpaceTimeField>& init = std::nullopt)
{
    if (!(tol > 0.0) || max_iter < 1)
        throw config_error("picard: tol > 0 and max_iter >= 1");
    PicardResult R{init ? *init : L.linear_part(), {}};
    auto& D = R.diag;
    for (int n = 1; n <= max_iter; ++n) {
        SpaceTimeField V = L(R.U);
        double nv = L.norm(V);
        if (!std::isfinite(nv) || nv > P.ceiling)
            throw numerical_failure("picard: X-norm exceeded the divergence ceiling");
        double diff = L.norm(detail::difference(V, R.U));
        D.iterations = n;
        if (!D.differences.empty() && D.differences.back() > 0.0 && diff > 0.0)
            D.contraction.push_back(diff / D.differences.back());
        D.differences.push_back(diff);
        if (diff <= tol) {
            D.converged = true;
            D.residual = diff;
            break;
        }
        R.U = std::move(V);
        D.residual = diff;
    }
    D.mass = mass_profile(R.U);
    D.boundary = boundary_integral(R.U, P.p + 1.0);
    return R;
}

inline PicardResult picard_solve(const NonlinearProblem& P, double tol, int max_iter,
                                 const std::optional<SpaceTimeField>& init = std::nullopt)
{
    MildMap L(P);
    auto R = picard_iterate(L, P, tol, max_iter, init);
    if (!R.diag.converged)
        throw picard_failure("picard: no convergence within max_iter", R.diag);
    return R;
}

struct SmallnessReport {
    bool anomalous = false;
    double u0_norm = 0.0;       // ||u0||_{L^2_a}
    double F_L1_L2 = 0.0;       // ||F||_{L^1_t L^2_a}
    double F_mixed = 0.0;       // ||F||_{L^1_{a,z} L^{q'}_t L^{r'}_x}, with k^{-1} when a < 0
    double F_mixed_cap = 0.0;   // a < 0: q' and q'_inf intersection norm of F k^{-1}
    double gamma = 0.0;         // 1/q - 1/q_inf, a < 0
    double weight = 1.0;        // max{1, T^gamma}
    double combined = 0.0;      // the quantity compared with eps_0
};

inline SmallnessReport smallness_report(const NonlinearProblem& P)
{
    validate(P);
    SmallnessReport S;
    S.anomalous = P.anomalous();
    S.u0_norm = l2a_norm(P.u0);
    const auto& F = P.F;
    auto m = mass_profile(F);
    for (size_t j = 0; j < F.nt(); ++j)
        S.F_L1_L2 += F.tg.weight((int)j) * std::sqrt(m[j]);
    SpaceTimeField G = F;
    if (S.anomalous)
        for (size_t j = 0; j < G.nt(); ++j)
            for (size_t iz = 0; iz < G.nz(); ++iz)
                for (size_t ix = 0; ix < G.nx(); ++ix)
                    G(ix, iz, j) /= weight_k(P.a, G.zg.z[iz]);
    MixedNormSpec s;
    s.m = 1.0;
    s.q = conjugate_exponent(P.q);
    s.r = conjugate_exponent(P.r);
    S.F_mixed = mixed_norm(G, s);
    if (!S.anomalous) {
        S.combined = S.u0_norm + S.F_L1_L2 + S.F_mixed;
        return S;
    }
    s.kind = TimeNorm::intersection;
    s.q2 = conjugate_exponent(P.q_inf);
    S.F_mixed_cap = mixed_norm(G, s);
    S.gamma = 1.0 / P.q - inv(P.q_inf);
    double Tg = std::pow(P.T(), S.gamma);
    S.weight = std::max(1.0, Tg);
    S.combined = S.weight * (S.u0_norm + (1.0 + Tg) * S.F_mixed);
    return S;
}

struct MassResidual {
    std::vector<double> t, mass, dmdt, rhs, residual;
};

// d/dt ||U||^2 (second-order differences) against -2 Im(mu) int |U(x,0,t)|^{p+1} dx
inline MassResidual mass_derivative_residual(const SpaceTimeField& U, cplx mu, double p)
{
    MassResidual M;
    M.mass = mass_profile(U);
    auto b = boundary_integral(U, p + 1.0);
    const size_t n = U.nt();
    const double h = U.tg.dt();
    for (size_t j = 0; j < n; ++j) {
        M.t.push_back(U.tg.node((int)j));
        double d;
        if (n < 3)
            d = n == 2 ? (M.mass[1] - M.mass[0]) / h : 0.0;
        else if (j == 0)
            d = (-3 * M.mass[0] + 4 * M.mass[1] - M.mass[2]) / (2 * h);
        else if (j == n - 1)
            d = (3 * M.mass[j] - 4 * M.mass[j - 1] + M.mass[j - 2]) / (2 * h);
        else
            d = (M.mass[j + 1] - M.mass[j - 1]) / (2 * h);
        M.dmdt.push_back(d);
        M.rhs.push_back(-2.0 * mu.imag() * b[j]);
        M.residual.push_back(d - M.rhs.back());
    }
    return M;
}

// delta = 1/q' - p/q, the power of T gained in the subcritical estimates
inline double subcritical_delta(const NonlinearProblem& P) { return 1.0 - 1.0 / P.q - P.p / P.q; }

namespace detail {

// same problem on [0, T0] with the same number of steps; F resampled linearly in t
inline NonlinearProblem restrict_window(const NonlinearProblem& P, double T0)
{
    NonlinearProblem Q = P;
    TimeGrid tg = make_time(T0, P.F.tg.Nt);
    Q.F = SpaceTimeField(P.F.xg, P.F.zg, tg);
    const double h = P.F.tg.dt();
    for (size_t j = 0; j < Q.F.nt(); ++j) {
        double t = tg.node((int)j);
        size_t i = std::min((size_t)(t / h), P.F.nt() - 2);
        double th = std::clamp(t / h - (double)i, 0.0, 1.0);
        for (size_t p = 0; p < Q.F.slice(); ++p)
            Q.F.slice_ptr(j)[p] = (1 - th) * P.F.slice_ptr(i)[p] + th * P.F.slice_ptr(i + 1)[p];
    }
    return Q;
}

// largest contraction ratio in a short run; inf on divergence
inline double probe_contraction(const MildMap& L, const NonlinearProblem& P, int iters)
{
    try {
        auto R = picard_iterate(L, P, 1e-14, iters);
        double c = 0.0;
        for (double v : R.diag.contraction)
            c = std::max(c, v);
        return c;
    } catch (const numerical_failure&) {
        return inf;
    }
}

inline double probe_contraction(const NonlinearProblem& P, int iters) { return probe_contraction(MildMap(P), P, iters); }

} // namespace detail

// bisected T0 <= T with contraction ratio <= 1/2
inline double subcritical_window(const NonlinearProblem& P, int probe_iters = 5, int steps = 12)
{
    validate(P);
    if (!(P.p < critical_p(P.a, P.d)))
        throw config_error("subcritical_window: p < p_c");
    if (P.mu == cplx(0.0))
        return P.T();
    if (detail::probe_contraction(P, probe_iters) <= 0.5)
        return P.T();
    double lo = 0.0, hi = P.T();
    for (int k = 0; k < steps; ++k) {
        double mid = 0.5 * (lo + hi);
        if (detail::probe_contraction(detail::restrict_window(P, mid), probe_iters) <= 0.5)
            lo = mid;
        else
            hi = mid;
    }
    if (lo == 0.0)
        throw numerical_failure("subcritical_window: no contracting window found");
    return lo;
}

// amplitude factor lambda (u0, F scaled by lambda) up to which the contraction ratio stays <= target
inline double amplitude_threshold(const NonlinearProblem& P, double target = 0.5, double hi = 64.0,
                                  int probe_iters = 5, int steps = 14)
{
    if (P.mu == cplx(0.0))
        return inf;
    MildMap L(P);
    auto ok = [&](double lam) { return detail::probe_contraction(L.scaled(lam), P, probe_iters) <= target; };
    if (ok(hi))
        return hi;
    double lo = 0.0;
    for (int k = 0; k < steps; ++k) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

// u0 and F multiplied by lam
inline NonlinearProblem scale_data(const NonlinearProblem& P, double lam)
{
    NonlinearProblem Q = P;
    for (auto& v : Q.u0.v)
        v *= lam;
    for (auto& v : Q.u0.trace)
        v *= lam;
    for (auto& v : Q.F.v)
        v *= lam;
    return Q;
}

} // namespace bsns
