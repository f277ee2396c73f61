#pragma once

#include <bsns/errors.hpp>
#include <bsns/grid.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bsns {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Regime { nonneg_a, anomalous_a };

inline Regime regime_of(double a) { return a >= 0.0 ? Regime::nonneg_a : Regime::anomalous_a; }

// 1/p with 1/inf = 0
inline double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }
inline double conjugate_exponent(double p)
{
    if (p == 1.0)
        return inf;
    if (std::isinf(p))
        return 1.0;
    return p / (p - 1.0);
}

struct Admissibility {
    bool admissible = false;
    double residual = 0.0;
    bool endpoint = false; // q = 2, relation may hold but the estimate is excluded
};

inline Admissibility is_admissible(double a, int d, double q, double r, double m, Regime reg)
{
    if (!(a > -1.0) || d < 1)
        throw std::domain_error("is_admissible: a > -1 and d >= 1");
    double lhs, rhs;
    if (reg == Regime::nonneg_a) {
        lhs = 2 * inv(q) + d * inv(r) + (a + 1) * inv(m);
        rhs = 0.5 * (d + a + 1);
    } else {
        lhs = 2 * inv(q) + d * inv(r) + inv(m);
        rhs = 0.5 * (d + 1);
    }
    Admissibility out;
    out.residual = lhs - rhs;
    out.admissible = std::fabs(out.residual) < 1e-12 && r >= 2.0 && m >= 2.0;
    out.endpoint = q == 2.0;
    return out;
}

inline Admissibility is_admissible(double a, int d, double q, double r, double m)
{
    return is_admissible(a, d, q, r, m, regime_of(a));
}

// q with (q, r, inf) admissible
inline double solve_q(double a, int d, double r, Regime reg)
{
    if (!(r >= 2.0))
        throw std::domain_error("solve_q: r >= 2");
    double lead = reg == Regime::nonneg_a ? 0.5 * (d + a + 1) : 0.5 * (d + 1);
    double ed = reg == Regime::nonneg_a ? d + a - 1 : d - 1;
    if (ed > 0 && !(r < 2.0 * d / ed))
        throw std::domain_error("solve_q: r outside the admissible window");
    double two_over_q = lead - d * inv(r);
    if (!(two_over_q > 0.0) || !(2.0 / two_over_q > 2.0))
        throw std::domain_error("solve_q: q <= 2 endpoint");
    return 2.0 / two_over_q;
}

inline double solve_q(double a, int d, double r) { return solve_q(a, d, r, regime_of(a)); }

inline double critical_p(double a, int d)
{
    if (!(a > -1.0) || a >= 1.0)
        throw std::domain_error("critical_p: -1 < a < 1");
    if (a >= 0.0)
        return 1.0 + 2.0 * (1.0 - a) / (d + a + 1.0);
    return 1.0 + 2.0 / (d + 1.0);
}

struct DiagonalTriple {
    double q, r, qp, rp;
};

inline DiagonalTriple diagonal_triple(double a, int d)
{
    if (!(a > -1.0))
        throw std::domain_error("diagonal_triple: a > -1");
    double q = a >= 0.0 ? 2.0 * (d + 2) / (d + a + 1) : 2.0 * (d + 2) / (d + 1.0);
    double qp = conjugate_exponent(q);
    return {q, q, qp, qp};
}

struct DualTriple {
    double q, r; // (p q', p r')
    Admissibility check;
};

inline DualTriple dual_triple(double a, int d, double p, double q, double r)
{
    if (!is_admissible(a, d, q, r, inf).admissible)
        throw std::domain_error("dual_triple: (q, r, inf) not admissible");
    if (std::fabs(p - critical_p(a, d)) > 1e-12)
        throw std::domain_error("dual_triple: p must be critical");
    DualTriple out;
    out.q = p * conjugate_exponent(q);
    out.r = p * conjugate_exponent(r);
    out.check = is_admissible(a, d, out.q, out.r, inf);
    return out;
}

// k(z) = min(1, z^{a/2}), anomalous regime only
inline double weight_k(double a, double z)
{
    if (!(a > -1.0 && a < 0.0))
        throw std::domain_error("weight_k: -1 < a < 0");
    if (!(z > 0.0))
        throw std::domain_error("weight_k: z > 0");
    return z <= 1.0 ? 1.0 : std::pow(z, 0.5 * a);
}

// weighted discrete L^p
inline double lp_norm(const std::vector<double>& f, const std::vector<double>& w, double p)
{
    if (f.size() != w.size())
        throw grid_mismatch("lp_norm: sizes differ");
    if (std::isinf(p)) {
        double m = 0.0;
        for (size_t i = 0; i < f.size(); ++i)
            if (w[i] > 0.0)
                m = std::max(m, std::fabs(f[i]));
        return m;
    }
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i)
        s += w[i] * std::pow(std::fabs(f[i]), p);
    return std::pow(s, 1.0 / p);
}

inline double intersection_norm(const std::vector<double>& f, const std::vector<double>& w, double q1, double q2)
{
    return lp_norm(f, w, q1) + lp_norm(f, w, q2);
}

// inf over f = f 1{|f|>c} + f 1{|f|<=c} of ||.||_q1 + ||.||_q2; c on a geometric grid.
// Upper bound on the true infimum, within a factor 2 of it.
inline double sum_norm(const std::vector<double>& f, const std::vector<double>& w, double q1, double q2)
{
    if (f.size() != w.size())
        throw grid_mismatch("sum_norm: sizes differ");
    double top = 0.0, low = inf;
    for (double v : f) {
        top = std::max(top, std::fabs(v));
        if (std::fabs(v) > 0.0)
            low = std::min(low, std::fabs(v));
    }
    if (top == 0.0)
        return 0.0;
    auto split = [&](double c) {
        std::vector<double> big(f.size()), small(f.size());
        for (size_t i = 0; i < f.size(); ++i)
            (std::fabs(f[i]) > c ? big[i] : small[i]) = f[i];
        return lp_norm(big, w, q1) + lp_norm(small, w, q2);
    };
    double best = std::min(split(0.0), split(top));
    const int n = 200;
    double r = std::log(top / low);
    for (int k = 0; k <= n; ++k)
        best = std::min(best, split(low * std::exp(r * k / n)));
    return best;
}

enum class TimeNorm { plain, sum, intersection };

// outer L^m over z (weight z^a), middle L^q over t, inner L^r over x
struct MixedNormSpec {
    double m = 2.0, q = 2.0, r = 2.0;
    std::optional<double> t0, t1; // time window
    TimeNorm kind = TimeNorm::plain;
    double q2 = inf; // second exponent of the sum or intersection pair
};

namespace detail {

inline std::vector<double> time_weights(const TimeGrid& tg, const MixedNormSpec& s)
{
    std::vector<double> w(tg.count(), 0.0);
    double lo = s.t0.value_or(0.0), hi = s.t1.value_or(tg.T);
    std::vector<int> in;
    for (int j = 0; j < (int)tg.count(); ++j)
        if (tg.node(j) >= lo - 1e-12 && tg.node(j) <= hi + 1e-12)
            in.push_back(j);
    if (in.size() == 1)
        w[in[0]] = 1.0;
    for (size_t k = 0; k + 1 < in.size(); ++k) {
        double h = tg.node(in[k + 1]) - tg.node(in[k]);
        w[in[k]] += 0.5 * h;
        w[in[k + 1]] += 0.5 * h;
    }
    return w;
}

inline double time_norm(const std::vector<double>& g, const std::vector<double>& w, const MixedNormSpec& s)
{
    switch (s.kind) {
    case TimeNorm::sum:
        return sum_norm(g, w, s.q, s.q2);
    case TimeNorm::intersection:
        return intersection_norm(g, w, s.q, s.q2);
    default:
        return lp_norm(g, w, s.q);
    }
}

// L^r_x of nx contiguous values
inline double x_norm(const cplx* f, size_t nx, double cell, double r)
{
    if (std::isinf(r)) {
        double m = 0.0;
        for (size_t i = 0; i < nx; ++i)
            m = std::max(m, std::abs(f[i]));
        return m;
    }
    double s = 0.0;
    for (size_t i = 0; i < nx; ++i)
        s += std::pow(std::abs(f[i]), r);
    return std::pow(cell * s, 1.0 / r);
}

} // namespace detail

// L^q_t L^r_x of an (x, t) array
inline double trace_norm(const BoundaryTrace& f, const MixedNormSpec& s)
{
    std::vector<double> g(f.nt());
    for (size_t j = 0; j < f.nt(); ++j)
        g[j] = detail::x_norm(f.v.data() + f.nx() * j, f.nx(), f.xg.cell(), s.r);
    return detail::time_norm(g, detail::time_weights(f.tg, s), s);
}

inline double mixed_norm(const SpaceTimeField& F, const MixedNormSpec& s)
{
    const size_t nx = F.nx(), nz = F.nz();
    auto tw = detail::time_weights(F.tg, s);
    std::vector<double> per_z(nz), g(F.nt());
    for (size_t iz = 0; iz < nz; ++iz) {
        for (size_t j = 0; j < F.nt(); ++j)
            g[j] = detail::x_norm(&F.v[nx * (iz + nz * j)], nx, F.xg.cell(), s.r);
        per_z[iz] = detail::time_norm(g, tw, s);
    }
    if (std::isinf(s.m)) {
        double m = *std::max_element(per_z.begin(), per_z.end());
        if (F.has_trace()) {
            for (size_t j = 0; j < F.nt(); ++j)
                g[j] = detail::x_norm(&F.trace[nx * j], nx, F.xg.cell(), s.r);
            m = std::max(m, detail::time_norm(g, tw, s));
        }
        return m;
    }
    double acc = 0.0;
    for (size_t iz = 0; iz < nz; ++iz)
        acc += F.zg.w[iz] * std::pow(per_z[iz], s.m);
    return std::pow(acc, 1.0 / s.m);
}

} // namespace bsns
