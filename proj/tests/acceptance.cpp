// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <bsns/cli.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>

using namespace bsns;
using specfun::pi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& f)
{
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
    if (!o.pass)
        ++failures;
}

std::string fmt(const char* f, auto... v)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

// S_a(t) e^{-z^2/4} in closed form
cplx gauss_z(double a, double z, double t)
{
    cplx g(1.0, t);
    return std::pow(g, -0.5 * (a + 1.0)) * std::exp(-z * z / (4.0 * g));
}

double l2a(const WeightedRadialGrid& g, const std::vector<cplx>& v)
{
    double s = 0;
    for (size_t k = 0; k < g.size(); ++k)
        s += g.w[k] * std::norm(v[k]);
    return std::sqrt(s);
}

WeightedRadialGrid wide(double a) { return build_radial_grid(a, 30.0, 96, RadialScheme::bessel_collocation); }

NonlinearProblem small_problem(double a, cplx mu, double amp)
{
    auto xg = make_cartesian(1, 12.0, 32);
    auto zg = build_radial_grid(a, 12.0, 40, RadialScheme::bessel_collocation);
    HalfSpaceField u(xg, zg);
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            double x = xg.node((int)ix), z = zg.z[iz];
            u(ix, iz) = amp * std::exp(-(x * x + z * z) / 2) * std::polar(1.0, 0.3 * x);
        }
    return make_problem(a, 1, mu, critical_p(a, 1), u, make_time(1.0, 24));
}

NonlinearProblem mass_problem(cplx mu)
{
    auto xg = make_cartesian(1, 32.0, 128);
    auto zg = build_radial_grid(0.0, 32.0, 256, RadialScheme::bessel_collocation);
    HalfSpaceField u(xg, zg);
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            double x = xg.node((int)ix), z = zg.z[iz];
            u(ix, iz) = 0.5 * std::exp(-(x * x + z * z) / 2);
        }
    return make_problem(0.0, 1, mu, 2.0, u, make_time(2.0, 64));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

int main()
{
    criterion(1, "mass conservation of the free flow", [] {
        double worst = 0;
        auto xg = make_cartesian(1, 16.0, 64);
        for (double a : {-0.5, 0.0, 0.5, 1.0}) {
            auto zg = wide(a);
            HalfSpaceField u(xg, zg);
            for (size_t iz = 0; iz < u.nz(); ++iz)
                for (size_t ix = 0; ix < u.nx(); ++ix) {
                    double x = xg.node((int)ix), z = zg.z[iz];
                    u(ix, iz) = std::exp(-x * x / 2 - z * z / 4) * std::polar(1.0, 0.5 * x);
                }
            double n0 = l2a_norm(u);
            for (double t : {0.1, 1.0, 10.0})
                worst = std::max(worst, std::fabs(l2a_norm(propagate(a, 1, t, u)) / n0 - 1));
        }
        return Outcome{worst <= 1e-6, fmt("max |ratio - 1| = %.2e (tol 1e-6)", worst)};
    });

    criterion(2, "spectral vs kernel propagator", [] {
        double worst = 0;
        for (double a : {-0.5, 0.0, 1.0}) {
            auto g = wide(a);
            std::vector<cplx> v(g.size());
            for (size_t k = 0; k < g.size(); ++k)
                v[k] = gauss_z(a, g.z[k], 0.0);
            for (double t : {0.5, 1.0, 2.0}) {
                auto u = propagate_z(a, g, t, v);
                auto q = propagate_z_kernel(a, t, [&](double z) { return gauss_z(a, z, 0.0); }, g.z);
                std::vector<cplx> d(g.size());
                for (size_t k = 0; k < g.size(); ++k)
                    d[k] = u[k] - q[k];
                worst = std::max(worst, l2a(g, d) / l2a(g, q));
            }
        }
        return Outcome{worst <= 1e-4, fmt("max relative L2_a difference = %.2e (tol 1e-4)", worst)};
    });

    criterion(3, "a = 0 kernel against the cosine form", [] {
        std::mt19937_64 g(2024);
        std::uniform_real_distribution<double> uz(0.0, 6.0), ut(0.05, 4.0), us(0.0, 1.0);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            double z = uz(g), zeta = uz(g), t = ut(g) * (us(g) < 0.5 ? -1 : 1);
            // (4 pi i t)^{-1/2} (e^{i(z-zeta)^2/4t} + e^{i(z+zeta)^2/4t})
            cplx ref = std::exp(cplx(0.0, -std::copysign(pi / 4, t))) / std::sqrt(pi * std::fabs(t)) *
                       std::exp(cplx(0.0, (z * z + zeta * zeta) / (4 * t))) * std::cos(z * zeta / (2 * t));
            worst = std::max(worst, std::abs(kernel_sa(0.0, z, zeta, t) - ref) / std::max(1.0, std::abs(ref)));
        }
        return Outcome{worst <= 1e-12, fmt("max pointwise error = %.2e over 100 points (tol 1e-12)", worst)};
    });

    criterion(4, "dispersive rates", [] {
        auto fam = dispersive_family(6, 7);
        std::string d;
        bool ok = true;
        for (double a : {0.0, 0.5}) {
            auto R = dispersive_fit(a, fam);
            ok = ok && R.worst_rel <= 0.05;
            d += fmt("a=%g worst rel slope err %.4f; ", a, R.worst_rel);
        }
        DispersiveConfig c;
        c.t0 = 0.1;
        c.nt = 21;
        auto N = dispersive_fit(-0.5, fam, c);
        bool bounded = N.spread < 10.0 && N.tail_slope < 0.25;
        d += fmt("a=-0.5 envelope max/min %.3f (< 10), tail slope %.3f (< 0.25)", N.spread, N.tail_slope);
        return Outcome{ok && bounded, d};
    });

    criterion(5, "kernel self-correlation identity", [] {
        double worst = 0;
        for (double a : {-0.5, 0.0, 0.5})
            for (const auto& r : kernel_selfcorrelation_check(a, {0.25, 1.0, 4.0, -0.25, -1.0, -4.0}))
                worst = std::max(worst, r.rel);
        return Outcome{worst <= 1e-3, fmt("max relative residual = %.2e (tol 1e-3)", worst)};
    });

    criterion(6, "Hankel fixed point, self-inverse, Plancherel", [] {
        double fp = 0, si = 0, pl = 0;
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> us(0.6, 1.6), uc(-1.0, 1.0);
        for (double a : {-0.5, 0.0, 0.5, 1.0}) {
            auto g = build_radial_grid(a, self_dual_zmax(a, 64), 64, RadialScheme::bessel_collocation);
            std::vector<cplx> f(g.size());
            for (size_t k = 0; k < g.size(); ++k)
                f[k] = std::exp(-g.z[k] * g.z[k] / 2);
            auto F = hankel_forward(a, g, f);
            auto kap = hankel_frequencies(g);
            for (size_t m = 0; m < g.size(); ++m)
                fp = std::max(fp, std::abs(F[m] - std::exp(-kap[m] * kap[m] / 2)));
            auto H = hankel_for(g);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<cplx> h(g.size(), 0.0);
                for (int term = 0; term < 3; ++term) {
                    double s = us(rng);
                    cplx c(uc(rng), uc(rng));
                    for (size_t k = 0; k < g.size(); ++k)
                        h[k] += c * std::exp(-g.z[k] * g.z[k] / (2 * s * s));
                }
                auto hh = hankel_forward(a, g, hankel_forward(a, g, h));
                std::vector<cplx> d(g.size());
                for (size_t k = 0; k < g.size(); ++k)
                    d[k] = hh[k] - h[k];
                si = std::max(si, l2a(g, d) / l2a(g, h));
                auto Hh = hankel_forward(a, g, h);
                double sf = 0, sF = 0;
                for (size_t k = 0; k < g.size(); ++k) {
                    sf += g.w[k] * std::norm(h[k]);
                    sF += H->freq_weight(k) * std::norm(Hh[k]);
                }
                pl = std::max(pl, std::fabs(sF / sf - 1));
            }
        }
        bool ok = fp <= 1e-6 && si <= 1e-6 && pl <= 1e-6;
        return Outcome{ok, fmt("fixed point %.2e, self-inverse %.2e, Plancherel %.2e (tol 1e-6 each)", fp, si, pl)};
    });

    criterion(7, "duality pairings", [] {
        double th = 0, ts = 0;
        for (double a : {-0.5, 0.0, 0.5})
            for (const auto& r : duality_check(a, 1, 8, 21)) {
                th = std::max(th, r.theta_rel);
                ts = std::max(ts, r.tstar_rel);
            }
        return Outcome{th <= 1e-4 && ts <= 1e-4,
                       fmt("Theta pair %.2e, T pair %.2e over 3 x 8 members (tol 1e-4)", th, ts)};
    });

    criterion(8, "Strichartz ratio stability 16 -> 32", [] {
        std::string d;
        bool ok = true;
        for (double a : {0.0, -0.5}) {
            StrichartzConfig c;
            c.a = a;
            c.q = 3;
            c.r = 3;
            auto S = strichartz_stability(c);
            bool fin = std::isfinite(S.large.max1) && std::isfinite(S.large.max2);
            ok = ok && fin && S.drift1 <= 0.2 && S.drift2 <= 0.2;
            d += fmt("a=%g%s max %.4f/%.4f drift %.3f/%.3f; ", a,
                     a < 0 ? fmt(" (q_inf %.2f)", S.large.q_inf).c_str() : "", S.large.max1, S.large.max2, S.drift1,
                     S.drift2);
        }
        return Outcome{ok, d + "(tol 0.2)"};
    });

    criterion(9, "scaling invariance", [] {
        ScalingConfig c;
        auto A = scaling_invariance(c);
        ScalingConfig c2;
        c2.a = 0.5;
        c2.q = 4;
        c2.r = 4;
        c2.m = 3;
        auto B = scaling_invariance(c2);
        ScalingConfig p = c;
        p.q = 1.0 / (1.0 / 3.0 + 0.1);
        auto P = scaling_invariance(p);
        bool ok = A.spread <= 0.05 && B.spread <= 0.05 && P.monotone && std::fabs(P.slope + P.residual) <= 0.02;
        return Outcome{ok, fmt("spread %.2e (a=0,(3,3,inf)), %.2e (a=0.5,(4,4,3)); control slope %.4f vs -%.1f, "
                               "monotone %d",
                               A.spread, B.spread, P.slope, P.residual, (int)P.monotone)};
    });

    criterion(10, "trace continuity", [] {
        bool ok = true;
        double worst = 0;
        for (bool rough : {false, true}) {
            TraceConfig c;
            c.rough = rough;
            for (const auto& p : trace_continuity_profile(c)) {
                ok = ok && p.decreasing && p.end_ratio < 0.1;
                worst = std::max(worst, p.end_ratio);
            }
        }
        return Outcome{ok, fmt("a=0 (q,r)=(3,3), smooth and random-phase: decreasing %d, worst end ratio %.4f (< 0.1)",
                               (int)ok, worst)};
    });

    criterion(11, "nonlinear mass identity", [] {
        auto P0 = mass_problem(1.0);
        auto R0 = picard_solve(P0, 1e-10, 80);
        auto M0 = mass_derivative_residual(R0.U, P0.mu, P0.p);
        double drift = 0;
        for (double m : M0.mass)
            drift = std::max(drift, std::fabs(m / M0.mass[0] - 1));
        auto P1 = mass_problem(cplx(1.0, 0.5));
        auto R1 = picard_solve(P1, 1e-10, 80);
        auto M1 = mass_derivative_residual(R1.U, P1.mu, P1.p);
        bool dec = true;
        for (size_t j = 1; j < M1.mass.size(); ++j)
            dec = dec && M1.mass[j] < M1.mass[j - 1];
        double worst = 0;
        for (size_t j = 2; j < M1.t.size(); ++j)
            worst = std::max(worst, std::fabs(M1.residual[j] / M1.rhs[j]));
        bool ok = drift <= 1e-3 && dec && worst <= 0.05;
        return Outcome{ok, fmt("Im mu = 0 drift %.2e (tol 1e-3); Im mu = 0.5 decreasing %d, max rel residual %.4f "
                               "(tol 0.05)",
                               drift, (int)dec, worst)};
    });

    criterion(12, "Picard contraction and uniqueness", [] {
        auto P = small_problem(0.0, 1.0, 1.0);
        double lam = amplitude_threshold(P, 0.5);
        auto Q = scale_data(P, 0.5 * lam);
        const double tol = 1e-11;
        auto R = picard_solve(Q, tol, 80);
        double worst = 0;
        for (size_t k = 1; k < R.diag.contraction.size(); ++k)
            worst = std::max(worst, R.diag.contraction[k]);
        // second start: the solution plus seeded noise of relative size 0.3
        SpaceTimeField Z = R.U;
        std::mt19937_64 rng(12);
        std::normal_distribution<double> nd;
        double amp = 0;
        for (cplx v : R.U.v)
            amp = std::max(amp, std::abs(v));
        for (cplx& v : Z.v)
            v += 0.3 * amp * cplx(nd(rng), nd(rng));
        for (cplx& v : Z.trace)
            v += 0.3 * amp * cplx(nd(rng), nd(rng));
        MildMap L(Q);
        double start_gap = L.norm(detail::difference(R.U, Z));
        auto R2 = picard_solve(Q, tol, 80, Z);
        double gap = L.norm(detail::difference(R.U, R2.U));
        bool ok = worst <= 0.6 && gap <= 5 * tol;
        return Outcome{ok, fmt("threshold %.4f, run at half: max ratio %.3f (tol 0.6), %d iterations; starts %.2f "
                               "apart end %.1e apart (tol %.0e)",
                               lam, worst, R.diag.iterations, start_gap, gap, 5 * tol)};
    });

    criterion(13, "restriction", [] {
        bool ok = true;
        std::string d;
        for (double a : {0.0, 1.0}) {
            RestrictionConfig c;
            c.a = a;
            auto R = restriction_check(c);
            c.n = 16;
            auto R2 = restriction_check(c);
            double drift = R2.max_ratio / R.max_ratio - 1;
            double qp = 2 * (1 + a + 3) / (1 + a + 5);
            bool good = std::fabs(R.qp - qp) < 1e-14 && R.max_plancherel <= 1e-4 && R2.max_plancherel <= 1e-4 &&
                        std::isfinite(R2.max_ratio) && drift <= 0.2;
            ok = ok && good;
            d += fmt("a=%g q'=%.4f Plancherel %.1e ratio %.4f drift %.3f; ", a, R.qp,
                     std::max(R.max_plancherel, R2.max_plancherel), R2.max_ratio, drift);
        }
        return Outcome{ok, d + "(tol 1e-4, 0.2)"};
    });

    criterion(14, "reproducibility of CSV outputs", [] {
        auto base = std::filesystem::temp_directory_path() / "bsns_acceptance";
        std::filesystem::remove_all(base);
        std::filesystem::create_directories(base);
        auto cfg = base / "c.json";
        std::ofstream(cfg) << R"({"a": 0, "d": 1, "seed": 5})";
        std::ostringstream sink;
        const std::vector<std::vector<std::string>> cmds = {{"verify-strichartz", "--members", "4"},
                                                            {"verify-restriction"},
                                                            {"verify-trace", "--rough"},
                                                            {"verify-dispersive"}};
        size_t files = 0;
        bool same = true;
        for (size_t k = 0; k < cmds.size(); ++k) {
            for (const char* run : {"A", "B"}) {
                auto args = cmds[k];
                auto dir = base / (std::string(run) + std::to_string(k));
                args.insert(args.end(), {"--config", cfg.string(), "--out", dir.string()});
                if (std::string(run) == "B")
                    setenv("BSNS_THREADS", "1", 1);
                int code = cli::run(args, sink, sink);
                unsetenv("BSNS_THREADS");
                if (code != 0)
                    return Outcome{false, "command failed: " + cmds[k][0]};
            }
            for (const auto& e : std::filesystem::directory_iterator(base / ("A" + std::to_string(k)))) {
                if (e.path().extension() != ".csv")
                    continue;
                ++files;
                same = same && slurp(e.path()) == slurp(base / ("B" + std::to_string(k)) / e.path().filename());
            }
        }
        return Outcome{same && files > 0,
                       fmt("%zu CSV files byte-identical across runs (second run single-threaded): %d", files,
                           (int)same)};
    });

    std::printf("%d of 14 criteria failed\n", failures);
    return failures ? 1 : 0;
}
