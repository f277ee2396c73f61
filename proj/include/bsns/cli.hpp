#pragma once

#include <bsns/io.hpp>
#include <bsns/nonlinear.hpp>
#include <bsns/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <set>

namespace bsns::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { ok = 0, bad_config = 1, numerical = 2, not_converged = 3 };

// ---------------------------------------------------------------- configuration

// gaussian: amp exp(-(|x - x0 e1|^2 + (z - z0)^2) / width^2) e^{i k x1}, times e^{i omega t}
// (and sin^2(pi t / T) when envelope is set) for F and Phi. Phi drops the z factor.
struct DataSpec {
    std::string type = "zero";
    double amp = 1.0, width = 1.0, x0 = 0.0, z0 = 0.0, k = 0.0, omega = 0.0;
    bool envelope = false;
    std::string path;
};

struct Config {
    json raw = json::object();
    double a = 0.0;
    int d = 1;
    GridSpec grid;
    std::set<std::string> given; // grid and time keys present in the document
    DataSpec u0{"gaussian"}, F, Phi;
    cplx mu = 0.0;
    std::optional<double> p, q, r, m, q_inf;
    double tol = 1e-10;
    int max_iter = 80;
    uint64_t seed = 1;
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        throw config_error(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool hit = false;
        for (const char* k : keys)
            hit = hit || it.key() == k;
        if (!hit)
            throw config_error("unknown key " + where + "." + it.key());
    }
}

template <class T>
void take(const json& j, const char* key, T& dst)
{
    if (j.contains(key))
        dst = j.at(key).get<T>();
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& dst)
{
    if (j.contains(key) && !j.at(key).is_null())
        dst = j.at(key).get<T>();
}

inline DataSpec parse_data(const json& j, const std::string& where)
{
    only_keys(j, where, {"type", "amp", "width", "x0", "z0", "k", "omega", "envelope", "path"});
    DataSpec s;
    take(j, "type", s.type);
    take(j, "amp", s.amp);
    take(j, "width", s.width);
    take(j, "x0", s.x0);
    take(j, "z0", s.z0);
    take(j, "k", s.k);
    take(j, "omega", s.omega);
    take(j, "envelope", s.envelope);
    take(j, "path", s.path);
    if (s.type != "gaussian" && s.type != "zero" && s.type != "fixture" && s.type != "file")
        throw config_error(where + ".type must be gaussian, zero, fixture or file");
    if (s.type == "file" && s.path.empty())
        throw config_error(where + ": file data needs a path");
    if (s.type == "gaussian" && !(s.width > 0.0))
        throw config_error(where + ".width must be positive");
    return s;
}

} // namespace detail

inline Config parse_config(const json& j)
{
    using namespace detail;
    Config c;
    c.raw = j;
    only_keys(j, "config", {"a", "d", "grid", "time", "data", "mu", "p", "exponents", "solver", "seed"});
    take(j, "a", c.a);
    take(j, "d", c.d);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        only_keys(g, "grid", {"Zmax", "Nz", "Xmax", "Nx", "scheme"});
        for (auto it = g.begin(); it != g.end(); ++it)
            c.given.insert(it.key());
        take(g, "Zmax", c.grid.Zmax);
        take(g, "Nz", c.grid.Nz);
        take(g, "Xmax", c.grid.Xmax);
        take(g, "Nx", c.grid.Nx);
        if (g.contains("scheme"))
            c.grid.scheme = scheme_from_string(g["scheme"].get<std::string>());
    }
    if (j.contains("time")) {
        const auto& t = j["time"];
        only_keys(t, "time", {"T", "Nt"});
        for (auto it = t.begin(); it != t.end(); ++it)
            c.given.insert(it.key());
        take(t, "T", c.grid.T);
        take(t, "Nt", c.grid.Nt);
    }
    if (j.contains("data")) {
        const auto& d = j["data"];
        only_keys(d, "data", {"u0", "F", "Phi"});
        if (d.contains("u0"))
            c.u0 = parse_data(d["u0"], "data.u0");
        if (d.contains("F"))
            c.F = parse_data(d["F"], "data.F");
        if (d.contains("Phi"))
            c.Phi = parse_data(d["Phi"], "data.Phi");
    }
    if (c.F.type == "fixture" || c.Phi.type == "fixture")
        throw config_error("fixture data is defined for u0 only");
    if (j.contains("mu")) {
        const auto& m = j["mu"];
        only_keys(m, "mu", {"re", "im"});
        double re = 0, im = 0;
        take(m, "re", re);
        take(m, "im", im);
        c.mu = cplx(re, im);
    }
    take(j, "p", c.p);
    if (j.contains("exponents")) {
        const auto& e = j["exponents"];
        only_keys(e, "exponents", {"q", "r", "m", "q_inf"});
        take(e, "q", c.q);
        take(e, "r", c.r);
        take(e, "m", c.m);
        take(e, "q_inf", c.q_inf);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        only_keys(s, "solver", {"tol", "max_iter"});
        take(s, "tol", c.tol);
        take(s, "max_iter", c.max_iter);
    }
    take(j, "seed", c.seed);
    if (c.d < 1 || c.d > 3)
        throw config_error("d must be 1, 2 or 3");
    if (!(c.a > -1.0))
        throw config_error("a must exceed -1");
    return c;
}

inline Config load_config(const std::string& path)
{
    if (path.empty())
        return parse_config(json::object());
    std::ifstream f(path);
    if (!f)
        throw config_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

// grid of a verification run: the check's own defaults unless the config names the key
inline GridSpec override_grid(GridSpec g, const Config& c)
{
    if (c.given.count("Xmax"))
        g.Xmax = c.grid.Xmax;
    if (c.given.count("Nx"))
        g.Nx = c.grid.Nx;
    if (c.given.count("Zmax"))
        g.Zmax = c.grid.Zmax;
    if (c.given.count("Nz"))
        g.Nz = c.grid.Nz;
    if (c.given.count("scheme"))
        g.scheme = c.grid.scheme;
    if (c.given.count("T"))
        g.T = c.grid.T;
    if (c.given.count("Nt"))
        g.Nt = c.grid.Nt;
    return g;
}

// ---------------------------------------------------------------- data

namespace detail {

inline double r2_x(const CartesianGrid& xg, size_t ix, double x0)
{
    double s = 0;
    for (int k = 0; k < xg.d; ++k) {
        double x = xg.node(xg.index(ix, k)) - (k == 0 ? x0 : 0.0);
        s += x * x;
    }
    return s;
}

inline double time_factor_env(const DataSpec& s, double t, double T)
{
    return s.envelope ? std::pow(std::sin(specfun::pi * t / T), 2) : 1.0;
}

inline io::Snapshot checked_snapshot(const DataSpec& s, const CartesianGrid& xg, uint32_t Nz, uint32_t Nt, double a)
{
    auto S = io::read_snapshot(s.path);
    if (S.h.d != (uint32_t)xg.d || S.h.Nx != (uint32_t)xg.Nx || S.h.Nz != Nz || S.h.Nt != Nt || S.h.a != a ||
        S.h.Xmax != xg.Xmax)
        throw config_error("snapshot " + s.path + " does not match the configured grids");
    return S;
}

} // namespace detail

inline HalfSpaceField make_u0(const Config& c, const CartesianGrid& xg, const WeightedRadialGrid& zg)
{
    const auto& s = c.u0;
    if (s.type == "fixture")
        return fixture_datum(c.a, xg, zg);
    HalfSpaceField u(xg, zg);
    if (s.type == "zero")
        return u;
    if (s.type == "file") {
        auto S = detail::checked_snapshot(s, xg, (uint32_t)zg.size(), 1, c.a);
        if (S.h.Zmax != zg.Zmax)
            throw config_error("snapshot " + s.path + " has a different Zmax");
        u.v = S.v;
        return u;
    }
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            double z = zg.z[iz] - s.z0;
            u(ix, iz) = s.amp * std::exp(-(detail::r2_x(xg, ix, s.x0) + z * z) / (s.width * s.width)) *
                        std::polar(1.0, s.k * xg.node(xg.index(ix, 0)));
        }
    return u;
}

inline SpaceTimeField make_F(const Config& c, const CartesianGrid& xg, const WeightedRadialGrid& zg,
                             const TimeGrid& tg)
{
    const auto& s = c.F;
    SpaceTimeField F(xg, zg, tg);
    if (s.type == "zero")
        return F;
    if (s.type == "file") {
        auto S = detail::checked_snapshot(s, xg, (uint32_t)zg.size(), (uint32_t)tg.count(), c.a);
        if (S.h.Zmax != zg.Zmax || S.h.T != tg.T)
            throw config_error("snapshot " + s.path + " has different extents");
        F.v = S.v;
        return F;
    }
    for (size_t j = 0; j < tg.count(); ++j) {
        double t = tg.node((int)j);
        cplx tf = detail::time_factor_env(s, t, tg.T) * std::polar(1.0, s.omega * t);
        for (size_t iz = 0; iz < F.nz(); ++iz)
            for (size_t ix = 0; ix < F.nx(); ++ix) {
                double z = zg.z[iz] - s.z0;
                F(ix, iz, j) = tf * s.amp * std::exp(-(detail::r2_x(xg, ix, s.x0) + z * z) / (s.width * s.width)) *
                               std::polar(1.0, s.k * xg.node(xg.index(ix, 0)));
            }
    }
    return F;
}

inline BoundaryTrace make_Phi(const Config& c, const CartesianGrid& xg, const TimeGrid& tg)
{
    const auto& s = c.Phi;
    BoundaryTrace P(xg, tg);
    if (s.type == "zero")
        return P;
    if (s.type == "file") {
        auto S = detail::checked_snapshot(s, xg, 0, (uint32_t)tg.count(), c.a);
        if (S.h.T != tg.T)
            throw config_error("snapshot " + s.path + " has a different T");
        P.v = S.v;
        return P;
    }
    for (size_t j = 0; j < tg.count(); ++j) {
        double t = tg.node((int)j);
        cplx tf = detail::time_factor_env(s, t, tg.T) * std::polar(1.0, s.omega * t);
        for (size_t ix = 0; ix < P.nx(); ++ix)
            P(ix, j) = tf * s.amp * std::exp(-detail::r2_x(xg, ix, s.x0) / (s.width * s.width)) *
                       std::polar(1.0, s.k * xg.node(xg.index(ix, 0)));
    }
    return P;
}

// ---------------------------------------------------------------- outputs

// every emitted file goes through here so the manifest stays complete
class Output {
public:
    Output(const std::string& dir, std::string command) : dir_(dir), cmd_(std::move(command))
    {
        if (dir.empty())
            throw config_error("--out is required");
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw config_error("cannot create output directory " + dir);
    }

    void file(const std::string& name, const std::string& bytes)
    {
        io::detail::write_file(dir_ / name, bytes);
        files_.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", io::sha256_hex(bytes)}});
    }
    void csv(const std::string& name, const io::Csv& t) { file(name, t.text()); }
    void snapshot(const std::string& name, const io::Snapshot& s) { file(name, io::encode(s)); }

    void manifest(const Config& c, const json& extra = json::object())
    {
        json m;
        m["command"] = cmd_;
        m["snapshot_version"] = io::snapshot_version;
        m["config"] = c.raw;
        m["seed"] = c.seed;
        m["grids"] = {{"a", c.a},           {"d", c.d},
                      {"Xmax", c.grid.Xmax}, {"Nx", c.grid.Nx},
                      {"Zmax", c.grid.Zmax}, {"Nz", c.grid.Nz},
                      {"scheme", to_string(c.grid.scheme)},
                      {"T", c.grid.T},       {"Nt", c.grid.Nt}};
        m["run"] = extra;
        m["files"] = files_;
        io::detail::write_file(dir_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string cmd_;
    json files_ = json::array();
};

inline io::Csv mass_table(const SpaceTimeField& U)
{
    io::Csv t({"t", "mass"});
    auto m = mass_profile(U);
    for (size_t j = 0; j < m.size(); ++j)
        t.row({U.tg.node((int)j), m[j]});
    return t;
}

inline BoundaryTrace trace_of(const SpaceTimeField& U)
{
    BoundaryTrace b(U.xg, U.tg);
    if (U.has_trace())
        b.v = U.trace;
    else
        b = boundary_trace(U).trace;
    return b;
}

struct Grids {
    CartesianGrid x;
    WeightedRadialGrid z;
    TimeGrid t;
};

inline Grids grids_of(const Config& c) { return {c.grid.x(c.d), c.grid.z(c.a), c.grid.t()}; }

// ---------------------------------------------------------------- commands

inline int cmd_solve_linear(const Config& c, const std::string& out, std::ostream& os)
{
    auto G = grids_of(c);
    auto U = solve_linear(c.a, c.d, make_u0(c, G.x, G.z), make_F(c, G.x, G.z, G.t), make_Phi(c, G.x, G.t));
    Output o(out, "solve-linear");
    o.snapshot("field.bsns", io::snapshot_of(U));
    o.snapshot("trace.bsns", io::snapshot_of(trace_of(U), c.a));
    o.csv("mass.csv", mass_table(U));
    o.manifest(c);
    os << "solve-linear: wrote " << out << "\n";
    return ok;
}

inline NonlinearProblem problem_of(const Config& c)
{
    auto G = grids_of(c);
    if (c.Phi.type != "zero")
        throw config_error("solve-nonlinear: the boundary datum is the nonlinearity; data.Phi must be zero");
    double p = c.p.value_or(critical_p(c.a, c.d));
    auto P = make_problem(c.a, c.d, c.mu, p, make_u0(c, G.x, G.z), G.t);
    P.F = make_F(c, G.x, G.z, G.t);
    validate(P);
    return P;
}

inline io::Csv iteration_table(const SolveDiagnostics& d)
{
    io::Csv t({"iteration", "difference", "contraction"});
    for (size_t k = 0; k < d.differences.size(); ++k)
        t.row({(double)(k + 1), d.differences[k], k < d.contraction.size() ? d.contraction[k] : 0.0});
    return t;
}

inline int cmd_solve_nonlinear(const Config& c, const std::string& out, std::ostream& os)
{
    auto P = problem_of(c);
    Output o(out, "solve-nonlinear");
    PicardResult R;
    try {
        R = picard_solve(P, c.tol, c.max_iter);
    } catch (const picard_failure& e) {
        o.csv("iterations.csv", iteration_table(e.diag));
        o.manifest(c, {{"converged", false}, {"iterations", e.diag.iterations}});
        throw;
    }
    o.snapshot("field.bsns", io::snapshot_of(R.U));
    o.snapshot("trace.bsns", io::snapshot_of(trace_of(R.U), c.a));
    o.csv("iterations.csv", iteration_table(R.diag));
    o.csv("mass.csv", mass_table(R.U));
    o.manifest(c, {{"converged", true}, {"iterations", R.diag.iterations}, {"residual", R.diag.residual},
                   {"q", P.q},       {"r", P.r},                         {"p", P.p}});
    os << "solve-nonlinear: converged in " << R.diag.iterations << " iterations, residual " << R.diag.residual
       << "\n";
    return ok;
}

inline int cmd_verify_mass(const Config& c, const std::string& out, std::ostream& os)
{
    auto P = problem_of(c);
    auto R = picard_solve(P, c.tol, c.max_iter);
    auto M = mass_derivative_residual(R.U, P.mu, P.p);
    io::Csv t({"t", "mass", "dmdt", "rhs", "residual"});
    double drift = 0, worst = 0;
    for (size_t j = 0; j < M.t.size(); ++j) {
        t.row({M.t[j], M.mass[j], M.dmdt[j], M.rhs[j], M.residual[j]});
        drift = std::max(drift, std::fabs(M.mass[j] / M.mass[0] - 1));
        if (j >= 2 && M.rhs[j] != 0.0)
            worst = std::max(worst, std::fabs(M.residual[j] / M.rhs[j]));
    }
    Output o(out, "verify-mass");
    o.csv("mass.csv", t);
    o.manifest(c, {{"max_relative_drift", drift}, {"max_relative_residual", worst}});
    char buf[160];
    std::snprintf(buf, sizeof buf, "max relative mass drift = %.3e\n", drift);
    os << buf;
    if (P.mu.imag() != 0.0) {
        std::snprintf(buf, sizeof buf, "max |residual| / |rhs| after two steps = %.3e\n", worst);
        os << buf;
    }
    return ok;
}

inline int cmd_verify_dispersive(const Config& c, const std::string& out, int members, DispersiveConfig dc,
                                 std::ostream& os)
{
    if (c.given.count("Zmax"))
        dc.Zmax = c.grid.Zmax;
    if (c.given.count("Nz"))
        dc.Nz = c.grid.Nz;
    auto R = dispersive_fit(c.a, dispersive_family(members, c.seed), dc);
    io::Csv sup({"member", "t", "sup"}), sl({"member", "slope", "rate"});
    for (size_t m = 0; m < R.sup.size(); ++m) {
        for (size_t i = 0; i < R.t.size(); ++i)
            sup.row({(double)m, R.t[i], R.sup[m][i]});
        sl.row({(double)m, R.slopes[m], R.rate});
    }
    Output o(out, "verify-dispersive");
    o.csv("dispersive_sup.csv", sup);
    o.csv("dispersive_slopes.csv", sl);
    if (c.a < 0) {
        io::Csv env({"member", "t", "ratio"});
        for (size_t m = 0; m < R.ratio.size(); ++m)
            for (size_t i = 0; i < R.t.size(); ++i)
                env.row({(double)m, R.t[i], R.ratio[m][i]});
        o.csv("dispersive_envelope.csv", env);
        o.manifest(c, {{"spread", R.spread}, {"tail_slope", R.tail_slope}});
        os << "envelope max/min = " << R.spread << ", tail log-slope = " << R.tail_slope << "\n";
    } else {
        o.manifest(c, {{"worst_relative_slope_error", R.worst_rel}});
        os << "rate " << R.rate << ", worst relative slope error = " << R.worst_rel << "\n";
    }
    return ok;
}

inline int cmd_verify_strichartz(const Config& c, const std::string& out, int members, std::ostream& os)
{
    StrichartzConfig s;
    s.a = c.a;
    s.d = c.d;
    s.r = c.r.value_or(3.0);
    try {
        s.q = c.q.value_or(solve_q(c.a, c.d, s.r));
    } catch (const std::domain_error& e) {
        throw config_error(std::string("inadmissible exponents: ") + e.what());
    }
    s.q_inf = c.q_inf.value_or(inf);
    s.n = members;
    s.seed = c.seed;
    s.grid = override_grid(s.grid, c);
    auto S = strichartz_stability(s);
    io::Csv t({"member", "u0", "lhs1", "rhs1", "ratio1", "lhs2", "rhs2", "ratio2"});
    for (size_t i = 0; i < S.large.samples.size(); ++i) {
        const auto& m = S.large.samples[i];
        t.row({(double)i, m.u0, m.lhs1, m.rhs1, m.ratio1(), m.lhs2, m.rhs2, m.ratio2()});
    }
    io::Csv sm({"members", "max_ratio1", "max_ratio2"});
    sm.row({(double)S.small.samples.size(), S.small.max1, S.small.max2});
    sm.row({(double)S.large.samples.size(), S.large.max1, S.large.max2});
    Output o(out, "verify-strichartz");
    o.csv("strichartz.csv", t);
    o.csv("strichartz_summary.csv", sm);
    o.manifest(c, {{"q", S.large.q}, {"r", S.large.r}, {"q_inf", std::isinf(S.large.q_inf) ? json(nullptr) : json(S.large.q_inf)},
                   {"drift1", S.drift1}, {"drift2", S.drift2}});
    os << "max ratios " << S.large.max1 << " " << S.large.max2 << ", drift under doubling " << S.drift1 << " "
       << S.drift2 << "\n";
    return ok;
}

inline int cmd_verify_restriction(const Config& c, const std::string& out, int members, std::ostream& os)
{
    RestrictionConfig r;
    r.a = c.a;
    r.d = c.d;
    r.q = c.q.value_or(0.0);
    r.r = c.r.value_or(0.0);
    r.n = members;
    r.seed = c.seed;
    r.grid = override_grid(r.grid, c);
    auto R = restriction_check(r);
    io::Csv t({"member", "physical", "spectral", "data", "ratio", "plancherel"});
    for (size_t i = 0; i < R.samples.size(); ++i) {
        const auto& s = R.samples[i];
        t.row({(double)i, s.physical, s.spectral, s.data, s.ratio(), s.plancherel()});
    }
    Output o(out, "verify-restriction");
    o.csv("restriction.csv", t);
    o.manifest(c, {{"q", R.q}, {"r", R.r}, {"qp", R.qp}, {"max_ratio", R.max_ratio},
                   {"max_plancherel", R.max_plancherel}});
    os << "q' = " << R.qp << ", max ratio " << R.max_ratio << ", max Plancherel residual " << R.max_plancherel
       << "\n";
    return ok;
}

inline int cmd_verify_trace(const Config& c, const std::string& out, int members, bool rough, std::ostream& os)
{
    TraceConfig t;
    t.a = c.a;
    t.d = c.d;
    t.r = c.r.value_or(3.0);
    try {
        t.q = c.q.value_or(solve_q(c.a, c.d, t.r, Regime::nonneg_a));
    } catch (const std::domain_error& e) {
        throw config_error(std::string("inadmissible exponents: ") + e.what());
    }
    t.n = members;
    t.seed = c.seed;
    t.rough = rough;
    t.grid = override_grid(t.grid, c);
    auto P = trace_continuity_profile(t);
    io::Csv tab({"member", "node", "z", "profile", "trace_norm"});
    bool dec = true;
    double worst = 0;
    for (size_t m = 0; m < P.size(); ++m) {
        for (size_t i = 0; i < P[m].z.size(); ++i)
            tab.row({(double)m, (double)i, P[m].z[i], P[m].profile[i], P[m].trace_norm});
        dec = dec && P[m].decreasing;
        worst = std::max(worst, P[m].end_ratio);
    }
    Output o(out, "verify-trace");
    o.csv("trace_profile.csv", tab);
    o.manifest(c, {{"decreasing", dec}, {"max_end_ratio", worst}});
    os << "profiles " << (dec ? "decreasing" : "NOT decreasing") << ", worst smallest-node ratio " << worst << "\n";
    return ok;
}

inline int cmd_admissible(double a, int d, double r, std::optional<double> q, double m, std::ostream& os)
{
    Regime reg = regime_of(a);
    double qq;
    try {
        qq = q.value_or(solve_q(a, d, r, reg));
    } catch (const std::domain_error& e) {
        os << "status inadmissible (" << e.what() << ")\n";
        return bad_config;
    }
    auto A = is_admissible(a, d, qq, r, m, reg);
    char buf[64];
    std::snprintf(buf, sizeof buf, "q=%.10g\n", qq);
    os << buf;
    if (a < 0) {
        std::snprintf(buf, sizeof buf, "q_inf=%.10g\n", solve_q(a, d, r, Regime::nonneg_a));
        os << buf;
    }
    os << "status " << (A.admissible ? (A.endpoint ? "admissible endpoint" : "admissible") : "inadmissible") << "\n";
    if (!A.admissible) {
        std::snprintf(buf, sizeof buf, "residual=%.6g\n", A.residual);
        os << buf;
    }
    return ok;
}

inline int cmd_kernel_eval(double a, double z, double zeta, double t, std::ostream& os)
{
    cplx v = kernel_sa(a, z, zeta, t);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
    os << buf;
    return ok;
}

// ---------------------------------------------------------------- entry point

inline int run(std::vector<std::string> args, std::ostream& os = std::cout, std::ostream& es = std::cerr)
{
    CLI::App app{"bsns: Schroedinger flow in a half-space with a weighted Neumann boundary"};
    app.require_subcommand(1);
    std::string config, out;
    int n_disp = 6, n_str = 16, n_res = 8, n_tr = 4;
    bool rough = false;
    DispersiveConfig dc;
    double a = 0, r = 2, m = inf, z = 0, zeta = 0, t = 1;
    int d = 1;
    std::optional<double> q;

    auto with_config = [&](CLI::App* s, bool needs_out = true) {
        s->add_option("--config", config, "JSON configuration");
        auto* o = s->add_option("--out", out, "output directory");
        if (needs_out)
            o->required();
    };
    auto* s_lin = app.add_subcommand("solve-linear", "linear solve U = T*u0 + D F + Theta* Phi");
    with_config(s_lin);
    auto* s_nl = app.add_subcommand("solve-nonlinear", "Picard solve of the boundary-nonlinear problem");
    with_config(s_nl);
    auto* s_mass = app.add_subcommand("verify-mass", "mass identity along a nonlinear solve");
    with_config(s_mass);
    auto* s_disp = app.add_subcommand("verify-dispersive", "dispersive rate fit");
    with_config(s_disp);
    s_disp->add_option("--members", n_disp, "family size")->capture_default_str();
    s_disp->add_option("--t0", dc.t0)->capture_default_str();
    s_disp->add_option("--t1", dc.t1)->capture_default_str();
    s_disp->add_option("--nt", dc.nt)->capture_default_str();
    auto* s_str = app.add_subcommand("verify-strichartz", "Strichartz ratios, ensemble and its double");
    with_config(s_str);
    s_str->add_option("--members", n_str, "ensemble size (doubled for the stability check)")->capture_default_str();
    auto* s_res = app.add_subcommand("verify-restriction", "restriction ratios and Plancherel residual");
    with_config(s_res);
    s_res->add_option("--members", n_res)->capture_default_str();
    auto* s_tr = app.add_subcommand("verify-trace", "trace continuity profiles");
    with_config(s_tr);
    s_tr->add_option("--members", n_tr)->capture_default_str();
    s_tr->add_flag("--rough", rough, "random-phase boundary data");
    auto* s_adm = app.add_subcommand("admissible", "solve and check the admissibility relation");
    s_adm->add_option("--a", a)->required();
    s_adm->add_option("--d", d)->default_val(1);
    s_adm->add_option("--r", r)->required();
    s_adm->add_option("--q", q);
    s_adm->add_option("--m", m)->default_val(inf);
    auto* s_ker = app.add_subcommand("kernel-eval", "S_a(z, zeta, t)");
    s_ker->add_option("--a", a)->required();
    s_ker->add_option("--z", z)->required();
    s_ker->add_option("--zeta", zeta)->default_val(0.0);
    s_ker->add_option("--t", t)->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, os, es);
        return code == 0 ? ok : bad_config;
    }
    try {
        if (s_adm->parsed())
            return cmd_admissible(a, d, r, q, m, os);
        if (s_ker->parsed())
            return cmd_kernel_eval(a, z, zeta, t, os);
        Config c = load_config(config);
        if (s_lin->parsed())
            return cmd_solve_linear(c, out, os);
        if (s_nl->parsed())
            return cmd_solve_nonlinear(c, out, os);
        if (s_mass->parsed())
            return cmd_verify_mass(c, out, os);
        if (s_disp->parsed())
            return cmd_verify_dispersive(c, out, n_disp, dc, os);
        if (s_str->parsed())
            return cmd_verify_strichartz(c, out, n_str, os);
        if (s_res->parsed())
            return cmd_verify_restriction(c, out, n_res, os);
        if (s_tr->parsed())
            return cmd_verify_trace(c, out, n_tr, rough, os);
    } catch (const non_convergence& e) {
        es << "non-convergence: " << e.what() << "\n";
        return not_converged;
    } catch (const numerical_failure& e) {
        es << "numerical failure: " << e.what() << "\n";
        return numerical;
    } catch (const json::exception& e) {
        es << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const std::invalid_argument& e) { // config_error, grid_mismatch
        es << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const std::domain_error& e) {
        es << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const std::exception& e) {
        es << "numerical failure: " << e.what() << "\n";
        return numerical;
    }
    return bad_config;
}

inline int run(int argc, char** argv, std::ostream& os = std::cout, std::ostream& es = std::cerr)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), os, es);
}

} // namespace bsns::cli
