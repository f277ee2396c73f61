#include <bsns/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>

using namespace bsns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / "bsns_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream o, e;
    int c = cli::run(std::move(args), o, e);
    return {c, o.str(), e.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const cli::json& j)
{
    auto p = dir / name;
    std::ofstream(p) << j.dump();
    return p;
}

cli::json small_config(double amp = 0.4, double mu_re = 0.0)
{
    return {{"a", 0.0},
            {"d", 1},
            {"grid", {{"Zmax", 12.0}, {"Nz", 40}, {"Xmax", 12.0}, {"Nx", 32}, {"scheme", "bessel_collocation"}}},
            {"time", {{"T", 1.0}, {"Nt", 24}}},
            {"data",
             {{"u0", {{"type", "gaussian"}, {"amp", amp}, {"width", std::sqrt(2.0)}, {"k", 0.3}}},
              {"F", {{"type", "zero"}}},
              {"Phi", {{"type", "zero"}}}}},
            {"mu", {{"re", mu_re}, {"im", 0.0}}},
            {"p", 2.0},
            {"solver", {{"tol", 1e-10}, {"max_iter", 60}}},
            {"seed", 3}};
}

} // namespace

TEST(Cli, AdmissibleDiagonal)
{
    auto r = run({"admissible", "--a", "0", "--d", "1", "--r", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("q=3\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("status admissible"), std::string::npos) << r.out;
    auto b = run({"admissible", "--a", "0", "--r", "3", "--q", "4"});
    EXPECT_EQ(b.code, 0);
    EXPECT_NE(b.out.find("status inadmissible"), std::string::npos);
    auto n = run({"admissible", "--a", "-0.5", "--r", "3"});
    EXPECT_NE(n.out.find("q_inf=4.8"), std::string::npos) << n.out;
    EXPECT_EQ(run({"admissible", "--a", "0", "--r", "1.5"}).code, 1);
}

TEST(Cli, KernelEval)
{
    auto r = run({"kernel-eval", "--a", "0", "--z", "1", "--t", "1"});
    ASSERT_EQ(r.code, 0);
    std::istringstream s(r.out);
    double re, im;
    s >> re >> im;
    // a = 0: e^{-i pi/4} e^{i z^2 / 4t} / sqrt(pi t)
    double ph = -specfun::pi / 4 + 0.25;
    EXPECT_NEAR(re, std::cos(ph) / std::sqrt(specfun::pi), 1e-12);
    EXPECT_NEAR(im, std::sin(ph) / std::sqrt(specfun::pi), 1e-12);
}

TEST(Cli, ConfigErrors)
{
    auto d = scratch("config");
    auto j = small_config();
    j["bogus"] = 1;
    EXPECT_EQ(run({"solve-linear", "--config", write_config(d, "a.json", j).string(), "--out", (d / "o").string()}).code, 1);
    auto k = small_config();
    k["grid"]["Nq"] = 3;
    EXPECT_EQ(run({"solve-linear", "--config", write_config(d, "b.json", k).string(), "--out", (d / "o").string()}).code, 1);
    auto t = small_config();
    t["data"]["u0"]["type"] = "sawtooth";
    EXPECT_EQ(run({"solve-linear", "--config", write_config(d, "c.json", t).string(), "--out", (d / "o").string()}).code, 1);
    std::ofstream(d / "broken.json") << "{ not json";
    EXPECT_EQ(run({"solve-linear", "--config", (d / "broken.json").string(), "--out", (d / "o").string()}).code, 1);
    EXPECT_EQ(run({"solve-linear", "--config", (d / "a.json").string()}).code, 1); // --out missing
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
}

TEST(Cli, MuZeroMatchesLinear)
{
    auto d = scratch("muzero");
    auto c = write_config(d, "c.json", small_config()).string();
    ASSERT_EQ(run({"solve-linear", "--config", c, "--out", (d / "lin").string()}).code, 0);
    ASSERT_EQ(run({"solve-nonlinear", "--config", c, "--out", (d / "nl").string()}).code, 0);
    EXPECT_EQ(slurp(d / "lin" / "field.bsns"), slurp(d / "nl" / "field.bsns"));
    EXPECT_EQ(slurp(d / "lin" / "trace.bsns"), slurp(d / "nl" / "trace.bsns"));
}

TEST(Cli, SnapshotLayout)
{
    auto d = scratch("layout");
    auto c = write_config(d, "c.json", small_config()).string();
    ASSERT_EQ(run({"solve-linear", "--config", c, "--out", (d / "o").string()}).code, 0);
    std::string b = slurp(d / "o" / "field.bsns");
    ASSERT_GE(b.size(), 4u + 20 + 32);
    EXPECT_EQ(b.substr(0, 4), "BSNS");
    auto u32 = [&](size_t at) {
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | (unsigned char)b[at + i];
        return v;
    };
    auto f64 = [&](size_t at) {
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | (unsigned char)b[at + i];
        double x;
        std::memcpy(&x, &v, 8);
        return x;
    };
    EXPECT_EQ(u32(4), 1u);
    EXPECT_EQ(u32(8), 1u);   // d
    EXPECT_EQ(u32(12), 32u); // Nx
    EXPECT_EQ(u32(16), 40u); // Nz
    EXPECT_EQ(u32(20), 25u); // time slices
    EXPECT_EQ(f64(24), 0.0);
    EXPECT_EQ(f64(32), 12.0);
    EXPECT_EQ(f64(40), 12.0);
    EXPECT_EQ(f64(48), 1.0);
    EXPECT_EQ(b.size(), 56u + 16u * 32 * 40 * 25);
    // first value is u0 at (x = -12, first z node), t = 0
    auto zg = build_radial_grid(0.0, 12.0, 40, RadialScheme::bessel_collocation);
    double z = zg.z[0];
    cplx expect = 0.4 * std::exp(-(144 + z * z) / 2) * std::polar(1.0, 0.3 * -12.0);
    EXPECT_NEAR(f64(56), expect.real(), 1e-300 + 1e-12 * std::abs(expect));
    EXPECT_NEAR(f64(64), expect.imag(), 1e-300 + 1e-12 * std::abs(expect));
    // round trip through the decoder
    auto S = io::decode(b);
    EXPECT_EQ(io::encode(S), b);
    auto T = io::read_snapshot(d / "o" / "trace.bsns");
    EXPECT_EQ(T.h.Nz, 0u);
    EXPECT_EQ(T.v.size(), 32u * 25);
    EXPECT_THROW(io::decode("XXXX" + b.substr(4)), config_error);
    EXPECT_THROW(io::decode(b.substr(0, b.size() - 1)), config_error);
}

TEST(Cli, ManifestComplete)
{
    auto d = scratch("manifest");
    auto c = write_config(d, "c.json", small_config(0.3, 1.0)).string();
    ASSERT_EQ(run({"solve-nonlinear", "--config", c, "--out", (d / "o").string()}).code, 0);
    auto m = cli::json::parse(slurp(d / "o" / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& f : m["files"]) {
        std::string name = f["name"];
        listed.insert(name);
        EXPECT_EQ(f["sha256"].get<std::string>(), io::sha256_file(d / "o" / name)) << name;
        EXPECT_EQ(f["bytes"].get<size_t>(), fs::file_size(d / "o" / name));
    }
    for (const auto& e : fs::directory_iterator(d / "o"))
        if (e.path().filename() != "manifest.json")
            EXPECT_TRUE(listed.count(e.path().filename().string())) << e.path();
    EXPECT_EQ(m["seed"].get<int>(), 3);
    EXPECT_EQ(m["grids"]["Nz"].get<int>(), 40);
    // known digest
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, Reproducible)
{
    auto d = scratch("repro");
    auto j = small_config();
    j["grid"] = {{"Xmax", 8.0}, {"Nx", 32}, {"Zmax", 8.0}, {"Nz", 32}};
    j["time"] = {{"T", 1.0}, {"Nt", 16}};
    auto c = write_config(d, "c.json", j).string();
    for (const char* cmd : {"verify-strichartz", "verify-restriction", "verify-trace"}) {
        ASSERT_EQ(run({cmd, "--config", c, "--out", (d / "A").string(), "--members", "3"}).code, 0) << cmd;
        setenv("BSNS_THREADS", "1", 1);
        ASSERT_EQ(run({cmd, "--config", c, "--out", (d / "B").string(), "--members", "3"}).code, 0) << cmd;
        unsetenv("BSNS_THREADS");
        for (const auto& e : fs::directory_iterator(d / "A"))
            EXPECT_EQ(slurp(e.path()), slurp(d / "B" / e.path().filename())) << cmd << " " << e.path();
    }
}

TEST(Cli, FileDatumRoundTrip)
{
    auto d = scratch("file");
    auto j = small_config();
    auto c = write_config(d, "c.json", j).string();
    ASSERT_EQ(run({"solve-linear", "--config", c, "--out", (d / "g").string()}).code, 0);
    // u0 as a single-slice snapshot
    auto xg = make_cartesian(1, 12.0, 32);
    auto zg = build_radial_grid(0.0, 12.0, 40, RadialScheme::bessel_collocation);
    auto cfg = cli::parse_config(j);
    io::write_snapshot(d / "u0.bsns", io::snapshot_of(cli::make_u0(cfg, xg, zg)));
    j["data"]["u0"] = {{"type", "file"}, {"path", (d / "u0.bsns").string()}};
    auto c2 = write_config(d, "c2.json", j).string();
    ASSERT_EQ(run({"solve-linear", "--config", c2, "--out", (d / "f").string()}).code, 0);
    EXPECT_EQ(slurp(d / "g" / "field.bsns"), slurp(d / "f" / "field.bsns"));
    // wrong grid
    j["grid"]["Nz"] = 48;
    auto c3 = write_config(d, "c3.json", j).string();
    EXPECT_EQ(run({"solve-linear", "--config", c3, "--out", (d / "x").string()}).code, 1);
}

TEST(Cli, ExitCodesForSolverFailures)
{
    auto d = scratch("codes");
    auto j = small_config(0.3, 1.0);
    j["solver"]["max_iter"] = 2;
    auto r = run({"solve-nonlinear", "--config", write_config(d, "a.json", j).string(), "--out", (d / "a").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_TRUE(fs::exists(d / "a" / "iterations.csv"));
    auto k = small_config(60.0, 1.0);
    auto s = run({"solve-nonlinear", "--config", write_config(d, "b.json", k).string(), "--out", (d / "b").string()});
    EXPECT_EQ(s.code, 2);
    auto p = small_config(0.3, 1.0);
    p["p"] = 3.0; // above p_c
    EXPECT_EQ(run({"solve-nonlinear", "--config", write_config(d, "c.json", p).string(), "--out", (d / "c").string()}).code,
              1);
}

TEST(Cli, VerifyMassRealMu)
{
    auto d = scratch("mass");
    cli::json j = {{"a", 0.0},
                   {"d", 1},
                   {"grid", {{"Zmax", 32.0}, {"Nz", 256}, {"Xmax", 32.0}, {"Nx", 128}}},
                   {"time", {{"T", 2.0}, {"Nt", 64}}},
                   {"data", {{"u0", {{"type", "gaussian"}, {"amp", 0.5}, {"width", std::sqrt(2.0)}}}}},
                   {"mu", {{"re", 1.0}, {"im", 0.0}}},
                   {"p", 2.0},
                   {"solver", {{"tol", 1e-10}, {"max_iter", 80}}}};
    auto r = run({"verify-mass", "--config", write_config(d, "m.json", j).string(), "--out", (d / "o").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto at = r.out.find("max relative mass drift = ");
    ASSERT_NE(at, std::string::npos);
    double drift = std::stod(r.out.substr(at + 26));
    EXPECT_LE(drift, 1e-3);
    EXPECT_TRUE(fs::exists(d / "o" / "mass.csv"));
}
