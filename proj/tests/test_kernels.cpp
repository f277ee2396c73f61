#include <bsns/kernels.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace bsns;
using specfun::pi;
using cd = std::complex<double>;

namespace {

// a = 0: even reflection of the free half-line kernel
cd a0_images(int d, const std::vector<double>& x, double z, const std::vector<double>& y, double zeta, double t)
{
    double r2 = 0.0;
    for (int i = 0; i < d; ++i)
        r2 += (x[i] - y[i]) * (x[i] - y[i]);
    double s = t > 0 ? 1.0 : -1.0;
    cd pre = std::polar(std::pow(4 * pi * std::fabs(t), -0.5 * (d + 1)), -s * (d + 1) * pi / 4);
    cd img = std::exp(cd(0, (z - zeta) * (z - zeta) / (4 * t))) + std::exp(cd(0, (z + zeta) * (z + zeta) / (4 * t)));
    return pre * img * std::exp(cd(0, r2 / (4 * t)));
}

// direct evaluation with Boost Bessel
cd sa_boost(double a, double z, double zeta, double t)
{
    double nu = (a - 1) / 2, b = (a + 1) / 2, x = z * zeta / (2 * std::fabs(t));
    double s = t > 0 ? 1.0 : -1.0;
    double mod = std::pow(2 * std::fabs(t), -b) * std::pow(x, -nu) * boost::math::cyl_bessel_j(nu, x);
    return std::polar(mod, -s * b * pi / 2 + (z * z + zeta * zeta) / (4 * t));
}

} // namespace

TEST(Kernels, TransverseAgainstBoost)
{
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ua(-0.9, 2.0), uz(0.01, 8.0), ut(-5.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        double a = ua(rng), z = uz(rng), zeta = uz(rng), t = ut(rng);
        cd ref = sa_boost(a, z, zeta, t);
        EXPECT_LT(std::abs(kernel_sa(a, z, zeta, t) - ref), 1e-11 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Kernels, SymmetryAndConjugation)
{
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> ua(-0.9, 1.5), uz(0.0, 6.0), ut(0.05, 4.0);
    for (int i = 0; i < 200; ++i) {
        double a = ua(rng), z = uz(rng), zeta = uz(rng), t = ut(rng);
        EXPECT_LT(std::abs(kernel_sa(a, z, zeta, t) - kernel_sa(a, zeta, z, t)), 1e-14);
        EXPECT_LT(std::abs(std::conj(kernel_sa(a, z, zeta, t)) - kernel_sa(a, z, zeta, -t)), 1e-14);
        std::vector<double> x{uz(rng), uz(rng)}, y{uz(rng), uz(rng)};
        EXPECT_LT(std::abs(std::conj(kernel_full(a, 2, x, z, y, zeta, t)) - kernel_full(a, 2, x, z, y, zeta, -t)),
                  1e-14);
        EXPECT_LT(std::abs(std::conj(kernel_free(2, x, y, t)) - kernel_free(2, x, y, -t)), 1e-15);
    }
}

TEST(Kernels, ExampleValues)
{
    EXPECT_NEAR(std::abs(kernel_sa(0.0, 1.0, 1.0, 1.0)), std::cos(0.5) / std::sqrt(pi), 1e-14);
    EXPECT_NEAR(std::abs(kernel_sa(0.0, 1.0, 1.0, 1.0)), 0.495123, 1e-6);
    for (double z : {0.0, 0.3, 2.0, 7.0})
        EXPECT_NEAR(std::abs(kernel_sa_boundary(0.0, z, 1.0)), 0.564190, 1e-6);
    std::vector<double> x{0.3};
    cd f = kernel_free(1, x, x, 1.0);
    EXPECT_NEAR(std::abs(f - std::polar(0.282095, -pi / 4)), 0.0, 1e-6);
    std::vector<double> y{2.1};
    EXPECT_NEAR(std::abs(kernel_free(1, x, y, 0.7)), std::abs(kernel_free(1, x, x, 0.7)), 1e-15);
}

TEST(Kernels, BoundaryLimitAndPhase)
{
    for (double a : {-0.7, -0.5, 0.0, 0.5, 1.0, 2.5})
        for (double z : {0.0, 0.5, 3.0})
            for (double t : {-2.0, 0.3, 1.5}) {
                cd lim = kernel_sa(a, z, 1e-6, t), b = kernel_sa_boundary(a, z, t);
                EXPECT_LT(std::abs(lim - b), 1e-8 * std::abs(b));
                double mod = std::pow(2.0, -a) / boost::math::tgamma((a + 1) / 2) * std::pow(std::fabs(t), -(a + 1) / 2);
                EXPECT_NEAR(std::abs(b), mod, 1e-13 * mod);
                if (t > 0) {
                    cd ph = b / std::abs(b);
                    cd ex = std::polar(1.0, -(a + 1) * pi / 4 + z * z / (4 * t));
                    EXPECT_NEAR(std::abs(ph - ex), 0.0, 1e-13);
                }
            }
}

TEST(Kernels, AZeroCosineClosedForm)
{
    std::mt19937 rng(100);
    std::uniform_real_distribution<double> ux(-5.0, 5.0), uz(0.0, 5.0), ut(-3.0, 3.0);
    for (int d : {1, 2, 3})
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(d), y(d);
            for (int k = 0; k < d; ++k) {
                x[k] = ux(rng);
                y[k] = ux(rng);
            }
            double z = uz(rng), zeta = uz(rng), t = ut(rng);
            if (std::fabs(t) < 0.05)
                t = 0.05;
            cd ref = a0_images(d, x, z, y, zeta, t);
            EXPECT_LT(std::abs(kernel_full(0.0, d, x, z, y, zeta, t) - ref), 1e-12 * std::max(1.0, std::abs(ref)));
        }
}

TEST(Kernels, FullScalingHomogeneity)
{
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uz(0.0, 3.0), ut(0.2, 2.0);
    for (double a : {-0.5, 0.0, 0.5, 1.0})
        for (double lam : {0.5, 2.0})
            for (int i = 0; i < 20; ++i) {
                int d = 2;
                std::vector<double> x{ux(rng), ux(rng)}, y{ux(rng), ux(rng)};
                double z = uz(rng), zeta = uz(rng), t = ut(rng);
                std::vector<double> lx{lam * x[0], lam * x[1]}, ly{lam * y[0], lam * y[1]};
                cd k1 = kernel_full(a, d, lx, lam * z, ly, lam * zeta, lam * lam * t);
                cd k0 = kernel_full(a, d, x, z, y, zeta, t);
                EXPECT_LT(std::abs(std::pow(lam, d + a + 1) * k1 - k0), 1e-12 * std::abs(k0));
            }
}

TEST(Kernels, FullBoundaryModulus)
{
    for (double a : {-0.5, 0.0, 0.5})
        for (int d : {1, 2})
            for (double t : {0.5, 2.0, -3.0}) {
                std::vector<double> x(d, 0.4), y(d, -1.0);
                cd v = kernel_full_boundary(a, d, x, 1.3, y, t);
                EXPECT_NEAR(std::abs(v), full_boundary_constant(a, d) * std::pow(std::fabs(t), -(d + a + 1) / 2),
                            1e-13);
                cd lim = kernel_full(a, d, x, 1.3, y, 1e-7, t);
                EXPECT_LT(std::abs(lim - v), 1e-8 * std::abs(v));
            }
}

TEST(Kernels, NeumannFluxVanishes)
{
    // z^a dS/dz at small z, by central differences
    for (double a : {-0.5, 0.0, 0.5}) {
        double prev = 1e300, first = 0.0;
        for (double z : {1e-1, 1e-2, 1e-3}) {
            double h = z * 1e-3;
            cd der = (kernel_sa(a, z + h, 0.8, 0.6) - kernel_sa(a, z - h, 0.8, 0.6)) / (2 * h);
            double flux = std::abs(std::pow(z, a) * der);
            EXPECT_LT(flux, prev);
            if (first == 0.0)
                first = flux;
            prev = flux;
        }
        // decays like z^{a+1}
        EXPECT_LT(prev, 2.0 * first * std::pow(1e-2, a + 1));
    }
}

TEST(Kernels, RejectsZeroTime)
{
    std::vector<double> x{0.0};
    EXPECT_THROW(kernel_sa(0.0, 1.0, 1.0, 0.0), std::domain_error);
    EXPECT_THROW(kernel_sa_boundary(0.0, 1.0, 0.0), std::domain_error);
    EXPECT_THROW(kernel_free(1, x, x, 0.0), std::domain_error);
}
