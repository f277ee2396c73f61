// Gaussian datum under the free flow: L^2_a mass and boundary value over time.
#include <bsns/norms.hpp>
#include <bsns/propagators.hpp>

#include <cstdio>

using namespace bsns;

int main()
{
    const double a = 0.5;
    auto xg = make_cartesian(1, 16.0, 64);
    auto zg = build_radial_grid(a, 20.0, 96, RadialScheme::bessel_collocation);
    HalfSpaceField u(xg, zg);
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            double x = xg.node((int)ix), z = zg.z[iz];
            u(ix, iz) = std::exp(-x * x / 2 - z * z / 2);
        }
    std::printf("%8s %22s %14s\n", "t", "L2_a norm", "|u(0,0,t)|");
    for (double t : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        auto v = propagate(a, 1, t, u);
        std::printf("%8.3f %22.16f %14.6e\n", t, l2a_norm(v), std::abs(v(xg.Nx / 2, 0)));
    }
}
