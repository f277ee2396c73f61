// Small-data nonlinear solve: threshold amplitude, then iteration history at half of it.
#include <bsns/nonlinear.hpp>

#include <cstdio>

using namespace bsns;

int main()
{
    const double a = 0.0;
    auto xg = make_cartesian(1, 12.0, 32);
    auto zg = build_radial_grid(a, 12.0, 40, RadialScheme::bessel_collocation);
    HalfSpaceField u(xg, zg);
    for (size_t iz = 0; iz < u.nz(); ++iz)
        for (size_t ix = 0; ix < u.nx(); ++ix) {
            double x = xg.node((int)ix), z = zg.z[iz];
            u(ix, iz) = std::exp(-(x * x + z * z) / 2);
        }
    auto P = make_problem(a, 1, cplx(1.0, 0.2), critical_p(a, 1), u, make_time(1.0, 24));
    double lam = amplitude_threshold(P, 0.5);
    std::printf("amplitude threshold %.4f\n", lam);
    auto R = picard_solve(scale_data(P, 0.5 * lam), 1e-12, 80);
    for (size_t k = 0; k < R.diag.differences.size(); ++k)
        std::printf("%3zu %12.4e\n", k + 1, R.diag.differences[k]);
    std::printf("mass at t=0 %.10f, at t=T %.10f\n", R.diag.mass.front(), R.diag.mass.back());
}
