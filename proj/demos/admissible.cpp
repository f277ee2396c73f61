// Admissible time exponents for a few (a, r), d = 1 and d = 2.
#include <bsns/norms.hpp>

#include <cstdio>

using namespace bsns;

int main()
{
    for (int d : {1, 2})
        for (double a : {-0.5, 0.0, 0.5, 0.9}) {
            std::printf("d=%d a=%5.2f p_crit=%.4f  q(r):", d, a, critical_p(a, d));
            for (double r : {2.5, 3.0, 4.0}) {
                try {
                    std::printf("  q(%g)=%.4f", r, solve_q(a, d, r));
                } catch (const std::exception&) {
                    std::printf("  q(%g)=none", r);
                }
            }
            std::printf("\n");
        }
}
