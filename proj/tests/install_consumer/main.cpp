#include <dtdob/discretize.hpp>

#include <cmath>
#include <cstdio>

int main() {
    const auto b = dtdob::euler_frobenius(4);
    const double s = b(1.0);
    std::printf("B_3(1) = %g\n", s);
    return std::abs(s - 24.0) < 1e-12 ? 0 : 1;
}
