#include "chiral/rddi.hpp"

#include <cmath>

#include "chiral/errors.hpp"

namespace chiral {

cplx rddi_3d(double xi, double mu_align) {
    if (!(xi > 0.0)) throw InvalidInput("rddi_3d requires a positive separation (self term is the bare decay)");
    if (!(std::abs(mu_align) <= 1.0)) throw InvalidInput("mu_align is a cosine and must lie in [-1, 1]");

    const double a2 = mu_align * mu_align;
    const double transverse = 1.0 - a2;
    const double longitudinal = 1.0 - 3.0 * a2;
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    const double xi2 = xi * xi;
    const double xi3 = xi2 * xi;

    const double decay = 1.5 * (transverse * s / xi + longitudinal * (c / xi2 - s / xi3));
    const double shift = 0.75 * (-transverse * c / xi + longitudinal * (s / xi2 + c / xi3));
    return {0.5 * decay, shift};
}

cplx rddi_1d(double separation) {
    return {0.5 * std::cos(separation), 0.5 * std::sin(std::abs(separation))};
}

} // namespace chiral
