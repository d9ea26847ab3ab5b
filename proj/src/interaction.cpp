#include "chiral/interaction.hpp"

#include <cmath>
#include <string>

#include "chiral/errors.hpp"

namespace chiral {

cplx propagation_phase(double phase) {
    const double reduced = std::remainder(phase, kTwoPi);
    return {std::cos(reduced), -std::sin(reduced)};
}

std::pair<cplx, cplx> chiral_kernel_1d(double separation, double gamma_left, double gamma_right) {
    if (!(separation >= 0.0))
        throw InvalidInput("chiral_kernel_1d expects a non-negative separation |x_mu - x_nu|");
    const cplx phase = propagation_phase(separation);
    return {-gamma_left * phase, -gamma_right * phase};
}

InteractionMatrix build_interaction_matrix(const ChainGeometry& geom, const DriveParams& drive,
                                           const ChiralCoupling& coupling) {
    const auto n = static_cast<Eigen::Index>(geom.size());
    if (drive.detunings.size() != geom.size())
        throw InvalidInput("detunings has " + std::to_string(drive.detunings.size()) +
                           " entries for " + std::to_string(geom.size()) + " atoms");

    CMatrix v(n, n);
    const double half_gamma = 0.5 * coupling.total();
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        v(mu, mu) = cplx(-half_gamma, drive.detunings[static_cast<std::size_t>(mu)]);
        for (Eigen::Index nu = mu + 1; nu < n; ++nu) {
            const auto [left, right] = chiral_kernel_1d(
                geom.separation(static_cast<std::size_t>(mu), static_cast<std::size_t>(nu)),
                coupling.gamma_left(), coupling.gamma_right());
            v(mu, nu) = left;
            v(nu, mu) = right;
        }
    }
    return InteractionMatrix{std::move(v)};
}

} // namespace chiral
