#include "chiral/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "chiral/errors.hpp"

namespace chiral {

ChainGeometry::ChainGeometry(std::vector<double> positions) : positions_(std::move(positions)) {
    if (positions_.empty()) throw InvalidInput("chain needs at least one atom");
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (!std::isfinite(positions_[i]))
            throw InvalidInput("non-finite position at index " + std::to_string(i));
        if (i > 0 && !(positions_[i] > positions_[i - 1]))
            throw InvalidInput("positions must be strictly increasing (index " + std::to_string(i) + ")");
    }
}

double ChainGeometry::separation(std::size_t mu, std::size_t nu) const {
    return std::abs(positions_.at(mu) - positions_.at(nu));
}

ChiralCoupling ChiralCoupling::from_directionality(double directionality) {
    if (!(std::abs(directionality) <= 1.0))
        throw InvalidInput("directionality must lie in [-1, 1], got " + std::to_string(directionality));
    return ChiralCoupling(0.5 * (1.0 - directionality), 0.5 * (1.0 + directionality));
}

ChiralCoupling ChiralCoupling::from_gamma_left(double gamma_left) {
    if (!(gamma_left >= 0.0 && gamma_left <= 1.0))
        throw InvalidInput("gamma_L must lie in [0, 1], got " + std::to_string(gamma_left));
    return ChiralCoupling(gamma_left, 1.0 - gamma_left);
}

namespace {

constexpr int kMaxRedraws = 1000;

bool collides(const std::vector<double>& pos, std::size_t i) {
    for (std::size_t j = 0; j < pos.size(); ++j)
        if (j != i && pos[j] == pos[i]) return true;
    return false;
}

} // namespace

ChainGeometry build_geometry(std::size_t n_atoms, double xi, const std::optional<FluctuationSpec>& fluct) {
    if (n_atoms < 1) throw InvalidInput("n_atoms must be >= 1");
    if (!std::isfinite(xi)) throw InvalidInput("xi must be finite");

    // Couplings depend on the spacing only modulo 2pi; a non-positive spacing
    // is laid out with its equivalent in (0, 2pi] so labels stay ordered.
    const double spacing = xi > 0.0 ? xi : xi + kTwoPi * (std::floor(-xi / kTwoPi) + 1.0);
    std::vector<double> pos(n_atoms);
    for (std::size_t mu = 0; mu < n_atoms; ++mu) pos[mu] = static_cast<double>(mu) * spacing;

    if (fluct && fluct->fraction < 0.0) throw InvalidInput("fluctuation fraction must be >= 0");
    if (fluct && fluct->fraction > 0.0) {
        std::mt19937_64 rng(fluct->seed);
        std::normal_distribution<double> noise(0.0, fluct->fraction * spacing);
        const std::vector<double> nominal = pos;
        for (std::size_t mu = 0; mu < n_atoms; ++mu) pos[mu] = nominal[mu] + noise(rng);
        for (std::size_t mu = 0; mu < n_atoms; ++mu) {
            int redraws = 0;
            while (collides(pos, mu)) {
                if (++redraws > kMaxRedraws)
                    throw InvalidInput("could not separate colliding atom " + std::to_string(mu));
                pos[mu] = nominal[mu] + noise(rng);
            }
        }
        std::sort(pos.begin(), pos.end());
    }
    return ChainGeometry(std::move(pos));
}

} // namespace chiral
