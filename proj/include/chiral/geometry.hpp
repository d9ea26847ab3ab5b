#pragma once

#include <optional>

#include "chiral/types.hpp"

namespace chiral {

/// Equidistant chain k x_mu = (mu - 1) * xi, optionally with static Gaussian
/// displacements (std = fraction * xi) that are re-sorted afterwards.
///
/// xi > 0 is stored as given. A non-positive xi is laid out with the spacing
/// xi + 2pi m in (0, 2pi], which yields the same couplings.
/// Colliding positions are redrawn for the offending atom, up to a bounded
/// number of retries. Deterministic for a given seed.
ChainGeometry build_geometry(std::size_t n_atoms, double xi,
                             const std::optional<FluctuationSpec>& fluct = std::nullopt);

} // namespace chiral
