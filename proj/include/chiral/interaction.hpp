#pragma once

#include <utility>

#include "chiral/types.hpp"

namespace chiral {

/// e^{-i phase} with the phase reduced to (-pi, pi] first.
cplx propagation_phase(double phase);

/// Guided-mode couplings for an atom pair at phase separation kx >= 0:
/// first = -gamma_L e^{-ikx} (feeds the left atom), second = -gamma_R e^{-ikx}.
std::pair<cplx, cplx> chiral_kernel_1d(double separation, double gamma_left, double gamma_right);

/// Builds V with diagonal i*delta_mu - gamma/2, upper triangle -gamma_L e^{-ik|x|}
/// and lower triangle -gamma_R e^{-ik|x|}.
InteractionMatrix build_interaction_matrix(const ChainGeometry& geom, const DriveParams& drive,
                                           const ChiralCoupling& coupling);

} // namespace chiral
