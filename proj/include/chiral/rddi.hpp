#pragma once

#include "chiral/types.hpp"

namespace chiral {

/// Resonant dipole-dipole coupling between two atoms in free space, in units
/// of the single-atom decay constant.
///
/// `xi` is the dimensionless separation k|r_mu - r_nu| (must be > 0) and
/// `mu_align` the cosine between the dipole orientation and the separation
/// axis. Re(J) is half the collective decay rate, Im(J) the collective shift.
cplx rddi_3d(double xi, double mu_align);

/// Collective decay rate Re(2J)/Gamma of rddi_3d.
inline double rddi_3d_decay(double xi, double mu_align) { return 2.0 * rddi_3d(xi, mu_align).real(); }

/// Reciprocal one-dimensional reservoir kernel J/Gamma_1D = [cos(x) + i sin|x|]/2.
cplx rddi_1d(double separation);

} // namespace chiral
