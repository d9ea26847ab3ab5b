#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace chiral {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Ordered atom positions k*x_mu along the waveguide (dimensionless phase, radians).
/// Positions are strictly increasing; spacing is stored unreduced.
class ChainGeometry {
public:
    /// Throws InvalidInput unless the list is non-empty and strictly increasing.
    explicit ChainGeometry(std::vector<double> positions);

    std::size_t size() const noexcept { return positions_.size(); }
    const std::vector<double>& positions() const noexcept { return positions_; }
    double operator[](std::size_t i) const { return positions_[i]; }

    /// |k x_mu - k x_nu| for zero-based indices.
    double separation(std::size_t mu, std::size_t nu) const;

private:
    std::vector<double> positions_;
};

/// Left/right guided decay rates in units of the total rate (gamma_L + gamma_R = 1).
class ChiralCoupling {
public:
    /// gamma_L = (1 - D)/2, gamma_R = (1 + D)/2. Requires |D| <= 1.
    static ChiralCoupling from_directionality(double directionality);
    /// gamma_R = 1 - gamma_L. Requires 0 <= gamma_L <= 1.
    static ChiralCoupling from_gamma_left(double gamma_left);

    double gamma_left() const noexcept { return gamma_left_; }
    double gamma_right() const noexcept { return gamma_right_; }
    double total() const noexcept { return gamma_left_ + gamma_right_; }
    /// D = (gamma_R - gamma_L)/gamma
    double directionality() const noexcept { return (gamma_right_ - gamma_left_) / total(); }

private:
    ChiralCoupling(double gl, double gr) : gamma_left_(gl), gamma_right_(gr) {}
    double gamma_left_;
    double gamma_right_;
};

/// Uniform Rabi frequency and per-atom detunings, both in units of gamma.
struct DriveParams {
    double rabi = 0.01;
    std::vector<double> detunings;

    static DriveParams uniform(std::size_t n_atoms, double detuning, double rabi = 0.01) {
        return DriveParams{rabi, std::vector<double>(n_atoms, detuning)};
    }
};

/// Static Gaussian position disorder: each atom is displaced by N(0, (fraction*xi)^2).
struct FluctuationSpec {
    double fraction = 0.0;
    std::uint64_t seed = 0;
};

/// Chiral interaction matrix V (N x N, units of gamma).
struct InteractionMatrix {
    CMatrix entries;

    Eigen::Index size() const noexcept { return entries.rows(); }
    cplx operator()(Eigen::Index mu, Eigen::Index nu) const { return entries(mu, nu); }
};

} // namespace chiral
