#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chiral/types.hpp"

namespace chiral {

/// Amplitudes A_mu(t) of the singly excited states at time t (units of 1/gamma).
struct AmplitudeState {
    CVector amplitudes;
    double time = 0.0;
};

using Trajectory = std::vector<AmplitudeState>;

struct EvolveOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    /// Upper bound on accepted + rejected steps over the whole run.
    std::size_t max_steps = 50'000'000;
};

/// Integrates dA/dt = i*rabi + V A from A(0) = 0 and samples n_steps + 1
/// equally spaced states on [0, t_final] (both ends included).
Trajectory evolve(const InteractionMatrix& v, double rabi, double t_final, std::size_t n_steps,
                  const EvolveOptions& opts = {});

struct SteadyStateOptions {
    /// V counts as singular when sigma_min < singular_threshold * ||V||_2.
    double singular_threshold = 1e-10;
    /// Accepted relative residual ||V A + i rabi 1|| / (||V|| ||A|| + |rabi| sqrt(N)).
    double residual_tolerance = 1e-9;
};

struct SteadyStateSolution {
    CVector amplitudes;
    double residual = 0.0;             ///< ||V A + i rabi 1||_2
    double smallest_singular_value = 0.0;
    double norm = 0.0;                 ///< ||V||_2
    double slowest_decay_rate = 0.0;   ///< min_k -Re(lambda_k(V))
};

/// Solves V A = -i rabi 1 by dense LU. Throws NoSteadyState at (near-)singular V,
/// e.g. the reciprocal decoherence-free point D = 0, delta = 0, xi = pi.
SteadyStateSolution steady_state(const InteractionMatrix& v, double rabi, const SteadyStateOptions& opts = {});

/// Closed-form N = 2 steady state (gamma = 1, gamma_R = 1 - gamma_L, xi = k|x_1 - x_2|).
std::pair<cplx, cplx> two_atom_steady(double delta1, double delta2, double gamma_left, double xi, double rabi);

/// Shared denominator (i d1 - 1/2)(i d2 - 1/2) - (1 - gamma_L) gamma_L e^{-2 i xi}.
cplx two_atom_denominator(double delta1, double delta2, double gamma_left, double xi);

/// min_k -Re(lambda_k); non-positive when some mode never relaxes.
double slowest_decay_rate(const InteractionMatrix& v);

enum class Saturation { ok, warn, error };

struct ValidityReport {
    double max_population = 0.0;
    double total_population = 0.0;
    Saturation saturation = Saturation::ok;
    bool slow_relaxation = false;

    bool flagged() const noexcept { return saturation != Saturation::ok || slow_relaxation; }
    /// Flag tokens joined by '|', or "ok".
    std::string flags() const;
};

inline constexpr double kSaturationWarn = 0.1;
inline constexpr double kSaturationError = 0.5;
inline constexpr double kSlowRelaxationRate = 1e-3;

ValidityReport validity_check(const CVector& amplitudes);
ValidityReport validity_check(const AmplitudeState& state);
/// Also flags slow_relaxation when the slowest decay rate is below kSlowRelaxationRate.
ValidityReport validity_check(const SteadyStateSolution& solution);

} // namespace chiral
