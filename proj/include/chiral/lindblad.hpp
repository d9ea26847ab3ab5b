#pragma once

#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "chiral/types.hpp"

namespace chiral {

using SpMatrix = Eigen::SparseMatrix<cplx>;

/// Largest chain the master-equation oracle accepts (2^N-dimensional density matrix).
inline constexpr std::size_t kMaxOracleAtoms = 8;
/// Above this size steady states come from time integration instead of a null-space solve.
inline constexpr std::size_t kMaxNullSpaceAtoms = 5;

/// Density matrix over N two-level atoms. Basis index bit mu (zero-based) is
/// set when atom mu is excited; index 0 is the global ground state.
struct DensityMatrix {
    CMatrix rho;
    std::size_t n_atoms = 0;

    static DensityMatrix ground(std::size_t n_atoms);

    double trace_error() const;       ///< |tr(rho) - 1|
    double hermiticity_error() const; ///< max |rho - rho^dagger|
    double min_eigenvalue() const;
    /// <sigma_mu^dagger sigma_mu> for every atom.
    RVector populations() const;
};

/// Chiral master-equation generator with hbar = 1 and gamma_L + gamma_R = 1.
///
/// d rho/dt = -i[H, rho] + sum_c gamma_c (c rho c^dagger - {c^dagger c, rho}/2)
/// with H = H_S + H_L + H_R and one collective jump operator per guided
/// direction. Propagation phases use the e^{-ik|x|} convention of V, so at
/// zero drive the coherences <e_mu|rho|g> evolve exactly with V.
class Liouvillian {
public:
    struct Channel {
        double rate;
        SpMatrix jump;
    };

    Liouvillian(std::size_t n_atoms, SpMatrix hamiltonian, std::vector<Channel> channels);

    std::size_t n_atoms() const noexcept { return n_atoms_; }
    std::size_t dimension() const noexcept { return std::size_t{1} << n_atoms_; }
    const SpMatrix& hamiltonian() const noexcept { return hamiltonian_; }
    const std::vector<Channel>& channels() const noexcept { return channels_; }

    /// L[rho]
    CMatrix apply(const CMatrix& rho) const;
    /// Dense column-major vectorized generator (dimension 4^N).
    CMatrix superoperator() const;

private:
    std::size_t n_atoms_;
    SpMatrix hamiltonian_;
    std::vector<Channel> channels_;
    SpMatrix effective_; ///< H - (i/2) sum gamma c^dagger c
};

/// sigma_mu = |g><e| on atom mu.
SpMatrix lowering_operator(std::size_t n_atoms, std::size_t mu);

Liouvillian build_liouvillian(const ChainGeometry& geom, const DriveParams& drive, const ChiralCoupling& coupling);

/// M_{mu,nu} = <e_mu| L[|e_nu><g|] |g>; equals V for the same parameters.
CMatrix single_excitation_block(const Liouvillian& liouvillian);

struct DensityEvolveOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    /// Allowed trace/Hermiticity drift per unit gamma*t (at least this much at t < 1).
    double drift_per_time = 1e-9;
    double positivity_tol = 1e-9;
};

/// Integrates rho from rho0 and samples n_steps + 1 equally spaced states.
/// Checks trace, Hermiticity and positivity at every sample.
std::vector<std::pair<double, DensityMatrix>> evolve_dm(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                                                        double t_final, std::size_t n_steps,
                                                        const DensityEvolveOptions& opts = {});

struct DensitySteadyOptions {
    /// Reciprocal condition estimate below which the null space counts as degenerate.
    double degeneracy_rcond = 1e-11;
    /// Integration fallback: stop once ||L[rho]||_F falls below this.
    double stationarity_tol = 1e-11;
    double max_time = 2e4;
};

/// Unique stationary state of the generator. Null-space solve up to
/// kMaxNullSpaceAtoms atoms, long-time integration beyond.
/// Throws NoUniqueSteadyState for a degenerate null space.
DensityMatrix steady_state_dm(const Liouvillian& liouvillian, const DensitySteadyOptions& opts = {});

struct ComparisonRow {
    double rabi = 0.0;
    double max_relative_discrepancy = 0.0; ///< max_mu |P_dm - P_amp| / P_amp
    double tp_amplitude = 0.0;
    double tp_lindblad = 0.0;
    RVector populations_amplitude;
    RVector populations_lindblad;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    /// Least-squares slope of log(discrepancy) against log(rabi).
    double scaling_exponent = 0.0;
};

/// Runs both models for every rabi value and fits the discrepancy scaling.
/// The rabi values must span at least one decade.
ComparisonReport compare_with_amplitude_model(const ChainGeometry& geom, const std::vector<double>& detunings,
                                              const ChiralCoupling& coupling, const std::vector<double>& rabis);

} // namespace chiral
