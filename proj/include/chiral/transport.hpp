#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/types.hpp"

namespace chiral {

/// Left-minus-right steady-state population imbalance, normalized by the
/// total population. For odd N the central atom is left out of the numerator
/// but kept in the denominator.
double transport_metric(std::span<const double> populations);
double transport_metric(const RVector& populations);

/// Closed-form N = 2 transport (gamma = 1).
double two_atom_transport(double delta1, double delta2, double gamma_left, double xi);

/// One point of a uniform-detuning chain.
struct SweepPoint {
    std::size_t n_atoms = 2;
    double xi = 0.0;
    double delta = 0.0;
    double directionality = 1.0;
};

struct TransportResult {
    SweepPoint point;
    std::optional<double> tp;     ///< empty when the point is undefined
    RVector populations;          ///< P_mu(inf); empty when undefined
    ValidityReport validity;
    std::string undefined_reason; ///< e.g. "no_steady_state"

    bool defined() const noexcept { return tp.has_value(); }
    double total_population() const { return populations.size() ? populations.sum() : 0.0; }
    /// "undefined:<reason>" or the validity flags.
    std::string flags() const;
};

/// Full pipeline for an explicit geometry and drive.
TransportResult evaluate_transport(const ChainGeometry& geom, const DriveParams& drive, const ChiralCoupling& coupling);

/// Full pipeline for an equidistant (or disordered) uniform-detuning chain.
TransportResult evaluate_point(const SweepPoint& point, double rabi,
                               const std::optional<FluctuationSpec>& fluct = std::nullopt);

/// Cartesian grid; iteration order is N (outermost), D, delta, xi (innermost).
struct SweepGrid {
    std::vector<double> xi;
    std::vector<double> delta;
    std::vector<double> directionality;
    std::vector<std::size_t> n_atoms;

    void validate() const;
    std::size_t size() const noexcept { return xi.size() * delta.size() * directionality.size() * n_atoms.size(); }
    SweepPoint at(std::size_t index) const;
};

/// count points evenly spaced on [start, stop] inclusive.
std::vector<double> linspace(double start, double stop, std::size_t count);

/// Evaluates every grid point; failures are recorded per row.
std::vector<TransportResult> sweep(const SweepGrid& grid, double rabi, unsigned threads = 0);

struct EnsembleStats {
    SweepPoint point;
    double fraction = 0.0;
    double mean = 0.0;
    double stddev = 0.0;            ///< sample standard deviation (n - 1)
    std::size_t samples = 0;        ///< defined samples entering the moments
    std::size_t undefined = 0;
    std::uint64_t base_seed = 0;
};

/// Seed of sample `index` in an ensemble rooted at `base_seed`.
std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index);
/// Ensemble root seed of grid point `index` in a fluctuation sweep.
std::uint64_t grid_point_seed(std::uint64_t base_seed, std::size_t index);

/// Draws n_samples disordered chains (seeds derived from fluct.seed) and
/// returns mean and standard deviation of T_p over the defined samples.
EnsembleStats fluctuation_ensemble(const SweepPoint& point, const FluctuationSpec& fluct, std::size_t n_samples,
                                   double rabi, unsigned threads = 0);

/// Independent ensembles for every grid point (disorder resampled per point).
std::vector<EnsembleStats> fluctuation_sweep(const SweepGrid& grid, double fraction, std::size_t n_samples,
                                             std::uint64_t base_seed, double rabi, unsigned threads = 0);

} // namespace chiral
