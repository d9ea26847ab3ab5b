#include "chiral/transport.hpp"

#include <cmath>
#include <string>

#include "chiral/errors.hpp"
#include "chiral/geometry.hpp"
#include "chiral/interaction.hpp"
#include "chiral/parallel.hpp"
#include "chiral/seeding.hpp"

namespace chiral {

double transport_metric(std::span<const double> populations) {
    const std::size_t n = populations.size();
    if (n < 2) throw UndefinedMetric("T_p needs at least two atoms");

    double total = 0.0;
    for (double p : populations) total += p;
    if (!(total > 0.0)) throw UndefinedMetric("T_p is undefined for zero total population");

    // Zero-based: even N splits at n/2; odd N skips the central atom (n-1)/2.
    const std::size_t left_end = n / 2;
    const std::size_t right_begin = (n % 2 == 0) ? n / 2 : n / 2 + 1;
    double left = 0.0;
    double right = 0.0;
    for (std::size_t mu = 0; mu < left_end; ++mu) left += populations[mu];
    for (std::size_t mu = right_begin; mu < n; ++mu) right += populations[mu];
    return (left - right) / total;
}

double transport_metric(const RVector& populations) {
    return transport_metric(std::span<const double>(populations.data(), static_cast<std::size_t>(populations.size())));
}

double two_atom_transport(double delta1, double delta2, double gamma_left, double xi) {
    if (!(gamma_left >= 0.0 && gamma_left <= 1.0)) throw InvalidInput("gamma_L must lie in [0, 1]");
    const cplx den = two_atom_denominator(delta1, delta2, gamma_left, xi);
    if (std::abs(den) <= 1e-14) throw NoSteadyState("two-atom denominator vanishes", std::abs(den));

    const cplx phase = propagation_phase(xi);
    const double left = std::norm(cplx(-0.5, delta2) + gamma_left * phase);
    const double right = std::norm(cplx(-0.5, delta1) + (1.0 - gamma_left) * phase);
    if (!(left + right > 0.0)) throw UndefinedMetric("both two-atom populations vanish");
    return (left - right) / (left + right);
}

std::string TransportResult::flags() const {
    if (!defined()) return "undefined:" + undefined_reason;
    return validity.flags();
}

TransportResult evaluate_transport(const ChainGeometry& geom, const DriveParams& drive, const ChiralCoupling& coupling) {
    TransportResult r;
    r.point.n_atoms = geom.size();
    r.point.directionality = coupling.directionality();
    try {
        const InteractionMatrix v = build_interaction_matrix(geom, drive, coupling);
        const SteadyStateSolution sol = steady_state(v, drive.rabi);
        r.validity = validity_check(sol);
        r.populations = sol.amplitudes.cwiseAbs2();
        r.tp = transport_metric(r.populations);
    } catch (const NoSteadyState&) {
        r.undefined_reason = "no_steady_state";
        r.populations.resize(0);
        r.tp.reset();
    } catch (const UndefinedMetric&) {
        r.undefined_reason = "zero_population";
        r.tp.reset();
    }
    return r;
}

TransportResult evaluate_point(const SweepPoint& point, double rabi, const std::optional<FluctuationSpec>& fluct) {
    const ChainGeometry geom = build_geometry(point.n_atoms, point.xi, fluct);
    const DriveParams drive = DriveParams::uniform(point.n_atoms, point.delta, rabi);
    TransportResult r = evaluate_transport(geom, drive, ChiralCoupling::from_directionality(point.directionality));
    r.point = point;
    return r;
}

void SweepGrid::validate() const {
    if (xi.empty() || delta.empty() || directionality.empty() || n_atoms.empty())
        throw InvalidInput("sweep grid axes must be non-empty");
    for (double d : directionality)
        if (!(std::abs(d) <= 1.0)) throw InvalidInput("directionality must lie in [-1, 1]");
    for (auto n : n_atoms)
        if (n < 2) throw InvalidInput("transport sweeps need at least two atoms");
}

SweepPoint SweepGrid::at(std::size_t index) const {
    SweepPoint p;
    p.xi = xi[index % xi.size()];
    index /= xi.size();
    p.delta = delta[index % delta.size()];
    index /= delta.size();
    p.directionality = directionality[index % directionality.size()];
    index /= directionality.size();
    p.n_atoms = n_atoms.at(index);
    return p;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count == 0) throw InvalidInput("linspace needs at least one point");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

std::vector<TransportResult> sweep(const SweepGrid& grid, double rabi, unsigned threads) {
    grid.validate();
    std::vector<TransportResult> rows(grid.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) { rows[i] = evaluate_point(grid.at(i), rabi); });
    return rows;
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index) {
    return derive_seed(base_seed, static_cast<std::uint64_t>(index));
}

std::uint64_t grid_point_seed(std::uint64_t base_seed, std::size_t index) {
    return splitmix64(derive_seed(base_seed, static_cast<std::uint64_t>(index)));
}

EnsembleStats fluctuation_ensemble(const SweepPoint& point, const FluctuationSpec& fluct, std::size_t n_samples,
                                   double rabi, unsigned threads) {
    if (n_samples < 2) throw InvalidInput("an ensemble needs at least two samples");
    if (fluct.fraction < 0.0) throw InvalidInput("fluctuation fraction must be >= 0");

    std::vector<std::optional<double>> tp(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        const FluctuationSpec sample{fluct.fraction, sample_seed(fluct.seed, i)};
        tp[i] = evaluate_point(point, rabi, sample).tp;
    });

    EnsembleStats stats;
    stats.point = point;
    stats.fraction = fluct.fraction;
    stats.base_seed = fluct.seed;
    // Welford in sample order: identical samples give exactly zero spread.
    double mean = 0.0;
    double m2 = 0.0;
    for (const auto& value : tp) {
        if (!value) {
            ++stats.undefined;
            continue;
        }
        ++stats.samples;
        const double delta = *value - mean;
        mean += delta / static_cast<double>(stats.samples);
        m2 += delta * (*value - mean);
    }
    if (stats.samples == 0)
        throw UndefinedMetric("all " + std::to_string(n_samples) + " ensemble samples are undefined");
    stats.mean = mean;
    stats.stddev = stats.samples > 1 ? std::sqrt(m2 / static_cast<double>(stats.samples - 1)) : 0.0;
    return stats;
}

std::vector<EnsembleStats> fluctuation_sweep(const SweepGrid& grid, double fraction, std::size_t n_samples,
                                             std::uint64_t base_seed, double rabi, unsigned threads) {
    grid.validate();
    std::vector<EnsembleStats> rows(grid.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const SweepPoint point = grid.at(i);
        const FluctuationSpec fluct{fraction, grid_point_seed(base_seed, i)};
        try {
            rows[i] = fluctuation_ensemble(point, fluct, n_samples, rabi, 1);
        } catch (const UndefinedMetric&) {
            EnsembleStats empty;
            empty.point = point;
            empty.fraction = fraction;
            empty.base_seed = fluct.seed;
            empty.undefined = n_samples;
            rows[i] = empty;
        }
    });
    return rows;
}

} // namespace chiral
