#include "chiral/lindblad.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "chiral/dynamics.hpp"
#include "chiral/errors.hpp"
#include "chiral/interaction.hpp"
#include "chiral/transport.hpp"

namespace chiral {

namespace odeint = boost::numeric::odeint;

DensityMatrix DensityMatrix::ground(std::size_t n_atoms) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_atoms);
    DensityMatrix out{CMatrix::Zero(d, d), n_atoms};
    out.rho(0, 0) = 1.0;
    return out;
}

double DensityMatrix::trace_error() const { return std::abs(rho.trace() - cplx(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

RVector DensityMatrix::populations() const {
    RVector pops = RVector::Zero(static_cast<Eigen::Index>(n_atoms));
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (std::size_t mu = 0; mu < n_atoms; ++mu)
            if ((static_cast<std::size_t>(i) >> mu) & 1U) pops[static_cast<Eigen::Index>(mu)] += rho(i, i).real();
    return pops;
}

SpMatrix lowering_operator(std::size_t n_atoms, std::size_t mu) {
    const std::size_t d = std::size_t{1} << n_atoms;
    const std::size_t bit = std::size_t{1} << mu;
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(d / 2);
    for (std::size_t i = 0; i < d; ++i)
        if (i & bit) entries.emplace_back(static_cast<int>(i & ~bit), static_cast<int>(i), cplx(1.0, 0.0));
    SpMatrix op(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

Liouvillian::Liouvillian(std::size_t n_atoms, SpMatrix hamiltonian, std::vector<Channel> channels)
    : n_atoms_(n_atoms), hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
    effective_ = hamiltonian_;
    for (const auto& ch : channels_) {
        SpMatrix cdc = SpMatrix(ch.jump.adjoint()) * ch.jump;
        effective_ -= cplx(0.0, 0.5 * ch.rate) * cdc;
    }
    effective_.makeCompressed();
}

CMatrix Liouvillian::apply(const CMatrix& rho) const {
    CMatrix out = cplx(0.0, -1.0) * (effective_ * rho);
    out += cplx(0.0, 1.0) * (rho * SpMatrix(effective_.adjoint()));
    for (const auto& ch : channels_) {
        const CMatrix c_rho = ch.jump * rho;
        out += ch.rate * (c_rho * SpMatrix(ch.jump.adjoint()));
    }
    return out;
}

CMatrix Liouvillian::superoperator() const {
    const auto d = static_cast<Eigen::Index>(dimension());
    CMatrix super(d * d, d * d);
    CMatrix basis = CMatrix::Zero(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
        for (Eigen::Index row = 0; row < d; ++row) {
            basis(row, col) = 1.0;
            const CMatrix image = apply(basis);
            super.col(col * d + row) = Eigen::Map<const CVector>(image.data(), d * d);
            basis(row, col) = 0.0;
        }
    }
    return super;
}

Liouvillian build_liouvillian(const ChainGeometry& geom, const DriveParams& drive, const ChiralCoupling& coupling) {
    const std::size_t n = geom.size();
    if (n > kMaxOracleAtoms) {
        std::ostringstream msg;
        msg << "master-equation oracle supports at most " << kMaxOracleAtoms << " atoms (got " << n
            << "); use the amplitude model for longer chains";
        throw InvalidInput(msg.str());
    }
    if (drive.detunings.size() != n) throw InvalidInput("detunings length must equal the number of atoms");

    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    std::vector<SpMatrix> lower;
    lower.reserve(n);
    for (std::size_t mu = 0; mu < n; ++mu) lower.push_back(lowering_operator(n, mu));

    SpMatrix h(d, d);
    for (std::size_t mu = 0; mu < n; ++mu) {
        const SpMatrix raise = lower[mu].adjoint();
        h += drive.rabi * (lower[mu] + raise);
        h -= drive.detunings[mu] * SpMatrix(raise * lower[mu]);
    }
    // Coherent exchange: gamma_L couples pairs mu < nu, gamma_R pairs mu > nu.
    for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = 0; nu < n; ++nu) {
            if (mu == nu) continue;
            const double rate = mu < nu ? coupling.gamma_left() : coupling.gamma_right();
            const cplx phase = propagation_phase(geom.separation(mu, nu));
            const SpMatrix hop = phase * SpMatrix(SpMatrix(lower[mu].adjoint()) * lower[nu]);
            h += cplx(0.0, -0.5 * rate) * SpMatrix(hop - SpMatrix(hop.adjoint()));
        }
    }

    SpMatrix jump_left(d, d);
    SpMatrix jump_right(d, d);
    for (std::size_t nu = 0; nu < n; ++nu) {
        const cplx phase = propagation_phase(geom[nu]);
        jump_left += phase * lower[nu];
        jump_right += std::conj(phase) * lower[nu];
    }
    h.makeCompressed();
    std::vector<Liouvillian::Channel> channels;
    channels.push_back({coupling.gamma_left(), jump_left});
    channels.push_back({coupling.gamma_right(), jump_right});
    return Liouvillian(n, std::move(h), std::move(channels));
}

CMatrix single_excitation_block(const Liouvillian& liouvillian) {
    const auto n = static_cast<Eigen::Index>(liouvillian.n_atoms());
    const auto d = static_cast<Eigen::Index>(liouvillian.dimension());
    CMatrix block(n, n);
    CMatrix rho = CMatrix::Zero(d, d);
    for (Eigen::Index nu = 0; nu < n; ++nu) {
        const Eigen::Index e_nu = Eigen::Index{1} << nu;
        rho(e_nu, 0) = 1.0;
        const CMatrix image = liouvillian.apply(rho);
        for (Eigen::Index mu = 0; mu < n; ++mu) block(mu, nu) = image(Eigen::Index{1} << mu, 0);
        rho(e_nu, 0) = 0.0;
    }
    return block;
}

namespace {

using FlatState = std::vector<cplx>;

struct DensityRhs {
    const Liouvillian& generator;
    Eigen::Index dim;

    void operator()(const FlatState& x, FlatState& dxdt, double /*t*/) const {
        Eigen::Map<const CMatrix> rho(x.data(), dim, dim);
        Eigen::Map<CMatrix> out(dxdt.data(), dim, dim);
        out = generator.apply(rho);
    }
};

FlatState flatten(const CMatrix& m) { return FlatState(m.data(), m.data() + m.size()); }

CMatrix unflatten(const FlatState& x, Eigen::Index dim) { return Eigen::Map<const CMatrix>(x.data(), dim, dim); }

void check_physical(const DensityMatrix& dm, double t, const DensityEvolveOptions& opts) {
    const double allowed = opts.drift_per_time * std::max(1.0, t);
    std::ostringstream msg;
    if (!dm.rho.allFinite()) msg << "non-finite density matrix";
    else if (dm.trace_error() > allowed) msg << "trace drift " << dm.trace_error();
    else if (dm.hermiticity_error() > allowed) msg << "Hermiticity drift " << dm.hermiticity_error();
    else if (dm.min_eigenvalue() < -opts.positivity_tol) msg << "negative eigenvalue " << dm.min_eigenvalue();
    else return;
    msg << " at t = " << t;
    throw IntegrationFailure(msg.str());
}

} // namespace

std::vector<std::pair<double, DensityMatrix>> evolve_dm(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                                                        double t_final, std::size_t n_steps,
                                                        const DensityEvolveOptions& opts) {
    if (!(t_final > 0.0)) throw InvalidInput("t_final must be positive");
    if (n_steps < 1) throw InvalidInput("n_steps must be >= 1");
    if (rho0.n_atoms != liouvillian.n_atoms()) throw InvalidInput("initial state has the wrong number of atoms");

    const auto d = static_cast<Eigen::Index>(liouvillian.dimension());
    std::vector<double> times(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) times[k] = t_final * static_cast<double>(k) / static_cast<double>(n_steps);
    times.back() = t_final;

    std::vector<std::pair<double, DensityMatrix>> out;
    out.reserve(n_steps + 1);
    FlatState x = flatten(rho0.rho);
    DensityRhs rhs{liouvillian, d};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<FlatState>>(opts.abs_tol, opts.rel_tol);
    auto observer = [&](const FlatState& s, double t) {
        DensityMatrix dm{unflatten(s, d), liouvillian.n_atoms()};
        check_physical(dm, t, opts);
        out.emplace_back(t, std::move(dm));
    };
    try {
        odeint::integrate_times(stepper, std::ref(rhs), x, times.begin(), times.end(),
                                std::min(1e-2, t_final / static_cast<double>(n_steps)), observer);
    } catch (const odeint::step_adjustment_error& e) {
        throw IntegrationFailure(std::string("step size underflow: ") + e.what());
    } catch (const std::overflow_error& e) {
        throw IntegrationFailure(std::string("too many integration steps: ") + e.what());
    }
    return out;
}

namespace {

DensityMatrix null_space_steady_state(const Liouvillian& liouvillian, const DensitySteadyOptions& opts) {
    const auto d = static_cast<Eigen::Index>(liouvillian.dimension());
    CMatrix system = liouvillian.superoperator();
    // The trace functional annihilates the range of L, so the rho_00 row is
    // redundant and can carry the normalization instead.
    system.row(0).setZero();
    for (Eigen::Index k = 0; k < d; ++k) system(0, k * d + k) = 1.0;
    CVector rhs = CVector::Zero(d * d);
    rhs(0) = 1.0;

    const Eigen::PartialPivLU<CMatrix> lu(system);
    const double rcond = lu.rcond();
    if (!(rcond > opts.degeneracy_rcond)) {
        std::ostringstream msg;
        msg << "stationary state is not unique (rcond = " << rcond
            << "); the generator has a degenerate null space, e.g. a decoherence-free subspace";
        throw NoUniqueSteadyState(msg.str());
    }
    const CVector solution = lu.solve(rhs);
    CMatrix rho = Eigen::Map<const CMatrix>(solution.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix{rho, liouvillian.n_atoms()};
}

DensityMatrix integrated_steady_state(const Liouvillian& liouvillian, const DensitySteadyOptions& opts) {
    const auto d = static_cast<Eigen::Index>(liouvillian.dimension());
    FlatState x = flatten(DensityMatrix::ground(liouvillian.n_atoms()).rho);
    DensityRhs rhs{liouvillian, d};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<FlatState>>(1e-13, 1e-11);
    constexpr double chunk = 10.0;
    double t = 0.0;
    while (t < opts.max_time) {
        odeint::integrate_adaptive(stepper, std::ref(rhs), x, t, t + chunk, 1e-2);
        t += chunk;
        const CMatrix rho = unflatten(x, d);
        if (liouvillian.apply(rho).norm() < opts.stationarity_tol) {
            return DensityMatrix{0.5 * (rho + rho.adjoint()), liouvillian.n_atoms()};
        }
    }
    throw NoUniqueSteadyState("no stationary state reached by t = " + std::to_string(opts.max_time));
}

} // namespace

DensityMatrix steady_state_dm(const Liouvillian& liouvillian, const DensitySteadyOptions& opts) {
    if (liouvillian.n_atoms() <= kMaxNullSpaceAtoms) return null_space_steady_state(liouvillian, opts);
    return integrated_steady_state(liouvillian, opts);
}

ComparisonReport compare_with_amplitude_model(const ChainGeometry& geom, const std::vector<double>& detunings,
                                              const ChiralCoupling& coupling, const std::vector<double>& rabis) {
    if (rabis.size() < 2) throw InvalidInput("need at least two rabi values");
    double lo = rabis.front();
    double hi = rabis.front();
    for (double r : rabis) {
        if (!(r > 0.0)) throw InvalidInput("rabi values must be positive");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (hi < 10.0 * lo * (1.0 - 1e-12)) throw InvalidInput("rabi values must span at least one decade");

    ComparisonReport report;
    for (double rabi : rabis) {
        const DriveParams drive{rabi, detunings};
        const SteadyStateSolution amp = steady_state(build_interaction_matrix(geom, drive, coupling), rabi);
        const DensityMatrix dm = steady_state_dm(build_liouvillian(geom, drive, coupling));

        ComparisonRow row;
        row.rabi = rabi;
        row.populations_amplitude = amp.amplitudes.cwiseAbs2();
        row.populations_lindblad = dm.populations();
        row.max_relative_discrepancy =
            ((row.populations_lindblad - row.populations_amplitude).cwiseAbs().array() /
             row.populations_amplitude.array()).maxCoeff();
        if (geom.size() >= 2) {
            row.tp_amplitude = transport_metric(row.populations_amplitude);
            row.tp_lindblad = transport_metric(row.populations_lindblad);
        }
        report.rows.push_back(std::move(row));
    }

    // Least-squares slope in log-log space.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(report.rows.size());
    for (const auto& row : report.rows) {
        const double lx = std::log(row.rabi);
        const double ly = std::log(row.max_relative_discrepancy);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    report.scaling_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return report;
}

} // namespace chiral
