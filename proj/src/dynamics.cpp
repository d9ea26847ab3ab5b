#include "chiral/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "chiral/errors.hpp"
#include "chiral/interaction.hpp"

namespace chiral {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<cplx>;

struct AmplitudeRhs {
    const CMatrix& v;
    cplx drive;

    void operator()(const State& a, State& dadt, double /*t*/) const {
        const auto n = v.rows();
        Eigen::Map<const CVector> am(a.data(), n);
        Eigen::Map<CVector> dm(dadt.data(), n);
        dm.noalias() = v * am;
        dm.array() += drive;
    }
};

struct StepLimiter {
    std::size_t limit;
    std::size_t count = 0;
};

} // namespace

Trajectory evolve(const InteractionMatrix& v, double rabi, double t_final, std::size_t n_steps,
                  const EvolveOptions& opts) {
    if (!(t_final > 0.0)) throw InvalidInput("t_final must be positive");
    if (n_steps < 1) throw InvalidInput("n_steps must be >= 1");

    const auto n = static_cast<std::size_t>(v.size());
    std::vector<double> times(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) times[k] = t_final * static_cast<double>(k) / static_cast<double>(n_steps);
    times.back() = t_final;

    Trajectory out;
    out.reserve(n_steps + 1);
    State a(n, cplx(0.0, 0.0));
    AmplitudeRhs rhs{v.entries, cplx(0.0, rabi)};

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opts.abs_tol, opts.rel_tol);
    auto observer = [&](const State& s, double t) {
        AmplitudeState st{CVector(static_cast<Eigen::Index>(n)), t};
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s[i].real()) || !std::isfinite(s[i].imag())) {
                std::ostringstream msg;
                msg << "non-finite amplitude for atom " << i + 1 << " at t = " << t;
                throw IntegrationFailure(msg.str());
            }
            st.amplitudes[static_cast<Eigen::Index>(i)] = s[i];
        }
        out.push_back(std::move(st));
    };

    const double dt0 = std::min(1e-2, t_final / static_cast<double>(n_steps));
    try {
        odeint::integrate_times(stepper, std::ref(rhs), a, times.begin(), times.end(), dt0, observer,
                                odeint::max_step_checker(static_cast<int>(std::min<std::size_t>(opts.max_steps, 2'000'000'000))));
    } catch (const odeint::step_adjustment_error& e) {
        throw IntegrationFailure(std::string("step size underflow: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        throw IntegrationFailure(std::string("integration stalled: ") + e.what());
    } catch (const std::overflow_error& e) {
        throw IntegrationFailure(std::string("too many integration steps: ") + e.what());
    }
    if (out.size() != n_steps + 1) throw IntegrationFailure("integrator did not reach t_final");
    return out;
}

double slowest_decay_rate(const InteractionMatrix& v) {
    Eigen::ComplexEigenSolver<CMatrix> es(v.entries, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    return -es.eigenvalues().real().maxCoeff();
}

SteadyStateSolution steady_state(const InteractionMatrix& v, double rabi, const SteadyStateOptions& opts) {
    const auto n = v.size();
    if (n < 1) throw InvalidInput("empty interaction matrix");

    Eigen::BDCSVD<CMatrix> svd(v.entries);
    const auto& sv = svd.singularValues();
    const double norm = sv(0);
    const double smin = sv(n - 1);
    if (!(smin > opts.singular_threshold * norm)) {
        std::ostringstream msg;
        msg << "no steady state: V is singular (sigma_min = " << smin << ", ||V|| = " << norm
            << "); the driven mode is decoherence-free and is pumped indefinitely";
        throw NoSteadyState(msg.str(), smin);
    }

    const CVector rhs = CVector::Constant(n, cplx(0.0, -rabi));
    SteadyStateSolution sol;
    sol.amplitudes = v.entries.partialPivLu().solve(rhs);
    sol.residual = (v.entries * sol.amplitudes - rhs).norm();
    sol.smallest_singular_value = smin;
    sol.norm = norm;
    sol.slowest_decay_rate = slowest_decay_rate(v);

    const double scale = norm * sol.amplitudes.norm() + std::abs(rabi) * std::sqrt(static_cast<double>(n));
    if (!(sol.residual <= opts.residual_tolerance * scale) && scale > 0.0) {
        std::ostringstream msg;
        msg << "steady-state residual " << sol.residual << " exceeds tolerance (sigma_min = " << smin << ")";
        throw NoSteadyState(msg.str(), smin);
    }
    return sol;
}

cplx two_atom_denominator(double delta1, double delta2, double gamma_left, double xi) {
    const cplx a(-0.5, delta1);
    const cplx d(-0.5, delta2);
    return a * d - (1.0 - gamma_left) * gamma_left * propagation_phase(2.0 * xi);
}

std::pair<cplx, cplx> two_atom_steady(double delta1, double delta2, double gamma_left, double xi, double rabi) {
    if (!(gamma_left >= 0.0 && gamma_left <= 1.0)) throw InvalidInput("gamma_L must lie in [0, 1]");
    const cplx den = two_atom_denominator(delta1, delta2, gamma_left, xi);
    if (std::abs(den) <= 1e-14) throw NoSteadyState("two-atom denominator vanishes", std::abs(den));

    const cplx phase = propagation_phase(xi);
    const cplx drive(0.0, -rabi);
    const cplx a1 = drive * (cplx(-0.5, delta2) + gamma_left * phase) / den;
    const cplx a2 = drive * (cplx(-0.5, delta1) + (1.0 - gamma_left) * phase) / den;
    return {a1, a2};
}

std::string ValidityReport::flags() const {
    std::string out;
    auto add = [&](const char* tok) {
        if (!out.empty()) out += '|';
        out += tok;
    };
    if (saturation == Saturation::warn) add("weak_drive_warn");
    if (saturation == Saturation::error) add("weak_drive_error");
    if (slow_relaxation) add("slow_relaxation");
    return out.empty() ? "ok" : out;
}

ValidityReport validity_check(const CVector& amplitudes) {
    ValidityReport r;
    if (amplitudes.size() > 0) {
        const RVector pops = amplitudes.cwiseAbs2();
        r.max_population = pops.maxCoeff();
        r.total_population = pops.sum();
    }
    if (r.max_population > kSaturationError)
        r.saturation = Saturation::error;
    else if (r.max_population > kSaturationWarn)
        r.saturation = Saturation::warn;
    return r;
}

ValidityReport validity_check(const AmplitudeState& state) { return validity_check(state.amplitudes); }

ValidityReport validity_check(const SteadyStateSolution& solution) {
    ValidityReport r = validity_check(solution.amplitudes);
    r.slow_relaxation = solution.slowest_decay_rate < kSlowRelaxationRate;
    return r;
}

} // namespace chiral
