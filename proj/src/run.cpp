#include "chiral/run.hpp"

#include <chrono>
#include <ctime>

#include "chiral/dynamics.hpp"
#include "chiral/errors.hpp"
#include "chiral/geometry.hpp"
#include "chiral/interaction.hpp"
#include "chiral/lindblad.hpp"

namespace chiral {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Cell count_cell(std::size_t v) { return static_cast<std::int64_t>(v); }

std::vector<std::size_t> atoms_axis(const RunConfig& c) {
    return c.n_atoms_grid.empty() ? std::vector<std::size_t>{c.n_atoms} : c.n_atoms_grid;
}

struct ModeResult {
    Table table;
    std::size_t undefined = 0;
    json extra = json::object();
};

ModeResult run_sweep(const RunConfig& c) {
    const auto rows = sweep(grid_from_config(c), c.rabi, c.threads);
    ModeResult r;
    r.table = sweep_table(rows);
    for (const auto& row : rows)
        if (!row.defined()) ++r.undefined;
    return r;
}

ModeResult run_fluctuate(const RunConfig& c) {
    const auto rows = fluctuation_sweep(grid_from_config(c), c.fluctuation, c.samples, c.seed, c.rabi, c.threads);
    ModeResult r;
    r.table = fluctuation_table(rows);
    std::size_t undefined_samples = 0;
    for (const auto& row : rows) {
        if (row.samples == 0) ++r.undefined;
        undefined_samples += row.undefined;
    }
    r.extra["undefined_samples"] = undefined_samples;
    return r;
}

ModeResult run_simulate(const RunConfig& c) {
    std::optional<FluctuationSpec> fluct;
    if (c.fluctuation > 0.0) fluct = FluctuationSpec{c.fluctuation, c.seed};
    const ChainGeometry geom = build_geometry(c.n_atoms, c.xi, fluct);
    const DriveParams drive{c.rabi, c.detunings()};
    const InteractionMatrix v = build_interaction_matrix(geom, drive, c.coupling());
    const Trajectory traj = evolve(v, c.rabi, c.t_final, c.time_steps);

    ModeResult r;
    r.table.columns = {"t"};
    for (std::size_t mu = 1; mu <= c.n_atoms; ++mu) r.table.columns.push_back("P_" + std::to_string(mu));
    r.table.columns.push_back("total_population");
    r.table.columns.push_back("flags");
    for (const auto& state : traj) {
        const ValidityReport rep = validity_check(state);
        std::vector<Cell> row{state.time};
        for (Eigen::Index mu = 0; mu < state.amplitudes.size(); ++mu) row.emplace_back(std::norm(state.amplitudes[mu]));
        row.emplace_back(rep.total_population);
        row.emplace_back(rep.flags());
        r.table.rows.push_back(std::move(row));
    }

    json steady = json::object();
    steady["positions"] = geom.positions();
    try {
        const SteadyStateSolution sol = steady_state(v, c.rabi);
        const RVector pops = sol.amplitudes.cwiseAbs2();
        const ValidityReport rep = validity_check(sol);
        steady["populations"] = std::vector<double>(pops.data(), pops.data() + pops.size());
        steady["residual"] = sol.residual;
        steady["smallest_singular_value"] = sol.smallest_singular_value;
        steady["slowest_decay_rate"] = sol.slowest_decay_rate;
        steady["flags"] = rep.flags();
        if (c.n_atoms >= 2) steady["Tp"] = transport_metric(pops);
    } catch (const NoSteadyState& e) {
        steady["undefined"] = e.what();
        r.undefined = 1;
    }
    r.extra["steady_state"] = steady;
    return r;
}

ModeResult run_validate(const RunConfig& c) {
    std::optional<FluctuationSpec> fluct;
    if (c.fluctuation > 0.0) fluct = FluctuationSpec{c.fluctuation, c.seed};
    const ChainGeometry geom = build_geometry(c.n_atoms, c.xi, fluct);
    const ComparisonReport report = compare_with_amplitude_model(geom, c.detunings(), c.coupling(), c.rabi_list);

    ModeResult r;
    r.table.columns = {"rabi", "max_relative_discrepancy", "Tp_amplitude", "Tp_lindblad"};
    for (const auto& row : report.rows) {
        std::vector<Cell> cells{row.rabi, row.max_relative_discrepancy};
        if (c.n_atoms >= 2) {
            cells.emplace_back(row.tp_amplitude);
            cells.emplace_back(row.tp_lindblad);
        } else {
            cells.emplace_back(std::monostate{});
            cells.emplace_back(std::monostate{});
        }
        r.table.rows.push_back(std::move(cells));
    }
    r.extra["scaling_exponent"] = report.scaling_exponent;
    return r;
}

} // namespace

std::filesystem::path metadata_path_for(const std::filesystem::path& out) {
    return std::filesystem::path(out.string() + ".meta.json");
}

Table sweep_table(const std::vector<TransportResult>& rows) {
    Table t;
    t.columns = {"N", "xi", "delta", "D", "Tp", "total_population", "flags"};
    for (const auto& r : rows) {
        std::vector<Cell> cells{count_cell(r.point.n_atoms), r.point.xi, r.point.delta, r.point.directionality};
        if (r.defined()) {
            cells.emplace_back(*r.tp);
            cells.emplace_back(r.total_population());
        } else {
            cells.emplace_back(std::monostate{});
            cells.emplace_back(std::monostate{});
        }
        cells.emplace_back(r.flags());
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table fluctuation_table(const std::vector<EnsembleStats>& rows) {
    Table t;
    t.columns = {"N", "xi", "delta", "D", "fluctuation", "samples", "undefined", "Tp_mean", "Tp_std", "flags"};
    for (const auto& r : rows) {
        std::vector<Cell> cells{count_cell(r.point.n_atoms), r.point.xi, r.point.delta, r.point.directionality,
                                r.fraction, count_cell(r.samples), count_cell(r.undefined)};
        if (r.samples > 0) {
            cells.emplace_back(r.mean);
            cells.emplace_back(r.stddev);
            cells.emplace_back(std::string(r.undefined > 0 ? "partial" : "ok"));
        } else {
            cells.emplace_back(std::monostate{});
            cells.emplace_back(std::monostate{});
            cells.emplace_back(std::string("undefined:all_samples"));
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

SweepGrid grid_from_config(const RunConfig& c) {
    if (c.delta.size() != 1) throw ConfigError("sweeps use uniform detunings; give delta as a scalar or use delta_grid");
    SweepGrid g;
    g.xi = c.xi_grid ? linspace(c.xi_grid->start, c.xi_grid->stop, c.xi_grid->count) : std::vector<double>{c.xi};
    g.delta = c.delta_grid.empty() ? c.delta : c.delta_grid;
    g.directionality = c.directionality_grid.empty() ? std::vector<double>{c.directionality()} : c.directionality_grid;
    g.n_atoms = atoms_axis(c);
    g.validate();
    return g;
}

RunOutcome run(const RunConfig& config) {
    ModeResult result;
    switch (config.mode) {
    case Mode::sweep: result = run_sweep(config); break;
    case Mode::fluctuate: result = run_fluctuate(config); break;
    case Mode::simulate: result = run_simulate(config); break;
    case Mode::validate: result = run_validate(config); break;
    }

    RunOutcome outcome;
    outcome.rows = result.table.rows.size();
    outcome.undefined = result.undefined;
    outcome.table_path = config.out;
    outcome.metadata_path = metadata_path_for(config.out);

    const bool total_failure = config.mode != Mode::simulate && outcome.rows > 0 && outcome.undefined == outcome.rows;
    if (total_failure) {
        outcome.exit_code = kExitTotalFailure;
        outcome.warnings.push_back("every result row is undefined");
    } else if (outcome.undefined > 0) {
        outcome.warnings.push_back(std::to_string(outcome.undefined) + " undefined point(s); see the flags column");
    }

    if (config.format == OutputFormat::csv) write_text_file(outcome.table_path, to_csv(result.table));
    else write_text_file(outcome.table_path, to_json(result.table).dump(2) + "\n");

    json meta = json::object();
    meta["schema_version"] = kSchemaVersion;
    meta["library_version"] = kLibraryVersion;
    meta["mode"] = to_string(config.mode);
    meta["config"] = to_json(config);
    meta["seed"] = config.seed;
    meta["columns"] = result.table.columns;
    meta["rows"] = outcome.rows;
    meta["undefined_points"] = outcome.undefined;
    meta["warning"] = outcome.warnings.empty() ? json(nullptr) : json(outcome.warnings);
    meta["timestamp"] = utc_timestamp();
    meta["results"] = result.extra;
    write_text_file(outcome.metadata_path, meta.dump(2) + "\n");
    return outcome;
}

} // namespace chiral
