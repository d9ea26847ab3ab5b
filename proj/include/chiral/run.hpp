#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chiral/config.hpp"
#include "chiral/output.hpp"
#include "chiral/transport.hpp"

namespace chiral {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTotalFailure = 3;

struct RunOutcome {
    int exit_code = kExitOk;
    std::size_t rows = 0;
    std::size_t undefined = 0;
    std::filesystem::path table_path;
    std::filesystem::path metadata_path;
    std::vector<std::string> warnings;
};

/// Sidecar path for a result table: "<out>.meta.json".
std::filesystem::path metadata_path_for(const std::filesystem::path& out);

/// Columns: N, xi, delta, D, Tp, total_population, flags.
Table sweep_table(const std::vector<TransportResult>& rows);
/// Columns: N, xi, delta, D, fluctuation, samples, undefined, Tp_mean, Tp_std, flags.
Table fluctuation_table(const std::vector<EnsembleStats>& rows);

/// Sweep axes resolved from the config (single values when no grid is given).
SweepGrid grid_from_config(const RunConfig& config);

/// Executes the configured workflow and writes the table plus metadata sidecar.
RunOutcome run(const RunConfig& config);

} // namespace chiral
