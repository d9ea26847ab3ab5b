#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiral/types.hpp"

namespace chiral {

enum class Mode { simulate, sweep, fluctuate, validate };
enum class OutputFormat { csv, json };

std::string to_string(Mode mode);
std::string to_string(OutputFormat format);

struct XiGrid {
    double start = 0.0;
    double stop = kTwoPi;
    std::size_t count = 401;
    bool operator==(const XiGrid&) const = default;
};

/// Fully resolved run configuration shared by every subcommand.
struct RunConfig {
    Mode mode = Mode::sweep;

    std::size_t n_atoms = 10;
    double xi = kPi;
    /// One entry: uniform detuning. n_atoms entries: per-atom detunings.
    std::vector<double> delta{0.0};
    /// Exactly one of (D, gamma_L) is stored as given; the other is derived.
    bool coupling_from_gamma_left = false;
    double coupling_value = 1.0;
    double rabi = 0.01;

    std::optional<XiGrid> xi_grid;
    std::vector<double> delta_grid;
    std::vector<double> directionality_grid;
    std::vector<std::size_t> n_atoms_grid;

    double fluctuation = 0.0;
    std::size_t samples = 200;
    std::uint64_t seed = 0;

    double t_final = 50.0;
    std::size_t time_steps = 500;
    std::vector<double> rabi_list{1e-3, 1e-2, 1e-1};

    unsigned threads = 0;
    std::string out = "chiral_out.csv";
    OutputFormat format = OutputFormat::csv;

    bool operator==(const RunConfig&) const = default;

    ChiralCoupling coupling() const {
        return coupling_from_gamma_left ? ChiralCoupling::from_gamma_left(coupling_value)
                                        : ChiralCoupling::from_directionality(coupling_value);
    }
    double directionality() const { return coupling().directionality(); }
    double gamma_left() const { return coupling().gamma_left(); }
    /// Detunings expanded to n_atoms entries.
    std::vector<double> detunings() const;
};

/// Raw string values keyed by config key (e.g. "n_atoms"), as read from flags or env.
using RawLayer = std::map<std::string, std::string>;

inline constexpr const char* kEnvPrefix = "CHIRAL_";

/// Every accepted config key, in canonical order.
const std::vector<std::string>& config_keys();

/// Reads CHIRAL_<KEY> environment variables for every known key.
RawLayer env_layer();

/// Merges file < env < flags and validates. Within one layer, setting both
/// directionality and gamma_l is an error; a higher layer setting either one
/// replaces the pair from lower layers.
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const RawLayer& env, const RawLayer& flags);
RunConfig parse_config(const nlohmann::json& doc);

nlohmann::json to_json(const RunConfig& config);

/// Parses a real number, also accepting multiples of pi: "pi", "2pi", "0.5*pi", "pi/2", "3*pi/4".
double parse_real(const std::string& text);

} // namespace chiral
