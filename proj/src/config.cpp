#include "chiral/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chiral/errors.hpp"

namespace chiral {

using nlohmann::json;

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::fluctuate: return "fluctuate";
    case Mode::validate: return "validate";
    }
    return "?";
}

std::string to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

std::vector<double> RunConfig::detunings() const {
    if (delta.size() == 1) return std::vector<double>(n_atoms, delta.front());
    return delta;
}

namespace {

enum class Kind { real, count, seed, text, real_list, count_list, grid };

struct KeySpec {
    std::string name;
    Kind kind;
};

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        {"mode", Kind::text},          {"n_atoms", Kind::count},
        {"xi", Kind::real},            {"delta", Kind::real_list},
        {"directionality", Kind::real}, {"gamma_l", Kind::real},
        {"rabi", Kind::real},          {"xi_grid", Kind::grid},
        {"delta_grid", Kind::real_list}, {"directionality_grid", Kind::real_list},
        {"n_atoms_grid", Kind::count_list}, {"fluctuation", Kind::real},
        {"samples", Kind::count},      {"seed", Kind::seed},
        {"t_final", Kind::real},       {"time_steps", Kind::count},
        {"rabi_list", Kind::real_list}, {"threads", Kind::count},
        {"out", Kind::text},           {"format", Kind::text},
    };
    return specs;
}

const KeySpec& spec_for(const std::string& key) {
    for (const auto& s : key_specs())
        if (s.name == key) return s;
    throw ConfigError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (used != t.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("not a non-negative integer: '" + text + "'");
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ConfigError("integer out of range: '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

/// Converts a raw string into the JSON value used by the merged document.
json raw_to_json(const KeySpec& spec, const std::string& raw) {
    switch (spec.kind) {
    case Kind::real: return parse_real(raw);
    case Kind::count:
    case Kind::seed: return parse_unsigned(raw);
    case Kind::text: return trim(raw);
    case Kind::grid: return trim(raw);
    case Kind::real_list: {
        json arr = json::array();
        for (const auto& item : split(raw, ',')) arr.push_back(parse_real(item));
        return arr;
    }
    case Kind::count_list: {
        json arr = json::array();
        for (const auto& item : split(raw, ',')) arr.push_back(parse_unsigned(item));
        return arr;
    }
    }
    return nullptr;
}

double json_real(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(v.get<std::string>());
    throw ConfigError("'" + key + "' must be a number");
}

std::uint64_t json_unsigned(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) throw ConfigError("'" + key + "' must be non-negative");
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_string()) return parse_unsigned(v.get<std::string>());
    throw ConfigError("'" + key + "' must be a non-negative integer");
}

std::vector<double> json_real_list(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& item : v) out.push_back(json_real(item, key));
    } else if (v.is_string()) {
        for (const auto& item : split(v.get<std::string>(), ',')) out.push_back(parse_real(item));
    } else {
        out.push_back(json_real(v, key));
    }
    return out;
}

std::vector<std::size_t> json_count_list(const json& v, const std::string& key) {
    std::vector<std::size_t> out;
    if (v.is_array()) {
        for (const auto& item : v) out.push_back(static_cast<std::size_t>(json_unsigned(item, key)));
    } else if (v.is_string()) {
        for (const auto& item : split(v.get<std::string>(), ',')) out.push_back(static_cast<std::size_t>(parse_unsigned(item)));
    } else {
        out.push_back(static_cast<std::size_t>(json_unsigned(v, key)));
    }
    return out;
}

XiGrid json_grid(const json& v) {
    XiGrid g;
    if (v.is_string()) {
        const auto parts = split(v.get<std::string>(), ':');
        if (parts.size() != 3) throw ConfigError("xi_grid must look like start:stop:count");
        g.start = parse_real(parts[0]);
        g.stop = parse_real(parts[1]);
        g.count = static_cast<std::size_t>(parse_unsigned(parts[2]));
    } else if (v.is_object()) {
        for (const auto& [k, _] : v.items())
            if (k != "start" && k != "stop" && k != "count") throw ConfigError("unknown xi_grid field '" + k + "'");
        g.start = json_real(v.at("start"), "xi_grid.start");
        g.stop = json_real(v.at("stop"), "xi_grid.stop");
        g.count = static_cast<std::size_t>(json_unsigned(v.at("count"), "xi_grid.count"));
    } else {
        throw ConfigError("xi_grid must be a 'start:stop:count' string or an object");
    }
    if (g.count < 1) throw ConfigError("xi_grid count must be >= 1");
    return g;
}

void check_pair_exclusive(const json& layer, const std::string& source) {
    if (layer.contains("directionality") && layer.contains("gamma_l"))
        throw ConfigError(source + " sets both directionality and gamma_l; give exactly one");
}

void merge_layer(json& merged, const json& layer, const std::string& source) {
    check_pair_exclusive(layer, source);
    if (layer.contains("directionality")) merged.erase("gamma_l");
    if (layer.contains("gamma_l")) merged.erase("directionality");
    for (const auto& [k, v] : layer.items()) merged[k] = v;
}

json raw_layer_to_json(const RawLayer& raw) {
    json layer = json::object();
    for (const auto& [key, value] : raw) layer[key] = raw_to_json(spec_for(key), value);
    return layer;
}

} // namespace

double parse_real(const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto pos = t.find("pi");
    if (pos == std::string::npos) return parse_plain(t);

    std::string factor = trim(t.substr(0, pos));
    std::string rest = trim(t.substr(pos + 2));
    if (!factor.empty() && factor.back() == '*') factor = trim(factor.substr(0, factor.size() - 1));
    double value = kPi;
    if (factor == "-") value = -kPi;
    else if (!factor.empty()) value *= parse_plain(factor);
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError("cannot parse '" + text + "'");
        const double divisor = parse_plain(rest.substr(1));
        if (divisor == 0.0) throw ConfigError("division by zero in '" + text + "'");
        value /= divisor;
    }
    return value;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& s : key_specs()) out.push_back(s.name);
        return out;
    }();
    return keys;
}

RawLayer env_layer() {
    RawLayer out;
    for (const auto& key : config_keys()) {
        std::string name = kEnvPrefix;
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* value = std::getenv(name.c_str())) out[key] = value;
    }
    return out;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    check_pair_exclusive(doc, "config");
    for (const auto& [key, _] : doc.items()) spec_for(key);

    RunConfig c;
    auto has = [&](const char* key) { return doc.contains(key) && !doc.at(key).is_null(); };

    if (has("mode")) {
        const auto m = doc.at("mode").get<std::string>();
        if (m == "simulate") c.mode = Mode::simulate;
        else if (m == "sweep") c.mode = Mode::sweep;
        else if (m == "fluctuate") c.mode = Mode::fluctuate;
        else if (m == "validate") c.mode = Mode::validate;
        else throw ConfigError("unknown mode '" + m + "' (simulate|sweep|fluctuate|validate)");
    }
    if (has("n_atoms")) c.n_atoms = static_cast<std::size_t>(json_unsigned(doc.at("n_atoms"), "n_atoms"));
    if (has("xi")) c.xi = json_real(doc.at("xi"), "xi");
    if (has("delta")) c.delta = json_real_list(doc.at("delta"), "delta");
    if (has("gamma_l")) {
        c.coupling_from_gamma_left = true;
        c.coupling_value = json_real(doc.at("gamma_l"), "gamma_l");
        if (!(c.coupling_value >= 0.0 && c.coupling_value <= 1.0)) throw ConfigError("gamma_l must lie in [0, 1]");
    } else if (has("directionality")) {
        c.coupling_value = json_real(doc.at("directionality"), "directionality");
        if (!(std::abs(c.coupling_value) <= 1.0)) throw ConfigError("|directionality| must be <= 1");
    }
    if (has("rabi")) c.rabi = json_real(doc.at("rabi"), "rabi");
    if (has("xi_grid")) c.xi_grid = json_grid(doc.at("xi_grid"));
    if (has("delta_grid")) c.delta_grid = json_real_list(doc.at("delta_grid"), "delta_grid");
    if (has("directionality_grid"))
        c.directionality_grid = json_real_list(doc.at("directionality_grid"), "directionality_grid");
    if (has("n_atoms_grid")) c.n_atoms_grid = json_count_list(doc.at("n_atoms_grid"), "n_atoms_grid");
    if (has("fluctuation")) c.fluctuation = json_real(doc.at("fluctuation"), "fluctuation");
    if (has("samples")) c.samples = static_cast<std::size_t>(json_unsigned(doc.at("samples"), "samples"));
    if (has("seed")) c.seed = json_unsigned(doc.at("seed"), "seed");
    if (has("t_final")) c.t_final = json_real(doc.at("t_final"), "t_final");
    if (has("time_steps")) c.time_steps = static_cast<std::size_t>(json_unsigned(doc.at("time_steps"), "time_steps"));
    if (has("rabi_list")) c.rabi_list = json_real_list(doc.at("rabi_list"), "rabi_list");
    if (has("threads")) c.threads = static_cast<unsigned>(json_unsigned(doc.at("threads"), "threads"));
    if (has("out")) c.out = doc.at("out").get<std::string>();
    if (has("format")) {
        const auto f = doc.at("format").get<std::string>();
        if (f == "csv") c.format = OutputFormat::csv;
        else if (f == "json") c.format = OutputFormat::json;
        else throw ConfigError("format must be csv or json");
    }

    if (c.n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
    if (c.delta.empty()) throw ConfigError("delta must not be empty");
    if (c.delta.size() != 1 && c.delta.size() != c.n_atoms)
        throw ConfigError("delta must be a scalar or a list of n_atoms values");
    if (!std::isfinite(c.xi)) throw ConfigError("xi must be finite");
    if (!std::isfinite(c.rabi)) throw ConfigError("rabi must be finite");
    if (!(c.fluctuation >= 0.0)) throw ConfigError("fluctuation must be >= 0");
    for (double d : c.directionality_grid)
        if (!(std::abs(d) <= 1.0)) throw ConfigError("directionality_grid values must lie in [-1, 1]");
    for (auto n : c.n_atoms_grid)
        if (n < 1) throw ConfigError("n_atoms_grid values must be >= 1");
    if (c.samples < 2 && c.mode == Mode::fluctuate) throw ConfigError("samples must be >= 2");
    if (!(c.t_final > 0.0)) throw ConfigError("t_final must be positive");
    if (c.time_steps < 1) throw ConfigError("time_steps must be >= 1");
    if (c.out.empty()) throw ConfigError("out must not be empty");
    return c;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file, const RawLayer& env, const RawLayer& flags) {
    json merged = json::object();
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot open config file " + file->string());
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("malformed config file " + file->string() + ": " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
        for (const auto& [key, _] : doc.items()) spec_for(key);
        merge_layer(merged, doc, "config file");
    }
    merge_layer(merged, raw_layer_to_json(env), "environment");
    merge_layer(merged, raw_layer_to_json(flags), "command line");
    return parse_config(merged);
}

json to_json(const RunConfig& c) {
    json doc = json::object();
    doc["mode"] = to_string(c.mode);
    doc["n_atoms"] = c.n_atoms;
    doc["xi"] = c.xi;
    doc["delta"] = c.delta;
    doc[c.coupling_from_gamma_left ? "gamma_l" : "directionality"] = c.coupling_value;
    doc["rabi"] = c.rabi;
    if (c.xi_grid) doc["xi_grid"] = {{"start", c.xi_grid->start}, {"stop", c.xi_grid->stop}, {"count", c.xi_grid->count}};
    if (!c.delta_grid.empty()) doc["delta_grid"] = c.delta_grid;
    if (!c.directionality_grid.empty()) doc["directionality_grid"] = c.directionality_grid;
    if (!c.n_atoms_grid.empty()) doc["n_atoms_grid"] = c.n_atoms_grid;
    doc["fluctuation"] = c.fluctuation;
    doc["samples"] = c.samples;
    doc["seed"] = c.seed;
    doc["t_final"] = c.t_final;
    doc["time_steps"] = c.time_steps;
    doc["rabi_list"] = c.rabi_list;
    doc["threads"] = c.threads;
    doc["out"] = c.out;
    doc["format"] = to_string(c.format);
    return doc;
}

} // namespace chiral
