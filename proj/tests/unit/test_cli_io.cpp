#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "chiral/config.hpp"
#include "chiral/errors.hpp"
#include "chiral/output.hpp"
#include "chiral/run.hpp"

using namespace chiral;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& name)
        : path(fs::temp_directory_path() / ("chiral_test_" + name + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
};

RunConfig flags_config(const RawLayer& flags) { return parse_config(std::nullopt, {}, flags); }

} // namespace

TEST_SUITE("cli-io") {

TEST_CASE("coupling is derived from the given key") {
    auto c = flags_config({{"directionality", "1"}});
    CHECK(c.gamma_left() == 0.0);
    CHECK(c.coupling().gamma_right() == 1.0);

    c = flags_config({{"directionality", "0"}});
    CHECK(c.gamma_left() == 0.5);
    CHECK(c.coupling().gamma_right() == 0.5);

    c = flags_config({{"gamma_l", "0.25"}});
    CHECK(c.directionality() == 0.5);
}

TEST_CASE("defaults") {
    const auto c = flags_config({});
    CHECK(c.rabi == 0.01);
    CHECK(c.mode == Mode::sweep);
    CHECK(c.directionality() == 1.0);
    CHECK(c.format == OutputFormat::csv);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(flags_config({{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"directionality", "1.5"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"gamma_l", "-0.1"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"n_atoms", "0"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"n_atoms", "-2"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"fluctuation", "-0.01"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"directionality", "0.5"}, {"gamma_l", "0.25"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"mode", "plot"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"format", "xml"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"xi", "abc"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"xi_grid", "0:1"}}), ConfigError);
    CHECK_THROWS_AS(flags_config({{"n_atoms", "3"}, {"delta", "1,2"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"xi_grid", {{"start", 0}, {"stop", 1}, {"count", 3}, {"step", 1}}}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/chiral.json"), {}, {}), ConfigError);
}

TEST_CASE("error messages name the problem") {
    try {
        flags_config({{"directionality", "0.5"}, {"gamma_l", "0.25"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gamma_l") != std::string::npos);
    }
    try {
        flags_config({{"n_atom", "3"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_atom") != std::string::npos);
    }
}

TEST_CASE("numbers accept multiples of pi") {
    CHECK(parse_real("pi") == kPi);
    CHECK(parse_real("-pi") == -kPi);
    CHECK(parse_real("2pi") == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(parse_real("0.5*pi") == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(parse_real("pi/2") == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(parse_real("3*pi/4") == doctest::Approx(0.75 * kPi).epsilon(1e-15));
    CHECK(parse_real("1e-3") == 1e-3);
    CHECK_THROWS_AS(parse_real("pi/0"), ConfigError);
    CHECK_THROWS_AS(parse_real(""), ConfigError);
}

TEST_CASE("grid and list values") {
    const auto c = flags_config({{"xi_grid", "0:2pi:11"}, {"delta_grid", "0,1"}, {"n_atoms_grid", "2,10"},
                                 {"directionality_grid", "0.5, 1"}});
    REQUIRE(c.xi_grid.has_value());
    CHECK(c.xi_grid->count == 11);
    CHECK(c.xi_grid->stop == doctest::Approx(kTwoPi));
    CHECK(c.delta_grid == std::vector<double>{0.0, 1.0});
    CHECK(c.n_atoms_grid == std::vector<std::size_t>{2, 10});
    CHECK(c.directionality_grid == std::vector<double>{0.5, 1.0});

    const auto g = grid_from_config(c);
    CHECK(g.size() == 11 * 2 * 2 * 2);

    const auto per_atom = flags_config({{"n_atoms", "3"}, {"delta", "0.1,0.2,0.3"}});
    CHECK(per_atom.detunings() == std::vector<double>{0.1, 0.2, 0.3});
    CHECK_THROWS_AS(grid_from_config(per_atom), ConfigError);
    CHECK(flags_config({{"n_atoms", "3"}, {"delta", "0.4"}}).detunings() == std::vector<double>(3, 0.4));
}

TEST_CASE("precedence is flags over environment over file") {
    ScratchDir dir("precedence");
    const fs::path file = dir.path / "cfg.json";
    write_text_file(file, R"({"n_atoms": 4, "xi": 1.0, "rabi": 0.02, "directionality": 0.5})");

    auto c = parse_config(file, {}, {});
    CHECK(c.n_atoms == 4);
    CHECK(c.xi == 1.0);
    CHECK(c.directionality() == 0.5);

    c = parse_config(file, {{"n_atoms", "6"}, {"xi", "2"}}, {});
    CHECK(c.n_atoms == 6);
    CHECK(c.xi == 2.0);
    CHECK(c.rabi == 0.02);

    c = parse_config(file, {{"n_atoms", "6"}, {"xi", "2"}}, {{"n_atoms", "8"}});
    CHECK(c.n_atoms == 8);
    CHECK(c.xi == 2.0);

    // A higher layer naming the other coupling key replaces the pair.
    c = parse_config(file, {{"gamma_l", "0.25"}}, {});
    CHECK(c.coupling_from_gamma_left);
    CHECK(c.directionality() == 0.5);
    c = parse_config(file, {{"gamma_l", "0"}}, {{"directionality", "0"}});
    CHECK(c.gamma_left() == 0.5);
}

TEST_CASE("environment variables use the prefix") {
    ::setenv("CHIRAL_N_ATOMS", "7", 1);
    ::setenv("CHIRAL_XI_GRID", "0:pi:5", 1);
    const auto env = env_layer();
    ::unsetenv("CHIRAL_N_ATOMS");
    ::unsetenv("CHIRAL_XI_GRID");
    CHECK(env.at("n_atoms") == "7");
    CHECK(env.at("xi_grid") == "0:pi:5");
    const auto c = parse_config(std::nullopt, env, {});
    CHECK(c.n_atoms == 7);
    CHECK(c.xi_grid->count == 5);
}

TEST_CASE("config round-trips through JSON") {
    RunConfig a;
    a.mode = Mode::fluctuate;
    a.n_atoms = 5;
    a.xi = 0.1 + 0.2;
    a.delta = {0.1, -0.3, 1.0 / 3.0, 2.0, 1e-17};
    a.coupling_from_gamma_left = true;
    a.coupling_value = 0.3;
    a.rabi = 1e-3;
    a.xi_grid = XiGrid{0.0, kTwoPi, 77};
    a.delta_grid = {0.0, 1.0};
    a.directionality_grid = {0.5, 1.0};
    a.n_atoms_grid = {2, 5};
    a.fluctuation = 0.005;
    a.samples = 33;
    a.seed = 18446744073709551557ull;
    a.t_final = 12.5;
    a.time_steps = 7;
    a.rabi_list = {1e-3, 1e-1};
    a.threads = 3;
    a.out = "results/a b.csv";
    a.format = OutputFormat::json;

    CHECK(parse_config(to_json(a)) == a);
    CHECK(parse_config(json::parse(to_json(a).dump())) == a);

    const RunConfig defaults;
    CHECK(parse_config(to_json(defaults)) == defaults);
    const auto from_flags = flags_config({{"gamma_l", "0.1"}, {"xi", "pi/3"}});
    CHECK(parse_config(to_json(from_flags)) == from_flags);
}

TEST_CASE("number formatting keeps every bit") {
    for (double x : {0.1, 1.0 / 3.0, kPi, -2.5e-300, 1e300, 0.0}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(1.0) == "1");
    CHECK_THROWS_AS(format_double(std::nan("")), Error);
    CHECK_THROWS_AS(format_double(INFINITY), Error);
}

TEST_CASE("CSV layout") {
    Table t{{"a", "b", "c", "d"}, {{std::int64_t{3}, 0.5, std::string("ok"), std::monostate{}},
                                   {std::int64_t{-1}, 1e-20, std::string("x,y"), std::string("q\"r")}}};
    CHECK(to_csv(t) == "a,b,c,d\n3,0.5,ok,\n-1,9.9999999999999995e-21,\"x,y\",\"q\"\"r\"\n");
    const json j = to_json(t);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["rows"][0]["d"].is_null());
    CHECK(j["rows"][1]["a"] == -1);
    CHECK(j["columns"][2] == "c");
}

TEST_CASE("sweep run writes the table and sidecar") {
    ScratchDir dir("sweep");
    auto c = flags_config({{"n_atoms", "10"}, {"directionality", "1"}, {"xi_grid", "0:2pi:9"}});
    c.out = (dir.path / "sweep.csv").string();
    const auto outcome = run(c);
    CHECK(outcome.exit_code == kExitOk);
    CHECK(outcome.rows == 9);
    const auto csv = read_file(c.out);
    CHECK(first_line(csv) == "N,xi,delta,D,Tp,total_population,flags");
    CHECK(csv.find("nan") == std::string::npos);
    CHECK(csv.find("NaN") == std::string::npos);

    const auto meta = json::parse(read_file(metadata_path_for(c.out)));
    CHECK(meta["schema_version"] == kSchemaVersion);
    CHECK(meta["library_version"] == kLibraryVersion);
    CHECK(meta["undefined_points"] == 0);
    CHECK(meta["rows"] == 9);
    CHECK(meta["warning"].is_null());
    CHECK(parse_config(meta["config"]) == c);
    CHECK(meta.contains("timestamp"));
}

TEST_CASE("partially and totally undefined sweeps") {
    ScratchDir dir("undefined");
    auto c = flags_config({{"n_atoms", "4"}, {"directionality", "0"}, {"xi_grid", "pi/2:pi:2"}});
    c.out = (dir.path / "partial.csv").string();
    auto outcome = run(c);
    CHECK(outcome.exit_code == kExitOk);
    CHECK(outcome.undefined == 1);
    CHECK_FALSE(outcome.warnings.empty());
    const auto csv = read_file(c.out);
    CHECK(csv.find(",,undefined:no_steady_state") != std::string::npos);
    CHECK(json::parse(read_file(metadata_path_for(c.out)))["undefined_points"] == 1);

    c.xi_grid.reset();
    c.xi = kPi;
    c.out = (dir.path / "total.csv").string();
    outcome = run(c);
    CHECK(outcome.exit_code == kExitTotalFailure);
}

TEST_CASE("JSON table output") {
    ScratchDir dir("json");
    auto c = flags_config({{"n_atoms", "3"}, {"xi", "1"}, {"format", "json"}});
    c.out = (dir.path / "point.json").string();
    run(c);
    const auto doc = json::parse(read_file(c.out));
    CHECK(doc["columns"][4] == "Tp");
    CHECK(doc["rows"].size() == 1);
}

TEST_CASE("fluctuate run is identical across repeats and worker counts") {
    ScratchDir dir("fluct");
    auto c = flags_config({{"mode", "fluctuate"}, {"n_atoms", "6"}, {"xi_grid", "0.5pi:1.9pi:4"}, {"fluctuation", "0.005"},
                           {"samples", "40"}, {"seed", "7"}});
    c.threads = 1;
    c.out = (dir.path / "a.csv").string();
    run(c);
    c.out = (dir.path / "b.csv").string();
    run(c);
    c.threads = 4;
    c.out = (dir.path / "c.csv").string();
    run(c);
    const auto a = read_file(dir.path / "a.csv");
    CHECK(first_line(a) == "N,xi,delta,D,fluctuation,samples,undefined,Tp_mean,Tp_std,flags");
    CHECK(a == read_file(dir.path / "b.csv"));
    CHECK(a == read_file(dir.path / "c.csv"));
}

TEST_CASE("simulate run emits a trace and the steady state") {
    ScratchDir dir("simulate");
    auto c = flags_config({{"mode", "simulate"}, {"n_atoms", "2"}, {"xi", "pi/2"}, {"t_final", "10"},
                           {"time_steps", "20"}});
    c.out = (dir.path / "trace.csv").string();
    const auto outcome = run(c);
    CHECK(outcome.exit_code == kExitOk);
    CHECK(outcome.rows == 21);
    CHECK(first_line(read_file(c.out)) == "t,P_1,P_2,total_population,flags");
    const auto meta = json::parse(read_file(metadata_path_for(c.out)));
    CHECK(meta["results"].contains("steady_state"));
}

TEST_CASE("validate run reports the scaling exponent") {
    ScratchDir dir("validate");
    auto c = flags_config({{"mode", "validate"}, {"n_atoms", "2"}, {"xi", "pi/2"}});
    c.out = (dir.path / "validate.csv").string();
    const auto outcome = run(c);
    CHECK(outcome.rows == 3);
    CHECK(first_line(read_file(c.out)) == "rabi,max_relative_discrepancy,Tp_amplitude,Tp_lindblad");
    const auto meta = json::parse(read_file(metadata_path_for(c.out)));
    CHECK(meta["results"]["scaling_exponent"].get<double>() == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("unwritable output is an error") {
    ScratchDir dir("unwritable");
    write_text_file(dir.path / "plain", "x");
    auto c = flags_config({{"n_atoms", "2"}, {"xi", "1"}});
    c.out = (dir.path / "plain" / "out.csv").string();
    CHECK_THROWS(run(c));
}

}
