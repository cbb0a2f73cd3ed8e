#include "udnsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "udnsim/config.hpp"
#include "udnsim/heatmap.hpp"

namespace udnsim {

namespace {

struct Flags {
    std::optional<std::string> preset;
    std::optional<std::string> density;
    std::optional<std::string> config_path;
    std::optional<double> lambda;
    std::optional<double> rho;
    std::optional<double> area_km;
    std::optional<int> grid;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma_db;
    std::optional<double> antenna_delta_m;
    std::optional<std::string> channel;
    std::optional<std::string> imc;
    bool full_load = false;
    std::optional<std::string> scheduler;
    std::optional<std::string> duplex;
    std::optional<std::string> direction;
    std::optional<int> ic;
    std::optional<std::string> ul_power;
    std::optional<double> cutoff_km;
    std::optional<std::string> out;
    std::optional<std::string> format;
    unsigned workers = 0;
    bool quiet = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

ScenarioConfig build_config(const Flags& f)
{
    ScenarioConfig c;
    if (f.preset) {
        if (!f.density) {
            throw UsageError("--preset needs --density");
        }
        c = preset(parse_figure(*f.preset), parse_density(*f.density));
    } else if (f.density) {
        c.lambda_bs = density_value(parse_density(*f.density));
    }
    if (f.config_path) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(*f.config_path));
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(*f.config_path + ": " + e.what());
        }
        c = apply_json(j, c);
    }
    if (f.lambda) c.lambda_bs = *f.lambda;
    if (f.rho) c.rho_ue = *f.rho;
    if (f.area_km) c.side_km = *f.area_km;
    if (f.grid) c.resolution = *f.grid;
    if (f.trials) c.trials = *f.trials;
    if (f.seed) c.seed = *f.seed;
    if (f.gamma_db) c.gamma = db_to_linear(*f.gamma_db);
    if (f.antenna_delta_m) c.bs_antenna_height_m = c.ue_antenna_height_m + *f.antenna_delta_m;
    if (f.channel) c.channel = parse_channel(*f.channel);
    if (f.imc) c.imc_enabled = *f.imc == "on";
    if (f.full_load) c.full_load = true;
    if (f.scheduler) c.scheduler = parse_scheduler(*f.scheduler);
    if (f.duplex) c.duplex = parse_duplex(*f.duplex);
    if (f.direction) c.direction = parse_direction(*f.direction);
    if (f.ic) c.ic_depth = *f.ic;
    if (f.ul_power) c.ul_power = parse_ul_power(*f.ul_power);
    if (f.cutoff_km) c.cutoff_km = *f.cutoff_km;
    c.validate();
    return c;
}

void emit(const CoverageMap& map, const Flags& f, std::ostream& out)
{
    if (!f.out) {
        out << write_csv(map);
        return;
    }
    const std::filesystem::path path{*f.out};
    std::string format = f.format.value_or(path.extension() == ".csv" ? "csv" : "both");
    auto with_ext = [&](const char* ext) { return std::filesystem::path{path}.replace_extension(ext); };
    if (format == "png" || format == "both") {
        write_file(with_ext(".png"), write_png(map));
    }
    if (format == "csv" || format == "both") {
        write_file(with_ext(".csv"), write_csv(map));
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Flags f;
    CLI::App app{"Monte Carlo SINR coverage heat maps for dense small-cell networks", "udnsim"};
    app.option_defaults()->always_capture_default(false);

    const std::vector<std::string> figures{"fig2b", "fig2c", "fig2d", "fig4a", "fig4b",
                                           "fig5a", "fig5b", "fig5c", "fig5d"};
    app.add_option("--preset", f.preset, "Figure preset")->check(CLI::IsMember(figures));
    app.add_option("--density", f.density, "Density preset")->check(CLI::IsMember({"lte50", "dense250", "udn2500"}));
    app.add_option("--config", f.config_path, "Flat JSON scenario file (flags override it)");
    app.add_option("--lambda", f.lambda, "BS density per km^2");
    app.add_option("--rho", f.rho, "Active UE density per km^2");
    app.add_option("--area-km", f.area_km, "Side of the square region in km");
    app.add_option("--grid", f.grid, "Pixels per side");
    app.add_option("--trials", f.trials, "Trials per pixel");
    app.add_option("--seed", f.seed, "Master seed");
    app.add_option("--gamma-db", f.gamma_db, "SINR threshold in dB");
    app.add_option("--antenna-delta-m", f.antenna_delta_m, "BS minus UE antenna height in m");
    app.add_option("--channel", f.channel)->check(CLI::IsMember({"single", "3gpp"}));
    app.add_option("--imc", f.imc, "Idle mode capability")->check(CLI::IsMember({"on", "off"}));
    app.add_flag("--full-load", f.full_load, "Every BS transmits, no UE drops");
    app.add_option("--scheduler", f.scheduler)->check(CLI::IsMember({"rr", "pf"}));
    app.add_option("--duplex", f.duplex)->check(CLI::IsMember({"dl", "tdd"}));
    app.add_option("--direction", f.direction)->check(CLI::IsMember({"dl", "ul"}));
    app.add_option("--ic", f.ic, "Interference cancellation depth")->check(CLI::NonNegativeNumber);
    app.add_option("--ul-power", f.ul_power)->check(CLI::IsMember({"frac", "full"}));
    app.add_option("--cutoff-km", f.cutoff_km, "Ignore interferers beyond this distance");
    app.add_option("--out", f.out, "Output path; a .png also gets a sibling .csv unless --format png");
    app.add_option("--format", f.format)->check(CLI::IsMember({"png", "csv", "both"}));
    app.add_option("--workers", f.workers, "Worker threads, 0 = all cores");
    app.add_flag("-q,--quiet", f.quiet, "No summary line");

    try {
        std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
        std::reverse(reversed.begin(), reversed.end());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "udnsim: " << e.what() << "\n";
        return 2;
    }

    ScenarioConfig config;
    try {
        config = build_config(f);
    } catch (const UsageError& e) {
        err << "udnsim: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "udnsim: invalid " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "udnsim: " << e.what() << "\n";
        return 1;
    }

    try {
        const Simulator sim{config, make_deployment(config)};
        ScanOptions options;
        options.workers = f.workers;
        const CoverageMap map = sim.scan_grid(options);
        emit(map, f, out);
        if (!f.quiet && f.out) {
            char line[96];
            std::snprintf(line, sizeof line, "mean coverage %.4f, fingerprint %s\n", map.mean(),
                          map.fingerprint.c_str());
            out << line;
        }
    } catch (const std::exception& e) {
        err << "udnsim: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_cli(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace udnsim
