#include "udnsim/config.hpp"

#include <cmath>
#include <set>

#include "udnsim/channel.hpp"

namespace udnsim {

using nlohmann::json;

std::string_view to_string(SchedulerKind v) noexcept { return v == SchedulerKind::RoundRobin ? "rr" : "pf"; }
std::string_view to_string(DuplexMode v) noexcept { return v == DuplexMode::DownlinkOnly ? "dl" : "tdd"; }
std::string_view to_string(Direction v) noexcept { return v == Direction::Downlink ? "dl" : "ul"; }
std::string_view to_string(UlPowerMode v) noexcept { return v == UlPowerMode::Fractional ? "frac" : "full"; }

namespace {

[[noreturn]] void bad_value(std::string_view field, std::string_view value, std::string_view allowed)
{
    throw ConfigError(std::string{field}, "unknown value '" + std::string{value} + "', expected " +
                                              std::string{allowed});
}

} // namespace

ChannelModel parse_channel(std::string_view s)
{
    if (s == "single") return ChannelModel::SingleSlopeNlos;
    if (s == "3gpp") return ChannelModel::ThreeGppLosNlos;
    bad_value("channel", s, "single|3gpp");
}

SchedulerKind parse_scheduler(std::string_view s)
{
    if (s == "rr") return SchedulerKind::RoundRobin;
    if (s == "pf") return SchedulerKind::ProportionalFair;
    bad_value("scheduler", s, "rr|pf");
}

DuplexMode parse_duplex(std::string_view s)
{
    if (s == "dl") return DuplexMode::DownlinkOnly;
    if (s == "tdd") return DuplexMode::DynamicTdd;
    bad_value("duplex", s, "dl|tdd");
}

Direction parse_direction(std::string_view s)
{
    if (s == "dl") return Direction::Downlink;
    if (s == "ul") return Direction::Uplink;
    bad_value("direction", s, "dl|ul");
}

UlPowerMode parse_ul_power(std::string_view s)
{
    if (s == "frac") return UlPowerMode::Fractional;
    if (s == "full") return UlPowerMode::FullPower;
    bad_value("ul_power", s, "frac|full");
}

json to_json(const ScenarioConfig& c)
{
    json j;
    j["side_km"] = c.side_km;
    j["lambda_bs"] = c.lambda_bs;
    j["rho_ue"] = c.rho_ue;
    j["bs_antenna_height_m"] = c.bs_antenna_height_m;
    j["ue_antenna_height_m"] = c.ue_antenna_height_m;
    j["channel"] = to_string(c.channel);
    j["imc_enabled"] = c.imc_enabled;
    j["full_load"] = c.full_load;
    j["scheduler"] = to_string(c.scheduler);
    j["duplex"] = to_string(c.duplex);
    j["direction"] = to_string(c.direction);
    j["ic_depth"] = c.ic_depth;
    j["ul_power"] = to_string(c.ul_power);
    j["gamma"] = c.gamma;
    j["trials"] = c.trials;
    j["resolution"] = c.resolution;
    j["seed"] = c.seed;
    j["cutoff_km"] = c.cutoff_km ? json(*c.cutoff_km) : json(nullptr);
    j["poisson_ue_count"] = c.poisson_ue_count;
    j["ic_rank_by_mean_power"] = c.ic_rank_by_mean_power;
    j["bs_tx_dbm"] = c.power.bs_tx_dbm;
    j["ue_max_tx_dbm"] = c.power.ue_max_tx_dbm;
    j["noise_at_bs_dbm"] = c.power.noise_at_bs_dbm;
    j["noise_at_ue_dbm"] = c.power.noise_at_ue_dbm;
    return j;
}

ScenarioConfig apply_json(const json& j, ScenarioConfig c)
{
    if (!j.is_object()) {
        throw ConfigError("config", "expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        auto number = [&] {
            if (!value.is_number()) {
                throw ConfigError(key, "expected a number");
            }
            return value.get<double>();
        };
        auto integer = [&] {
            if (!value.is_number_integer()) {
                throw ConfigError(key, "expected an integer");
            }
            return value.get<long long>();
        };
        auto boolean = [&] {
            if (!value.is_boolean()) {
                throw ConfigError(key, "expected true or false");
            }
            return value.get<bool>();
        };
        auto text = [&] {
            if (!value.is_string()) {
                throw ConfigError(key, "expected a string");
            }
            return value.get<std::string>();
        };
        if (key == "side_km") c.side_km = number();
        else if (key == "lambda_bs") c.lambda_bs = number();
        else if (key == "rho_ue") c.rho_ue = number();
        else if (key == "bs_antenna_height_m") c.bs_antenna_height_m = number();
        else if (key == "ue_antenna_height_m") c.ue_antenna_height_m = number();
        else if (key == "channel") c.channel = parse_channel(text());
        else if (key == "imc_enabled") c.imc_enabled = boolean();
        else if (key == "full_load") c.full_load = boolean();
        else if (key == "scheduler") c.scheduler = parse_scheduler(text());
        else if (key == "duplex") c.duplex = parse_duplex(text());
        else if (key == "direction") c.direction = parse_direction(text());
        else if (key == "ic_depth") c.ic_depth = static_cast<int>(integer());
        else if (key == "ul_power") c.ul_power = parse_ul_power(text());
        else if (key == "gamma") c.gamma = number();
        else if (key == "gamma_db") c.gamma = db_to_linear(number());
        else if (key == "trials") c.trials = static_cast<int>(integer());
        else if (key == "resolution") c.resolution = static_cast<int>(integer());
        else if (key == "seed") {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
                throw ConfigError(key, "expected a non-negative integer");
            }
            c.seed = value.get<std::uint64_t>();
        }
        else if (key == "cutoff_km") c.cutoff_km = value.is_null() ? std::nullopt : std::optional<double>{number()};
        else if (key == "poisson_ue_count") c.poisson_ue_count = boolean();
        else if (key == "ic_rank_by_mean_power") c.ic_rank_by_mean_power = boolean();
        else if (key == "bs_tx_dbm") c.power.bs_tx_dbm = number();
        else if (key == "ue_max_tx_dbm") c.power.ue_max_tx_dbm = number();
        else if (key == "noise_at_bs_dbm") c.power.noise_at_bs_dbm = number();
        else if (key == "noise_at_ue_dbm") c.power.noise_at_ue_dbm = number();
        else throw ConfigError(key, "unknown key");
    }
    return c;
}

std::string_view to_string(Figure f) noexcept
{
    switch (f) {
    case Figure::Fig2b: return "fig2b";
    case Figure::Fig2c: return "fig2c";
    case Figure::Fig2d: return "fig2d";
    case Figure::Fig4a: return "fig4a";
    case Figure::Fig4b: return "fig4b";
    case Figure::Fig5a: return "fig5a";
    case Figure::Fig5b: return "fig5b";
    case Figure::Fig5c: return "fig5c";
    case Figure::Fig5d: return "fig5d";
    }
    return "?";
}

std::string_view to_string(Density d) noexcept
{
    switch (d) {
    case Density::Lte50: return "lte50";
    case Density::Dense250: return "dense250";
    case Density::Udn2500: return "udn2500";
    }
    return "?";
}

Figure parse_figure(std::string_view s)
{
    for (auto f : all_figures) {
        if (to_string(f) == s) return f;
    }
    bad_value("preset", s, "fig2b|fig2c|fig2d|fig4a|fig4b|fig5a|fig5b|fig5c|fig5d");
}

Density parse_density(std::string_view s)
{
    for (auto d : all_densities) {
        if (to_string(d) == s) return d;
    }
    bad_value("density", s, "lte50|dense250|udn2500");
}

double density_value(Density d) noexcept
{
    switch (d) {
    case Density::Lte50: return 50.0;
    case Density::Dense250: return 250.0;
    case Density::Udn2500: return 2500.0;
    }
    return 0.0;
}

ScenarioConfig preset(Figure figure, Density density)
{
    ScenarioConfig c;
    c.lambda_bs = density_value(density);
    c.rho_ue = 300.0;
    c.bs_antenna_height_m = 1.5;
    c.ue_antenna_height_m = 1.5;
    c.channel = ChannelModel::ThreeGppLosNlos;
    c.imc_enabled = true;
    c.full_load = false;
    c.scheduler = SchedulerKind::RoundRobin;
    c.duplex = DuplexMode::DownlinkOnly;
    c.direction = Direction::Downlink;
    c.ic_depth = 0;
    c.ul_power = UlPowerMode::Fractional;

    switch (figure) {
    case Figure::Fig2b:
        c.channel = ChannelModel::SingleSlopeNlos;
        c.full_load = true;
        break;
    case Figure::Fig2c:
        c.channel = ChannelModel::SingleSlopeNlos;
        c.full_load = true;
        c.bs_antenna_height_m = 10.0;
        break;
    case Figure::Fig2d:
        c.full_load = true;
        break;
    case Figure::Fig4a:
        break;
    case Figure::Fig4b:
        c.scheduler = SchedulerKind::ProportionalFair;
        break;
    case Figure::Fig5a:
    case Figure::Fig5b:
    case Figure::Fig5c:
    case Figure::Fig5d:
        c.scheduler = SchedulerKind::ProportionalFair;
        c.duplex = DuplexMode::DynamicTdd;
        c.direction = figure == Figure::Fig5a ? Direction::Downlink : Direction::Uplink;
        c.ic_depth = (figure == Figure::Fig5c || figure == Figure::Fig5d) ? 3 : 0;
        c.ul_power = figure == Figure::Fig5d ? UlPowerMode::FullPower : UlPowerMode::Fractional;
        break;
    }
    return c;
}

} // namespace udnsim
