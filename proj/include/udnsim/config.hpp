#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "udnsim/engine.hpp"

namespace udnsim {

// Short names used by the JSON schema and the command line.
std::string_view to_string(SchedulerKind v) noexcept;  // rr | pf
std::string_view to_string(DuplexMode v) noexcept;     // dl | tdd
std::string_view to_string(Direction v) noexcept;      // dl | ul
std::string_view to_string(UlPowerMode v) noexcept;    // frac | full

ChannelModel parse_channel(std::string_view s);
SchedulerKind parse_scheduler(std::string_view s);
DuplexMode parse_duplex(std::string_view s);
Direction parse_direction(std::string_view s);
UlPowerMode parse_ul_power(std::string_view s);

/// Flat JSON object with one lower_snake_case key per ScenarioConfig field.
nlohmann::json to_json(const ScenarioConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys and type
/// errors raise ConfigError. "gamma_db" is accepted in place of "gamma".
/// The result is not validated.
ScenarioConfig apply_json(const nlohmann::json& j, ScenarioConfig base = {});

enum class Figure { Fig2b, Fig2c, Fig2d, Fig4a, Fig4b, Fig5a, Fig5b, Fig5c, Fig5d };
enum class Density { Lte50, Dense250, Udn2500 };

inline constexpr std::array all_figures{Figure::Fig2b, Figure::Fig2c, Figure::Fig2d, Figure::Fig4a, Figure::Fig4b,
                                        Figure::Fig5a, Figure::Fig5b, Figure::Fig5c, Figure::Fig5d};
inline constexpr std::array all_densities{Density::Lte50, Density::Dense250, Density::Udn2500};

std::string_view to_string(Figure f) noexcept;
std::string_view to_string(Density d) noexcept;
Figure parse_figure(std::string_view s);
Density parse_density(std::string_view s);
double density_value(Density d) noexcept;

/// Fully specified scenario of one heat-map panel.
ScenarioConfig preset(Figure figure, Density density);

} // namespace udnsim
