#pragma once

#include <cmath>
#include <string_view>

#include "udnsim/rng.hpp"

namespace udnsim {

enum class LinkType { BsToUe, BsToBs, UeToUe };

enum class ChannelModel {
    SingleSlopeNlos,  ///< 145.4 + 37.5 log10(r) on every link
    ThreeGppLosNlos,  ///< probabilistic LoS/NLoS pairs per link type
};

/// Transmit and noise powers over a 10 MHz carrier.
struct PowerConstants {
    double bs_tx_dbm = 24.0;
    double ue_max_tx_dbm = 23.0;
    double noise_at_bs_dbm = -91.0;
    double noise_at_ue_dbm = -95.0;
};

struct LinkSample {
    double r_km = 0.0;
    bool is_los = false;
    double path_loss_db = 0.0;
    double fading_gain = 1.0;
};

/// Distances below this are floored before evaluating a path-loss law.
inline constexpr double min_distance_km = 1e-6;

/// Breakpoint of the BS-link LoS probability, and the UE-UE LoS range.
inline constexpr double bs_los_breakpoint_km = 0.0677;
inline constexpr double ue_los_range_km = 0.05;

/// Probability that a link of length r_km is line-of-sight.
/// Throws std::invalid_argument for negative r.
double los_probability(LinkType link, double r_km);

/// Intercept and slope (dB per decade of km) of one path-loss law.
struct PathLossLaw {
    double intercept_db;
    double slope_db_per_decade;

    double at(double r_km) const noexcept { return intercept_db + slope_db_per_decade * std::log10(r_km); }
};

PathLossLaw path_loss_law(ChannelModel model, LinkType link, bool is_los) noexcept;

/// Path loss in dB. r must be positive (std::domain_error otherwise); use
/// floored_distance() to apply the minimum-distance guard first.
double path_loss_db(ChannelModel model, LinkType link, bool is_los, double r_km);

inline double floored_distance(double r_km) noexcept { return r_km < min_distance_km ? min_distance_km : r_km; }

/// Lower envelope min(LoS, NLoS) path loss at r; a bound for nearest-first searches.
double min_path_loss_db(ChannelModel model, LinkType link, double r_km) noexcept;

/// Distance at which `law` reaches `pl_db` (inverse of PathLossLaw::at).
inline double law_distance_at(const PathLossLaw& law, double pl_db) noexcept
{
    return std::pow(10.0, (pl_db - law.intercept_db) / law.slope_db_per_decade);
}

// Uniform-to-sample transforms shared by the stream and keyed-draw paths.
inline bool los_from_uniform(double p, double u) noexcept { return u < p; }
inline double fading_from_uniform(double u) noexcept { return -std::log(u); }

/// Bernoulli(p) LoS state.
bool sample_los(double p, RandomStream& stream);

/// Rayleigh power gain, Exp(1).
double sample_fading(RandomStream& stream);

inline double db_to_linear(double x_db) noexcept { return std::pow(10.0, x_db / 10.0); }
inline double dbm_to_mw(double x_dbm) noexcept { return db_to_linear(x_dbm); }
inline double linear_to_db(double x) noexcept { return 10.0 * std::log10(x); }
inline double mw_to_dbm(double x_mw) noexcept { return linear_to_db(x_mw); }

std::string_view to_string(LinkType link) noexcept;
std::string_view to_string(ChannelModel model) noexcept;

} // namespace udnsim
