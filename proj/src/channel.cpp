#include "udnsim/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace udnsim {

double los_probability(LinkType link, double r_km)
{
    if (r_km < 0.0 || std::isnan(r_km)) {
        throw std::invalid_argument("negative link distance");
    }
    if (link == LinkType::UeToUe) {
        return r_km <= ue_los_range_km ? 1.0 : 0.0;
    }
    if (r_km == 0.0) {
        return 1.0;
    }
    const double p = r_km <= bs_los_breakpoint_km ? 1.0 - 5.0 * std::exp(-0.156 / r_km)
                                                  : 5.0 * std::exp(-r_km / 0.03);
    return std::clamp(p, 0.0, 1.0);
}

PathLossLaw path_loss_law(ChannelModel model, LinkType link, bool is_los) noexcept
{
    if (model == ChannelModel::SingleSlopeNlos) {
        return {145.4, 37.5};
    }
    switch (link) {
    case LinkType::BsToUe:
        return is_los ? PathLossLaw{103.8, 20.9} : PathLossLaw{145.4, 37.5};
    case LinkType::BsToBs:
        return is_los ? PathLossLaw{101.9, 40.0} : PathLossLaw{169.36, 40.0};
    case LinkType::UeToUe:
        return is_los ? PathLossLaw{98.45, 20.0} : PathLossLaw{175.78, 40.0};
    }
    return {145.4, 37.5};
}

double path_loss_db(ChannelModel model, LinkType link, bool is_los, double r_km)
{
    if (!(r_km > 0.0)) {
        throw std::domain_error("path loss needs a positive distance");
    }
    return path_loss_law(model, link, is_los).at(r_km);
}

double min_path_loss_db(ChannelModel model, LinkType link, double r_km) noexcept
{
    const double r = floored_distance(r_km);
    return std::min(path_loss_law(model, link, true).at(r), path_loss_law(model, link, false).at(r));
}

bool sample_los(double p, RandomStream& stream)
{
    return los_from_uniform(p, stream.uniform());
}

double sample_fading(RandomStream& stream)
{
    return fading_from_uniform(stream.uniform());
}

std::string_view to_string(LinkType link) noexcept
{
    switch (link) {
    case LinkType::BsToUe: return "bs-to-ue";
    case LinkType::BsToBs: return "bs-to-bs";
    case LinkType::UeToUe: return "ue-to-ue";
    }
    return "?";
}

std::string_view to_string(ChannelModel model) noexcept
{
    return model == ChannelModel::SingleSlopeNlos ? "single" : "3gpp";
}

} // namespace udnsim
