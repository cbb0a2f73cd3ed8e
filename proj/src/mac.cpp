#include "udnsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace udnsim {

std::vector<Direction> assign_directions(std::size_t ue_count, DuplexMode duplex, RandomStream& stream,
                                         std::size_t probe_index, Direction probe_direction)
{
    std::vector<Direction> directions(ue_count, Direction::Downlink);
    if (duplex == DuplexMode::DynamicTdd) {
        for (auto& d : directions) {
            d = direction_from_uniform(stream.uniform());
        }
        if (probe_index < ue_count) {
            directions[probe_index] = probe_direction;
        }
    }
    return directions;
}

std::uint32_t schedule_cell(std::span<const std::uint32_t> attached, SchedulerKind kind,
                            std::span<const double> fading, double rr_uniform)
{
    if (attached.empty()) {
        throw std::invalid_argument("cannot schedule a cell without attached UEs");
    }
    if (kind == SchedulerKind::RoundRobin) {
        auto k = static_cast<std::size_t>(rr_uniform * static_cast<double>(attached.size()));
        return attached[std::min(k, attached.size() - 1)];
    }
    if (fading.size() != attached.size()) {
        throw std::invalid_argument("PF scheduling needs one fading gain per attached UE");
    }
    const auto best = std::max_element(fading.begin(), fading.end()) - fading.begin();
    return attached[static_cast<std::size_t>(best)];
}

std::uint32_t schedule_cell(std::span<const std::uint32_t> attached, SchedulerKind kind, RandomStream& stream)
{
    const double u = stream.uniform();
    std::vector<double> fading;
    if (kind == SchedulerKind::ProportionalFair) {
        fading.reserve(attached.size());
        for (std::size_t i = 0; i < attached.size(); ++i) {
            fading.push_back(sample_fading(stream));
        }
    }
    return schedule_cell(attached, kind, fading, u);
}

double pf_scheduled_fading(std::size_t k, RandomStream& stream)
{
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        best = std::max(best, sample_fading(stream));
    }
    return best;
}

double ul_tx_power_dbm(double path_loss_db, UlPowerMode mode, const PowerConstants& power,
                       const FractionalPowerControl& fpc)
{
    if (mode == UlPowerMode::FullPower) {
        return power.ue_max_tx_dbm;
    }
    return std::min(power.ue_max_tx_dbm, fpc.p0_dbm + fpc.alpha * path_loss_db);
}

} // namespace udnsim
