#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "udnsim/channel.hpp"
#include "udnsim/rng.hpp"

namespace udnsim {

enum class SchedulerKind { RoundRobin, ProportionalFair };
enum class DuplexMode { DownlinkOnly, DynamicTdd };
enum class UlPowerMode { Fractional, FullPower };
enum class Direction : std::uint8_t { Downlink, Uplink };

/// Fractional power control parameters: P = min(Pmax, P0 + alpha * PL).
struct FractionalPowerControl {
    double alpha = 0.8;
    double p0_dbm = -59.0;
};

inline constexpr std::uint32_t no_ue = 0xffffffffU;

/// Scheduling outcome of one active cell.
struct CellSchedule {
    std::uint32_t scheduled_ue = no_ue;  ///< no_ue for an active cell with nobody attached
    Direction direction = Direction::Downlink;
};

/// TDD request of one UE: DL with probability 1/2.
inline Direction direction_from_uniform(double u) noexcept
{
    return u < 0.5 ? Direction::Downlink : Direction::Uplink;
}

/// Per-UE directions. DynamicTdd draws i.i.d. fair coins from `stream`;
/// DownlinkOnly yields all DL. The probe's entry is then forced to
/// `probe_direction` when probe_index < ue_count.
std::vector<Direction> assign_directions(std::size_t ue_count, DuplexMode duplex, RandomStream& stream,
                                         std::size_t probe_index, Direction probe_direction);

/// Picks the UE a cell serves this subframe.
///
/// RoundRobin: attached[floor(rr_uniform * K)], i.e. a random phase of a
/// rotating schedule. ProportionalFair: the UE with the largest fading gain
/// (i.i.d. unit-mean fading makes instantaneous/average equal to the gain);
/// ties go to the earlier entry. `fading` runs parallel to `attached`.
/// Throws std::invalid_argument for an empty cell.
std::uint32_t schedule_cell(std::span<const std::uint32_t> attached, SchedulerKind kind,
                            std::span<const double> fading, double rr_uniform);

/// Stream-driven form: draws the RR phase and, for PF, Exp(1) gains.
std::uint32_t schedule_cell(std::span<const std::uint32_t> attached, SchedulerKind kind, RandomStream& stream);

/// Signal fading of a UE that PF scheduled among K: max of K Exp(1) draws.
double pf_scheduled_fading(std::size_t k, RandomStream& stream);

/// UL transmit power; never exceeds power.ue_max_tx_dbm.
double ul_tx_power_dbm(double path_loss_db, UlPowerMode mode, const PowerConstants& power = {},
                       const FractionalPowerControl& fpc = {});

} // namespace udnsim
