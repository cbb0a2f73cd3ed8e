#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "udnsim/association.hpp"
#include "udnsim/channel.hpp"
#include "udnsim/geometry.hpp"
#include "udnsim/mac.hpp"
#include "udnsim/rng.hpp"

namespace udnsim {

enum class SourceKind : std::uint8_t { DownlinkBs, UplinkUe };

struct InterferenceTerm {
    SourceKind kind = SourceKind::DownlinkBs;
    std::uint32_t source = 0;      ///< BS index or UE index
    double received_power_mw = 0;  ///< tx * fading * path gain
    double mean_power_mw = 0;      ///< tx * path gain (fading averaged out)
};

struct SinrSample {
    double signal_mw = 0;
    double interference_mw = 0;  ///< after cancellation
    double noise_mw = 1;
    double sinr = 0;
};

SinrSample make_sinr(double signal_mw, double interference_mw, double noise_mw);

/// Sum of all terms, in order.
double total_interference(std::span<const InterferenceTerm> terms) noexcept;

/// Interference left after removing the `ic_depth` strongest DL-BS terms
/// (UL-UE terms are never cancelled). Strength is the instantaneous power,
/// or the mean power when rank_by_mean is set; ties keep the earlier term.
/// Surviving terms are summed in their original order. Throws
/// std::invalid_argument for ic_depth < 0.
double residual_after_ic(std::span<const InterferenceTerm> terms, int ic_depth, bool rank_by_mean = false);

/// Probe -> BS link table for a fixed probe position, shared by all trials
/// of a pixel. Entries follow the deployment's BS order.
struct ProbeLinks {
    Point2D probe;
    std::vector<double> d2_km2;     ///< squared horizontal torus distance
    std::vector<double> p_los;      ///< BS-to-UE LoS probability
    std::vector<double> gain_los;   ///< 10^(-PL_los/10)
    std::vector<double> gain_nlos;  ///< 10^(-PL_nlos/10)

    void build(Point2D probe_position, const Deployment& deployment, ChannelModel model);
};

/// The probe of one (pixel, trial): where it is, whom it is served by and
/// the draws of its links.
struct ProbeState {
    Point2D position;
    std::uint32_t serving = 0;
    double serving_path_loss_db = 0;
    bool serving_is_los = false;
    const ProbeDraws* draws = nullptr;
    const ProbeLinks* links = nullptr;  ///< optional cache for the probe's BS links
};

/// Read-only view of one trial, enough to assemble the probe's SINR. The
/// background (UEs, association, schedules) excludes the probe.
struct TrialView {
    const Deployment* deployment = nullptr;
    ChannelModel model = ChannelModel::ThreeGppLosNlos;
    PowerConstants power;
    const TrialDraws* draws = nullptr;
    std::span<const Point2D> ue_positions;
    const AssociationResult* association = nullptr;
    std::span<const std::uint32_t> active_bs;     ///< ascending BS indices
    std::span<const CellSchedule> schedule;       ///< indexed by BS
    std::span<const double> scheduled_tx_mw;      ///< optional, indexed by BS: UL power of the scheduled UE
    UlPowerMode ul_power = UlPowerMode::Fractional;
    std::optional<double> cutoff_km;
    ProbeState probe;
};

/// UL transmit power (mW) for a sampled serving path loss.
double ue_tx_power_mw(double serving_path_loss_db, UlPowerMode mode, const PowerConstants& power);

/// Interference terms seen by the probe receiving DL from its serving BS:
/// other DL cells over BS-to-UE links and UL cells' scheduled UEs over
/// UE-to-UE links. The probe's serving cell is skipped.
void dl_interference_terms(const TrialView& view, std::vector<InterferenceTerm>& terms);

/// Terms seen by the probe's serving BS receiving the probe's UL: DL cells
/// over BS-to-BS links and other UL cells' UEs over BS-to-UE links.
void ul_interference_terms(const TrialView& view, std::vector<InterferenceTerm>& terms);

/// DL SINR of the probe, with `signal_fading` on the serving link.
SinrSample dl_sinr(const TrialView& view, double signal_fading, std::vector<InterferenceTerm>& scratch);

/// UL SINR at the probe's serving BS after partial IC of depth ic_depth.
SinrSample ul_sinr(const TrialView& view, double signal_fading, int ic_depth, bool rank_by_mean,
                   std::vector<InterferenceTerm>& scratch);

} // namespace udnsim
