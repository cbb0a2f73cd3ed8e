#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "udnsim/channel.hpp"
#include "udnsim/geometry.hpp"
#include "udnsim/rng.hpp"

namespace udnsim {

class NoCoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AssociationResult {
    std::vector<std::uint32_t> serving_bs;      ///< per UE
    std::vector<double> serving_path_loss_db;   ///< per UE, sampled (LoS state included)
    std::vector<std::uint8_t> serving_is_los;   ///< per UE
    std::vector<std::uint32_t> attached_offsets;  ///< CSR offsets, bs_count + 1 entries
    std::vector<std::uint32_t> attached_list;     ///< UE indices grouped by BS, ascending

    std::size_t ue_count() const noexcept { return serving_bs.size(); }
    std::size_t bs_count() const noexcept { return attached_offsets.empty() ? 0 : attached_offsets.size() - 1; }

    std::span<const std::uint32_t> attached(std::uint32_t bs) const noexcept
    {
        return {attached_list.data() + attached_offsets[bs], attached_list.data() + attached_offsets[bs + 1]};
    }
};

/// Geometry and channel parameters shared by every association in a scan.
class Associator {
public:
    Associator(const Deployment& deployment, ChannelModel model);

    /// Minimum-path-loss serving BS of a UE at `position` whose LoS draws
    /// towards BS b are TrialDraws::link_uniform(los_key, bs_salt(b)).
    /// Ties go to the lowest BS index; fading plays no part.
    void associate_one(Point2D position, std::uint64_t los_key, std::uint32_t& serving, double& path_loss_db,
                       bool& is_los) const;

    /// Associates every UE and fills the attachment lists. `result` is
    /// reused between calls to avoid allocation.
    void associate(std::span<const Point2D> ue_positions, const TrialDraws& draws, AssociationResult& result) const;

    const SpatialIndex& index() const noexcept { return index_; }
    ChannelModel model() const noexcept { return model_; }
    double delta_h_km_sq() const noexcept { return h2_; }

private:
    const Deployment* deployment_;
    ChannelModel model_;
    SpatialIndex index_;
    double h2_ = 0.0;
    double min_h_km_ = 0.0;
    PathLossLaw los_;
    PathLossLaw nlos_;
    std::vector<std::uint64_t> salt_;
};

/// 3D distance from a UE at `ue` to a BS at `bs` (torus horizontal part,
/// squared height difference in km^2), floored at min_distance_km.
inline double bs_ue_distance(Point2D ue, Point2D bs, double side_km, double h2_km2) noexcept
{
    return floored_distance(std::sqrt(torus_distance_sq(ue, bs, side_km) + h2_km2));
}

/// One-shot convenience wrapper over Associator.
AssociationResult associate(std::span<const Point2D> ue_positions, const Deployment& deployment, ChannelModel model,
                            const TrialDraws& draws);

/// Active BS flags: with IMC only BSs that serve a UE, otherwise all.
std::vector<std::uint8_t> derive_active_set(const AssociationResult& assoc, bool imc_enabled, std::size_t bs_count);

} // namespace udnsim
