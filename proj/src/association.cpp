#include "udnsim/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udnsim {

Associator::Associator(const Deployment& deployment, ChannelModel model)
    : deployment_{&deployment},
      model_{model},
      index_{deployment.bs_positions, deployment.region.side_km()},
      los_{path_loss_law(model, LinkType::BsToUe, true)},
      nlos_{path_loss_law(model, LinkType::BsToUe, false)}
{
    if (deployment.bs_positions.empty()) {
        throw NoCoverageError("deployment has no base stations");
    }
    min_h_km_ = deployment.antenna_delta_m() / 1000.0;
    h2_ = min_h_km_ * min_h_km_;
    salt_.resize(deployment.bs_count());
    for (std::uint32_t b = 0; b < salt_.size(); ++b) {
        salt_[b] = TrialDraws::bs_salt(b);
    }
}

namespace {

// Squared inverse of a path-loss law; exp is markedly cheaper than pow here.
double reach_sq_at(const PathLossLaw& law, double pl_db) noexcept
{
    constexpr double two_ln10 = 4.605170185988091368;
    return std::exp(two_ln10 * (pl_db - law.intercept_db) / law.slope_db_per_decade);
}

} // namespace

void Associator::associate_one(Point2D position, std::uint64_t los_key, std::uint32_t& serving, double& path_loss_db,
                               bool& is_los) const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const bool single_slope = model_ == ChannelModel::SingleSlopeNlos;

    double best_pl = inf;
    std::uint32_t best_bs = std::numeric_limits<std::uint32_t>::max();
    bool best_los = false;
    // Squared 3D distances beyond which an NLoS (resp. any) state cannot
    // beat best_pl.
    double nlos_reach_sq = inf;
    double reach_sq = inf;
    // Upper bound of the LoS probability over the ring being visited.
    double ring_p_max = 1.0;

    auto consider = [&](std::uint32_t bs, double d2) {
        const double r_sq = d2 + h2_;
        if (r_sq > reach_sq) {
            return;
        }
        bool los = false;
        if (!single_slope) {
            const double u = TrialDraws::link_uniform(los_key, salt_[bs]);
            if (r_sq > nlos_reach_sq && u >= ring_p_max) {
                return;  // NLoS for sure, and NLoS cannot win from here
            }
            const double r = floored_distance(std::sqrt(r_sq));
            los = los_from_uniform(los_probability(LinkType::BsToUe, r), u);
        } else if (r_sq > nlos_reach_sq) {
            return;
        }
        const double r = floored_distance(std::sqrt(r_sq));
        const double pl = los ? los_.at(r) : nlos_.at(r);
        if (pl < best_pl || (pl == best_pl && bs < best_bs)) {
            best_pl = pl;
            best_bs = bs;
            best_los = los;
            nlos_reach_sq = reach_sq_at(nlos_, best_pl);
            reach_sq = single_slope ? nlos_reach_sq : std::max(nlos_reach_sq, reach_sq_at(los_, best_pl));
            // Slack so rounding in the inverse law never drops a tie.
            nlos_reach_sq *= 1.0 + 1e-12;
            reach_sq *= 1.0 + 1e-12;
        }
    };

    for (int ring = 0; ring <= index_.max_ring(); ++ring) {
        const double d_min = index_.ring_min_distance(ring);
        const double r_min_sq = d_min * d_min + h2_;
        if (r_min_sq > reach_sq) {
            break;
        }
        const double r_min = std::sqrt(r_min_sq);
        ring_p_max = r_min <= bs_los_breakpoint_km ? 1.0 : los_probability(LinkType::BsToUe, r_min);
        index_.visit_ring(position, ring, consider);
    }
    serving = best_bs;
    path_loss_db = best_pl;
    is_los = best_los;
}

void Associator::associate(std::span<const Point2D> ue_positions, const TrialDraws& draws,
                           AssociationResult& result) const
{
    const auto n_ue = ue_positions.size();
    const auto n_bs = deployment_->bs_count();
    result.serving_bs.resize(n_ue);
    result.serving_path_loss_db.resize(n_ue);
    result.serving_is_los.resize(n_ue);
    for (std::size_t i = 0; i < n_ue; ++i) {
        bool los = false;
        associate_one(ue_positions[i], draws.ue_link_key(static_cast<std::uint32_t>(i), rng::Tag::LinkLos),
                      result.serving_bs[i], result.serving_path_loss_db[i], los);
        result.serving_is_los[i] = los ? 1 : 0;
    }
    result.attached_offsets.assign(n_bs + 1, 0);
    for (auto bs : result.serving_bs) {
        ++result.attached_offsets[bs + 1];
    }
    for (std::size_t b = 0; b < n_bs; ++b) {
        result.attached_offsets[b + 1] += result.attached_offsets[b];
    }
    result.attached_list.resize(n_ue);
    // Filling in UE order keeps each BS's list ascending.
    thread_local std::vector<std::uint32_t> fill;
    fill.assign(result.attached_offsets.begin(), result.attached_offsets.end() - 1);
    for (std::size_t i = 0; i < n_ue; ++i) {
        result.attached_list[fill[result.serving_bs[i]]++] = static_cast<std::uint32_t>(i);
    }
}

AssociationResult associate(std::span<const Point2D> ue_positions, const Deployment& deployment, ChannelModel model,
                            const TrialDraws& draws)
{
    Associator associator{deployment, model};
    AssociationResult result;
    associator.associate(ue_positions, draws, result);
    return result;
}

std::vector<std::uint8_t> derive_active_set(const AssociationResult& assoc, bool imc_enabled, std::size_t bs_count)
{
    std::vector<std::uint8_t> active(bs_count, imc_enabled ? 0 : 1);
    if (imc_enabled) {
        for (auto bs : assoc.serving_bs) {
            active[bs] = 1;
        }
    }
    return active;
}

} // namespace udnsim
