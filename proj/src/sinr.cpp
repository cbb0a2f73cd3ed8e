#include "udnsim/sinr.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace udnsim {

SinrSample make_sinr(double signal_mw, double interference_mw, double noise_mw)
{
    return {signal_mw, interference_mw, noise_mw, signal_mw / (interference_mw + noise_mw)};
}

double total_interference(std::span<const InterferenceTerm> terms) noexcept
{
    double sum = 0.0;
    for (const auto& t : terms) {
        sum += t.received_power_mw;
    }
    return sum;
}

double residual_after_ic(std::span<const InterferenceTerm> terms, int ic_depth, bool rank_by_mean)
{
    if (ic_depth < 0) {
        throw std::invalid_argument("ic_depth must be non-negative");
    }
    if (ic_depth == 0) {
        return total_interference(terms);
    }
    thread_local std::vector<std::uint32_t> candidates;
    thread_local std::vector<std::uint8_t> cancelled;
    candidates.clear();
    for (std::uint32_t i = 0; i < terms.size(); ++i) {
        if (terms[i].kind == SourceKind::DownlinkBs) {
            candidates.push_back(i);
        }
    }
    cancelled.assign(terms.size(), 0);
    const auto strength = [&](std::uint32_t i) {
        return rank_by_mean ? terms[i].mean_power_mw : terms[i].received_power_mw;
    };
    const auto stronger = [&](std::uint32_t a, std::uint32_t b) {
        const double sa = strength(a);
        const double sb = strength(b);
        return sa > sb || (sa == sb && a < b);
    };
    const auto depth = std::min<std::size_t>(static_cast<std::size_t>(ic_depth), candidates.size());
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(depth),
                     candidates.end(), stronger);
    for (std::size_t k = 0; k < depth; ++k) {
        cancelled[candidates[k]] = 1;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!cancelled[i]) {
            sum += terms[i].received_power_mw;
        }
    }
    return sum;
}

void ProbeLinks::build(Point2D probe_position, const Deployment& deployment, ChannelModel model)
{
    probe = probe_position;
    const auto n = deployment.bs_count();
    const double side = deployment.region.side_km();
    const double h_km = deployment.antenna_delta_m() / 1000.0;
    const double h2 = h_km * h_km;
    const auto los = path_loss_law(model, LinkType::BsToUe, true);
    const auto nlos = path_loss_law(model, LinkType::BsToUe, false);
    d2_km2.resize(n);
    p_los.resize(n);
    gain_los.resize(n);
    gain_nlos.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        const double d2 = torus_distance_sq(probe, deployment.bs_positions[b], side);
        const double r = floored_distance(std::sqrt(d2 + h2));
        d2_km2[b] = d2;
        p_los[b] = model == ChannelModel::SingleSlopeNlos ? 0.0 : los_probability(LinkType::BsToUe, r);
        gain_los[b] = db_to_linear(-los.at(r));
        gain_nlos[b] = db_to_linear(-nlos.at(r));
    }
}

double ue_tx_power_mw(double serving_path_loss_db, UlPowerMode mode, const PowerConstants& power)
{
    return dbm_to_mw(ul_tx_power_dbm(serving_path_loss_db, mode, power));
}

namespace {

bool beyond_cutoff(const TrialView& view, double d2) noexcept
{
    return view.cutoff_km && d2 > *view.cutoff_km * *view.cutoff_km;
}

double scheduled_tx_mw(const TrialView& view, std::uint32_t cell, std::uint32_t ue)
{
    if (!view.scheduled_tx_mw.empty()) {
        return view.scheduled_tx_mw[cell];
    }
    return ue_tx_power_mw(view.association->serving_path_loss_db[ue], view.ul_power, view.power);
}

double link_gain(ChannelModel model, LinkType link, double r, double p_los, double u)
{
    const bool los = model == ChannelModel::ThreeGppLosNlos && los_from_uniform(p_los, u);
    return db_to_linear(-path_loss_law(model, link, los).at(r));
}

} // namespace

void dl_interference_terms(const TrialView& view, std::vector<InterferenceTerm>& terms)
{
    terms.clear();
    const auto& dep = *view.deployment;
    const auto& probe = view.probe;
    const ProbeDraws& pd = *probe.draws;
    const double side = dep.region.side_km();
    const double h_km = dep.antenna_delta_m() / 1000.0;
    const double bs_tx_mw = dbm_to_mw(view.power.bs_tx_dbm);
    const bool three_gpp = view.model == ChannelModel::ThreeGppLosNlos;
    const ProbeLinks* cache = probe.links;

    for (const std::uint32_t c : view.active_bs) {
        if (c == probe.serving) {
            continue;
        }
        const CellSchedule& cell = view.schedule[c];
        if (cell.direction == Direction::Downlink) {
            double gain;
            double d2;
            if (cache != nullptr) {
                d2 = cache->d2_km2[c];
                const bool los = three_gpp && los_from_uniform(cache->p_los[c], pd.link_los(c));
                gain = los ? cache->gain_los[c] : cache->gain_nlos[c];
            } else {
                d2 = torus_distance_sq(probe.position, dep.bs_positions[c], side);
                const double r = floored_distance(std::sqrt(d2 + h_km * h_km));
                const double p = three_gpp ? los_probability(LinkType::BsToUe, r) : 0.0;
                gain = link_gain(view.model, LinkType::BsToUe, r, p, pd.link_los(c));
            }
            if (beyond_cutoff(view, d2)) {
                continue;
            }
            const double mean = bs_tx_mw * gain;
            const double h = fading_from_uniform(pd.link_fading_uniform(c));
            terms.push_back({SourceKind::DownlinkBs, c, mean * h, mean});
        } else {
            const std::uint32_t v = cell.scheduled_ue;
            const double d2 = torus_distance_sq(view.ue_positions[v], probe.position, side);
            if (beyond_cutoff(view, d2)) {
                continue;
            }
            const double r = floored_distance(std::sqrt(d2));
            const double p = three_gpp ? los_probability(LinkType::UeToUe, r) : 0.0;
            const double gain = link_gain(view.model, LinkType::UeToUe, r, p, pd.ue_los(v));
            const double mean = scheduled_tx_mw(view, c, v) * gain;
            const double h = fading_from_uniform(pd.ue_fading_uniform(v));
            terms.push_back({SourceKind::UplinkUe, v, mean * h, mean});
        }
    }
}

void ul_interference_terms(const TrialView& view, std::vector<InterferenceTerm>& terms)
{
    terms.clear();
    const auto& dep = *view.deployment;
    const auto& draws = *view.draws;
    const std::uint32_t serving = view.probe.serving;
    const Point2D rx = dep.bs_positions[serving];
    const double side = dep.region.side_km();
    const double h_km = dep.antenna_delta_m() / 1000.0;
    const double bs_tx_mw = dbm_to_mw(view.power.bs_tx_dbm);
    const bool three_gpp = view.model == ChannelModel::ThreeGppLosNlos;

    for (const std::uint32_t c : view.active_bs) {
        if (c == serving) {
            continue;
        }
        const CellSchedule& cell = view.schedule[c];
        if (cell.direction == Direction::Downlink) {
            const double d2 = torus_distance_sq(dep.bs_positions[c], rx, side);
            if (beyond_cutoff(view, d2)) {
                continue;
            }
            const double r = floored_distance(std::sqrt(d2));
            const double p = three_gpp ? los_probability(LinkType::BsToBs, r) : 0.0;
            const double gain = link_gain(view.model, LinkType::BsToBs, r, p, draws.bs_bs_los(c, serving));
            const double mean = bs_tx_mw * gain;
            const double h = fading_from_uniform(draws.bs_bs_fading_uniform(c, serving));
            terms.push_back({SourceKind::DownlinkBs, c, mean * h, mean});
        } else {
            // Same LoS draw as this UE's association.
            const std::uint32_t v = cell.scheduled_ue;
            const double d2 = torus_distance_sq(view.ue_positions[v], rx, side);
            if (beyond_cutoff(view, d2)) {
                continue;
            }
            const double r = floored_distance(std::sqrt(d2 + h_km * h_km));
            const double p = three_gpp ? los_probability(LinkType::BsToUe, r) : 0.0;
            const double gain = link_gain(view.model, LinkType::BsToUe, r, p, draws.link_los(v, serving));
            const double mean = scheduled_tx_mw(view, c, v) * gain;
            const double h = fading_from_uniform(draws.link_fading_uniform(v, serving));
            terms.push_back({SourceKind::UplinkUe, v, mean * h, mean});
        }
    }
}

SinrSample dl_sinr(const TrialView& view, double signal_fading, std::vector<InterferenceTerm>& scratch)
{
    const double pl = view.probe.serving_path_loss_db;
    const double signal = dbm_to_mw(view.power.bs_tx_dbm) * db_to_linear(-pl) * signal_fading;
    dl_interference_terms(view, scratch);
    return make_sinr(signal, total_interference(scratch), dbm_to_mw(view.power.noise_at_ue_dbm));
}

SinrSample ul_sinr(const TrialView& view, double signal_fading, int ic_depth, bool rank_by_mean,
                   std::vector<InterferenceTerm>& scratch)
{
    if (ic_depth < 0) {
        throw std::invalid_argument("ic_depth must be non-negative");
    }
    const double pl = view.probe.serving_path_loss_db;
    const double signal = ue_tx_power_mw(pl, view.ul_power, view.power) * db_to_linear(-pl) * signal_fading;
    ul_interference_terms(view, scratch);
    return make_sinr(signal, residual_after_ic(scratch, ic_depth, rank_by_mean),
                     dbm_to_mw(view.power.noise_at_bs_dbm));
}

} // namespace udnsim
